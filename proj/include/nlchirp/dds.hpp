#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlchirp/chirp.hpp"
#include "nlchirp/waveform.hpp"

namespace nlchirp {

/// Phase-accumulator synthesis config: reference clock, mapping-table
/// length 2^L, and the per-step frequency-slope schedule K_i.
struct DdsConfig {
    double f_clk = 1e6;              // Hz
    int table_bits = 12;             // L >= 1
    std::vector<std::int64_t> slope; // K_i >= 0; a single entry broadcasts

    void validate() const;
};

/// f_i = f_{i-1} + K_i with f_0 = 0, as raw table indices.
std::vector<std::int64_t> freq_index_sequence(const DdsConfig& cfg, std::size_t steps);

/// phi_i = running sum of f_1..f_i (double cumulative sum of K).
std::vector<std::int64_t> phase_index_sequence(const DdsConfig& cfg, std::size_t steps);

/// Physical frequency of a raw index: index * f_clk / 2^L.
double index_to_hz(const DdsConfig& cfg, std::int64_t index);

/// Quantized bridge to the ideal chirp: per-sample slope increments are the
/// nearest-integer table steps tracking the profile's instantaneous
/// frequency, and each output sample takes its phase from the accumulator
/// (phi mod 2^L) * 2pi / 2^L. Requires L >= sf.
Waveform synth_via_dds(const ChirpProfile& profile, const DdsConfig& cfg);

/// CSV dump (step, freq_index, phase_index) for inspection.
void dump_index_csv(const DdsConfig& cfg, std::size_t steps, const std::string& path);

} // namespace nlchirp
