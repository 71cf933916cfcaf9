#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nlchirp/waveform.hpp"

namespace nlchirp {

constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// One transmission inside a collision scene: a frame placed at a sample
/// offset with a gain (0 dB = unit power) and carrier frequency offset.
struct ChannelPath {
    std::int64_t start_offset = 0; // samples, >= 0
    double gain_db = 0.0;
    double cfo_hz = 0.0;
    Waveform frame;
};

/// A set of concurrent transmissions plus a noise level. The input to every
/// experiment; rendering is pure given the seed.
struct Scene {
    std::vector<ChannelPath> paths;
    double snr_db = kNoNoise;      // relative to the unit-power target path
    std::int64_t duration = 0;     // samples
    std::size_t target_index = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Sum of gain-scaled, CFO-rotated, offset-placed frames (no noise).
Waveform superpose(const Scene& scene);

/// Adds circular complex Gaussian noise with per-sample variance
/// 10^{-snr_db/10} relative to unit signal power. Deterministic per seed.
Waveform awgn(const Waveform& wave, double snr_db, std::uint64_t seed);

/// Renders the full scene: superpose + awgn(scene.snr_db, scene.seed).
Waveform render(const Scene& scene);

/// Target at 0 dB; interferer i at gain -sir_db[i] and start offset
/// t_gap[i] * n_samples (fractions of a symbol, rounded to samples).
Scene make_collision(const Waveform& target_frame,
                     const std::vector<Waveform>& interferer_frames,
                     const std::vector<double>& sir_db,
                     const std::vector<double>& t_gap_fractions,
                     std::size_t symbol_samples, double snr_db,
                     std::uint64_t seed);

/// Interleaved little-endian float32 I,Q pairs; 8 bytes per sample.
void save_iq(const Waveform& wave, const std::string& path);
Waveform load_iq(const std::string& path, double sample_rate = 0.0);

} // namespace nlchirp
