#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nlchirp/chirp.hpp"
#include "nlchirp/waveform.hpp"

namespace nlchirp {

/// Alias-folded N-bin spectrum of one dechirped symbol window.
/// Bins carry a unitary 1/sqrt(n_samples) scale so an aligned noiseless
/// symbol peaks at sqrt(window energy).
struct DechirpSpectrum {
    std::vector<cplx> bins;        // N = 2^sf, folded by complex addition
    std::vector<double> magnitudes;
    double total_energy = 0.0;     // sum of squared folded magnitudes
};

struct PeakReport {
    std::uint32_t bin = 0;
    double magnitude = 0.0;
    double scatter_ratio = 0.0; // peak energy / total energy
};

/// Multiplies the window sample-wise by the base down-chirp, takes a
/// length-(N*osr) DFT and folds alias bins k, k+N, ... into N bins.
DechirpSpectrum dechirp(std::span<const cplx> window, const ChirpProfile& profile);

/// Same, against an arbitrary conjugate reference (e.g. the base up-chirp
/// when dechirping a down-chirp pilot).
DechirpSpectrum dechirp_with_reference(std::span<const cplx> window,
                                       std::span<const cplx> reference_conj,
                                       std::size_t n_bins);

/// Argmax bin; ties break toward the lowest index.
std::uint32_t decide_symbol(const DechirpSpectrum& spec);

/// Peak squared magnitude over total energy, in (0, 1].
double scatter_ratio(const DechirpSpectrum& spec);

PeakReport peak_report(const DechirpSpectrum& spec);

/// Analytic frequency of the dechirped product of a symbol arriving t_gap
/// early: f0 + f_c(t + t_gap) - f_c(t).
double residual_frequency(const ChirpProfile& profile, double t_gap, double f0, double t);

} // namespace nlchirp
