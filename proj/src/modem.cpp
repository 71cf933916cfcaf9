#include "nlchirp/modem.hpp"

#include <cmath>
#include <stdexcept>

#include "nlchirp/fft.hpp"

namespace nlchirp {

DechirpSpectrum dechirp_with_reference(std::span<const cplx> window,
                                       std::span<const cplx> reference_conj,
                                       std::size_t n_bins) {
    if (window.size() != reference_conj.size())
        throw std::invalid_argument("dechirp: window/reference length mismatch");
    if (window.empty() || window.size() % n_bins != 0)
        throw std::invalid_argument("dechirp: window length not a multiple of bin count");

    const std::size_t n = window.size();
    const std::size_t osr = n / n_bins;
    std::vector<cplx> product(n);
    for (std::size_t i = 0; i < n; ++i) product[i] = window[i] * reference_conj[i];

    std::vector<cplx> spectrum = fft_forward(product);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));

    DechirpSpectrum out;
    out.bins.assign(n_bins, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < n_bins; ++k)
        for (std::size_t m = 0; m < osr; ++m) out.bins[k] += spectrum[k + m * n_bins];
    out.magnitudes.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) {
        out.bins[k] *= scale;
        out.magnitudes[k] = std::abs(out.bins[k]);
        out.total_energy += std::norm(out.bins[k]);
    }
    return out;
}

DechirpSpectrum dechirp(std::span<const cplx> window, const ChirpProfile& profile) {
    if (window.size() != profile.n_samples())
        throw std::invalid_argument("dechirp: window length != profile.n_samples");
    const Waveform down = base_downchirp(profile);
    return dechirp_with_reference(window, down.samples, profile.n_bins());
}

std::uint32_t decide_symbol(const DechirpSpectrum& spec) {
    std::uint32_t best = 0;
    double best_mag = -1.0;
    for (std::size_t k = 0; k < spec.magnitudes.size(); ++k) {
        if (spec.magnitudes[k] > best_mag) {
            best_mag = spec.magnitudes[k];
            best = static_cast<std::uint32_t>(k);
        }
    }
    return best;
}

double scatter_ratio(const DechirpSpectrum& spec) {
    if (spec.total_energy <= 0.0)
        throw std::invalid_argument("scatter_ratio: zero-energy window");
    const std::uint32_t bin = decide_symbol(spec);
    const double peak = spec.magnitudes[bin];
    return peak * peak / spec.total_energy;
}

PeakReport peak_report(const DechirpSpectrum& spec) {
    PeakReport rep;
    rep.bin = decide_symbol(spec);
    rep.magnitude = spec.magnitudes[rep.bin];
    rep.scatter_ratio = scatter_ratio(spec);
    return rep;
}

double residual_frequency(const ChirpProfile& profile, double t_gap, double f0, double t) {
    if (t_gap < 0.0 || t_gap >= profile.symbol_time())
        throw std::domain_error("residual_frequency: t_gap outside [0, T)");
    return f0 + instantaneous_frequency(profile, t + t_gap) - instantaneous_frequency(profile, t);
}

} // namespace nlchirp
