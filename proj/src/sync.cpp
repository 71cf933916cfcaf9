#include "nlchirp/sync.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace nlchirp {

double detection_threshold(std::size_t n_bins) {
    return 3.0 * std::log(static_cast<double>(n_bins)) / static_cast<double>(n_bins);
}

namespace {

int circular_distance(std::uint32_t a, std::uint32_t b, std::size_t n) {
    const int d = std::abs(static_cast<int>(a) - static_cast<int>(b));
    return std::min(d, static_cast<int>(n) - d);
}

// Energy fraction in bins -1..1 of one dechirped window: how much of the
// window is a chirp aligned to this exact hypothesis, as opposed to strong
// chirp energy anywhere (which overlapping packets provide for free).
double aligned_energy(const DechirpSpectrum& spec) {
    if (spec.total_energy <= 0.0) return 0.0;
    const std::size_t n = spec.magnitudes.size();
    double e = 0.0;
    for (std::size_t b : {n - 1, std::size_t{0}, std::size_t{1}})
        e += spec.magnitudes[b] * spec.magnitudes[b];
    return e / spec.total_energy;
}

// Mean aligned-energy fraction over the header windows assuming the frame
// starts at `start`: 8 preamble windows dechirped against the down-chirp
// plus, when they fit, the 2 SFD windows dechirped against the up-chirp.
// The preamble is phase-continuous, so hypotheses differing by whole
// symbols keep its peak at bin 0; the windows preceding the true start and
// the SFD down-chirps are what pin the boundary.
double alignment_score(const Waveform& stream, const Waveform& down, const Waveform& up,
                       std::size_t n_bins, std::int64_t start) {
    const auto n = static_cast<std::int64_t>(down.size());
    if (start < 0 || start + 8 * n > static_cast<std::int64_t>(stream.size())) return 0.0;
    double sum = 0.0;
    int windows = 0;
    for (int k = 0; k < 8; ++k) {
        std::span<const cplx> window(stream.samples.data() + start + k * n,
                                     static_cast<std::size_t>(n));
        sum += aligned_energy(dechirp_with_reference(window, down.samples, n_bins));
        ++windows;
    }
    if (start + 12 * n <= static_cast<std::int64_t>(stream.size())) {
        for (int k = 10; k < 12; ++k) {
            std::span<const cplx> window(stream.samples.data() + start + k * n,
                                         static_cast<std::size_t>(n));
            sum += aligned_energy(dechirp_with_reference(window, up.samples, n_bins));
            ++windows;
        }
    }
    return sum / windows;
}

} // namespace

std::vector<PreambleCandidate> detect_preamble(const Waveform& stream,
                                               const ChirpProfile& linear_profile) {
    const std::size_t n = linear_profile.n_samples();
    const std::size_t n_bins = linear_profile.n_bins();
    std::vector<PreambleCandidate> candidates;
    if (stream.size() < n) return candidates;

    const Waveform down = base_downchirp(linear_profile);
    const Waveform up = synth_symbol(linear_profile, 0);
    const double threshold = detection_threshold(n_bins);

    const std::size_t n_windows = stream.size() / n;

    // Track a run per strong bin rather than per window argmax: when packets
    // overlap, a weaker preamble's peak is still present in the spectrum even
    // though a stronger packet owns the argmax.
    struct Run {
        std::uint32_t first_bin = 0;
        std::uint32_t last_bin = 0;
        std::size_t start = 0;
        std::size_t len = 0;
    };

    auto emit = [&](const Run& r) {
        if (r.len < 6) return;
        // Coarse start from the run's first window and bin; the bin only
        // resolves the offset modulo one symbol, so try the neighbouring
        // symbol hypotheses and keep the best alignment.
        const std::int64_t coarse =
            static_cast<std::int64_t>(r.start * n) -
            static_cast<std::int64_t>(r.first_bin) * linear_profile.osr;
        PreambleCandidate best;
        best.score = -1.0;
        for (std::int64_t shift = -1; shift <= 1; ++shift) {
            const std::int64_t hyp = coarse + shift * static_cast<std::int64_t>(n);
            const double score = alignment_score(stream, down, up, n_bins, hyp);
            if (score > best.score) best = {hyp, score};
        }
        if (best.score > 0.0) candidates.push_back(best);
    };

    constexpr std::size_t kMaxStrongBins = 8;
    std::vector<Run> active, next_active;
    std::vector<std::pair<double, std::uint32_t>> strong;
    for (std::size_t j = 0; j < n_windows; ++j) {
        std::span<const cplx> window(stream.samples.data() + j * n, n);
        const DechirpSpectrum spec = dechirp_with_reference(window, down.samples, n_bins);
        strong.clear();
        if (spec.total_energy > 0.0) {
            const double floor = threshold * spec.total_energy;
            for (std::uint32_t b = 0; b < n_bins; ++b) {
                const double e = spec.magnitudes[b] * spec.magnitudes[b];
                if (e >= floor) strong.emplace_back(e, b);
            }
        }
        if (strong.size() > kMaxStrongBins) {
            std::partial_sort(strong.begin(),
                              strong.begin() + static_cast<std::ptrdiff_t>(kMaxStrongBins),
                              strong.end(), std::greater<>());
            strong.resize(kMaxStrongBins);
        }

        std::vector<bool> used(strong.size(), false);
        next_active.clear();
        for (const Run& r : active) {
            bool extended = false;
            for (std::size_t s = 0; s < strong.size(); ++s) {
                if (used[s]) continue;
                if (circular_distance(strong[s].second, r.last_bin, n_bins) <= 1) {
                    Run ext = r;
                    ext.last_bin = strong[s].second;
                    ++ext.len;
                    next_active.push_back(ext);
                    used[s] = true;
                    extended = true;
                    break;
                }
            }
            if (!extended) emit(r);
        }
        for (std::size_t s = 0; s < strong.size(); ++s)
            if (!used[s]) next_active.push_back({strong[s].second, strong[s].second, j, 1});
        active.swap(next_active);
    }
    for (const Run& r : active) emit(r);

    // Dedup: collapse candidates within half a symbol, keeping the best score.
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return a.start_offset < b.start_offset; });
    std::vector<PreambleCandidate> dedup;
    for (const auto& c : candidates) {
        if (!dedup.empty() &&
            c.start_offset - dedup.back().start_offset < static_cast<std::int64_t>(n / 2)) {
            if (c.score > dedup.back().score) dedup.back() = c;
        } else {
            dedup.push_back(c);
        }
    }
    return dedup;
}

namespace {

double fractional_peak_at(const DechirpSpectrum& spec, std::uint32_t k) {
    const std::size_t n = spec.bins.size();
    // Complex three-point estimator: exact for the rectangular-window
    // Dirichlet kernel, where a magnitude parabola is badly biased.
    const cplx a = spec.bins[(k + n - 1) % n];
    const cplx b = spec.bins[k];
    const cplx g = spec.bins[(k + 1) % n];
    const cplx denom = 2.0 * b - a - g;
    double delta = 0.0;
    if (std::abs(denom) > 1e-300) delta = std::real((a - g) / denom);
    delta = std::clamp(delta, -0.5, 0.5);
    double p = static_cast<double>(k) + delta;
    if (p > static_cast<double>(n) / 2.0) p -= static_cast<double>(n);
    return p;
}

// Pilots of an already-detected candidate peak within a few bins of zero
// (residual STO/CFO), so restrict the argmax accordingly: the global argmax
// may belong to an overlapping packet at a large offset.
constexpr int kPilotSearchRadius = 16;

std::uint32_t pilot_argmax(const DechirpSpectrum& spec) {
    const std::size_t n = spec.magnitudes.size();
    const int radius = std::min<int>(kPilotSearchRadius, static_cast<int>(n) / 4);
    std::uint32_t best = 0;
    double best_mag = -1.0;
    for (int d = -radius; d <= radius; ++d) {
        const auto b = static_cast<std::uint32_t>((d + static_cast<int>(n)) %
                                                  static_cast<int>(n));
        if (spec.magnitudes[b] > best_mag) {
            best_mag = spec.magnitudes[b];
            best = b;
        }
    }
    return best;
}

} // namespace

double fractional_peak_bin(const DechirpSpectrum& spec) {
    return fractional_peak_at(spec, decide_symbol(spec));
}

namespace {

double peak_to_mean(const DechirpSpectrum& spec) {
    double sum = 0.0, peak = 0.0;
    for (double m : spec.magnitudes) {
        sum += m;
        peak = std::max(peak, m);
    }
    const double mean = sum / static_cast<double>(spec.magnitudes.size());
    return mean > 0.0 ? peak / mean : 0.0;
}

constexpr double kLowConfidencePeakToMean = 5.0;

} // namespace

SyncEstimate estimate_sto_cfo(std::span<const cplx> pilot_up_window,
                              std::span<const cplx> pilot_down_window,
                              const ChirpProfile& linear_profile) {
    const std::size_t n = linear_profile.n_samples();
    if (pilot_up_window.size() != n || pilot_down_window.size() != n)
        throw std::invalid_argument("estimate_sto_cfo: pilot windows must be symbol length");

    const Waveform up = synth_symbol(linear_profile, 0);
    const Waveform down = base_downchirp(linear_profile);
    const DechirpSpectrum spec_up =
        dechirp_with_reference(pilot_up_window, down.samples, linear_profile.n_bins());
    const DechirpSpectrum spec_down =
        dechirp_with_reference(pilot_down_window, up.samples, linear_profile.n_bins());

    SyncEstimate est;
    est.peak_up_bin = fractional_peak_at(spec_up, pilot_argmax(spec_up));
    est.peak_down_bin = fractional_peak_at(spec_down, pilot_argmax(spec_down));
    const double cfo_bins = (est.peak_up_bin + est.peak_down_bin) / 2.0;
    const double sto_bins = (est.peak_down_bin - est.peak_up_bin) / 2.0;
    est.cfo_hz = cfo_bins * linear_profile.bin_width();
    est.sto_samples = sto_bins * linear_profile.osr;
    est.confidence = std::min(peak_to_mean(spec_up), peak_to_mean(spec_down));
    est.low_confidence = est.confidence < kLowConfidencePeakToMean;
    return est;
}

Waveform correct(const Waveform& stream, const SyncEstimate& est) {
    const auto len = static_cast<std::int64_t>(stream.size());
    if (std::abs(est.sto_samples) >= static_cast<double>(len))
        throw std::invalid_argument("correct: shift exceeds stream bounds");

    Waveform out;
    out.sample_rate = stream.sample_rate;
    out.samples.assign(stream.size(), cplx{0.0, 0.0});
    const double shift = est.sto_samples;
    const auto base = static_cast<std::int64_t>(std::floor(shift));
    const double frac = shift - static_cast<double>(base);
    const double w = 2.0 * std::numbers::pi * est.cfo_hz / stream.sample_rate;
    const bool integral = frac == 0.0;
    for (std::int64_t i = 0; i < len; ++i) {
        const std::int64_t j = i + base;
        if (j < 0 || j >= len || (!integral && j + 1 >= len)) continue;
        const cplx v = integral
                           ? stream.samples[static_cast<std::size_t>(j)]
                           : stream.samples[static_cast<std::size_t>(j)] * (1.0 - frac) +
                                 stream.samples[static_cast<std::size_t>(j + 1)] * frac;
        out.samples[static_cast<std::size_t>(i)] =
            v * std::polar(1.0, -w * static_cast<double>(i));
    }
    return out;
}

} // namespace nlchirp
