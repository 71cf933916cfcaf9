#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlchirp/waveform.hpp"

namespace nlchirp {

/// A chirp family expressed in the unified coefficient space
/// ([0,1] time x [0,1] frequency). f(x) = sum a_i x^i must start at 0,
/// end at 1 and grow strictly monotonically, so that the full sweep maps
/// onto -BW/2..+BW/2 regardless of SF/BW.
struct ChirpPolynomial {
    int family_id = 0;
    std::string label;
    std::vector<double> coeffs; // a[0..n], n >= 1

    int order() const { return static_cast<int>(coeffs.size()) - 1; }

    double eval(double x) const;
    double derivative(double x) const;

    /// Throws std::invalid_argument naming the violated invariant.
    void validate() const;
};

constexpr int kMaxPolyOrder = 8;

/// Time-frequency coefficients k[0..n] for one (poly, sf, bw) combination.
/// k_0 = bw*a_0 - bw/2, k_i = bw^{i+1} / 2^{sf*i} * a_i for i >= 1.
std::vector<double> map_coefficients(const ChirpPolynomial& poly, int sf, double bw);

/// One chirp family instantiated at fixed SF/BW/oversampling.
/// Immutable after construction; safe to share across threads.
struct ChirpProfile {
    ChirpPolynomial poly;
    int sf = 0;           // 7..12
    double bw = 0.0;      // Hz
    int osr = 1;          // sample_rate = bw * osr
    std::vector<double> k; // derived, Hz/s^i

    ChirpProfile() = default;
    ChirpProfile(ChirpPolynomial p, int sf, double bw, int osr);

    std::size_t n_bins() const { return std::size_t{1} << sf; }
    std::size_t n_samples() const { return n_bins() * static_cast<std::size_t>(osr); }
    double sample_rate() const { return bw * osr; }
    double symbol_time() const { return static_cast<double>(n_bins()) / bw; }
    double bin_width() const { return bw / static_cast<double>(n_bins()); }
};

/// f_c(t) = sum k_i t^i for t in [0, 2^sf/bw]. Throws std::domain_error
/// outside the symbol interval.
double instantaneous_frequency(const ChirpProfile& profile, double t);

/// Baseband waveform of one symbol. The per-sample phase is the cumulative
/// sum of the wrapped instantaneous frequency f_0 + f_c(t), evaluated at
/// sample midpoints so repeated symbols stay phase-continuous.
Waveform synth_symbol(const ChirpProfile& profile, std::uint32_t symbol);

/// Sample-wise conjugate of the base up-chirp (symbol 0).
Waveform base_downchirp(const ChirpProfile& profile);

// ---------------------------------------------------------------------------
// Family registry
// ---------------------------------------------------------------------------

enum Family : int {
    kLinear = 0,
    kQuadratic1 = 1,
    kQuadratic2 = 2,
    kQuartic1 = 3,
    kQuartic2 = 4,
    kSine1 = 5,
    kSine2 = 6,
};

/// The seven built-in families: linear, quadratic1 (x^2), quadratic2
/// (2x - x^2), quartic1 (x^4), quartic2 (4x - 6x^2 + 4x^3 - x^4) and the
/// two sine shapes admitted via constrained least-squares fits.
std::vector<ChirpPolynomial> builtin_families();

ChirpPolynomial builtin_family(int family_id);

/// Loads a registry from a JSON file: a list of objects with
/// "family_id", "label" and "coeffs". Every entry is validated.
std::vector<ChirpPolynomial> load_family_registry(const std::string& path);

void save_family_registry(const std::vector<ChirpPolynomial>& families,
                          const std::string& path);

/// Degree-<=8 least-squares fit of y(x) onto the unified space with the
/// endpoint constraints f(0)=0, f(1)=1 built in. Throws if the residual
/// exceeds max_residual.
ChirpPolynomial fit_unified_polynomial(const std::vector<double>& xs,
                                       const std::vector<double>& ys,
                                       int degree, int family_id,
                                       const std::string& label,
                                       double max_residual = 1e-4);

} // namespace nlchirp
