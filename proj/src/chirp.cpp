#include "nlchirp/chirp.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace nlchirp {

double ChirpPolynomial::eval(double x) const {
    double y = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) y = y * x + coeffs[i];
    return y;
}

double ChirpPolynomial::derivative(double x) const {
    double y = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 1;) y = y * x + coeffs[i] * static_cast<double>(i);
    return y;
}

void ChirpPolynomial::validate() const {
    if (coeffs.size() < 2)
        throw std::invalid_argument("chirp polynomial: order must be >= 1");
    if (order() > kMaxPolyOrder)
        throw std::invalid_argument("chirp polynomial: order exceeds 8");
    if (std::abs(eval(0.0)) > 1e-9)
        throw std::invalid_argument("chirp polynomial: f(0) != 0");
    if (std::abs(eval(1.0) - 1.0) > 1e-9)
        throw std::invalid_argument("chirp polynomial: f(1) != 1");
    // Strict monotonicity is probed on sample values, not the derivative:
    // valid sweeps may have f'(x) = 0 at isolated points (e.g. 2x - x^2 at
    // x = 1) while still increasing strictly between probes.
    const int kProbes = 1024;
    double prev = eval(0.0);
    for (int i = 1; i <= kProbes; ++i) {
        const double x = static_cast<double>(i) / kProbes;
        const double y = eval(x);
        if (y <= prev)
            throw std::invalid_argument("chirp polynomial: sweep not strictly monotone");
        if (y < -1e-9 || y > 1.0 + 1e-9)
            throw std::invalid_argument("chirp polynomial: f(x) outside [0,1]");
        prev = y;
    }
}

std::vector<double> map_coefficients(const ChirpPolynomial& poly, int sf, double bw) {
    poly.validate();
    if (sf < 7 || sf > 12) throw std::invalid_argument("spreading factor must be in 7..12");
    if (bw <= 0.0) throw std::invalid_argument("bandwidth must be positive");
    std::vector<double> k(poly.coeffs.size());
    k[0] = bw * poly.coeffs[0] - bw / 2.0;
    for (std::size_t i = 1; i < poly.coeffs.size(); ++i)
        k[i] = std::pow(bw, static_cast<double>(i + 1)) /
               std::exp2(static_cast<double>(sf) * static_cast<double>(i)) * poly.coeffs[i];
    return k;
}

ChirpProfile::ChirpProfile(ChirpPolynomial p, int sf_, double bw_, int osr_)
    : poly(std::move(p)), sf(sf_), bw(bw_), osr(osr_) {
    if (osr < 1) throw std::invalid_argument("oversampling ratio must be >= 1");
    k = map_coefficients(poly, sf, bw);
}

double instantaneous_frequency(const ChirpProfile& profile, double t) {
    if (t < 0.0 || t > profile.symbol_time())
        throw std::domain_error("instantaneous_frequency: t outside symbol interval");
    double f = 0.0;
    for (std::size_t i = profile.k.size(); i-- > 0;) f = f * t + profile.k[i];
    return f;
}

namespace {

// Wrap f into [-bw/2, bw/2). f_0 + f_c never strays more than one full
// bandwidth above the band edge, so a short loop suffices.
double wrap_band(double f, double bw) {
    while (f >= bw / 2.0) f -= bw;
    while (f < -bw / 2.0) f += bw;
    return f;
}

} // namespace

Waveform synth_symbol(const ChirpProfile& profile, std::uint32_t symbol) {
    if (symbol >= profile.n_bins())
        throw std::domain_error("synth_symbol: symbol value out of range");
    const std::size_t n = profile.n_samples();
    const double fs = profile.sample_rate();
    const double f0 = static_cast<double>(symbol) * profile.bin_width();

    Waveform wave;
    wave.sample_rate = fs;
    wave.samples.resize(n);
    double phase = 0.0;
    double wrap_offset = 0.0;
    const auto osr = static_cast<std::size_t>(profile.osr);
    for (std::size_t m = 0; m < n; ++m) {
        const double t = (static_cast<double>(m) + 0.5) / fs; // midpoint of the sample
        const double f_raw = f0 + instantaneous_frequency(profile, t);
        // Pick the wrap count once per osr-sized group of phase increments.
        // The osr-decimated sample g accumulates increments g*osr+1 ..
        // (g+1)*osr, so the gate switches at m % osr == 1: a wrap change then
        // spans whole decimated steps and contributes an exact multiple of
        // 2*pi, keeping alias folding coherent. No-op at osr == 1.
        if (m == 0 || m % osr == 1 % osr)
            wrap_offset = f_raw - wrap_band(f_raw, profile.bw);
        phase += 2.0 * std::numbers::pi * (f_raw - wrap_offset) / fs;
        wave.samples[m] = std::polar(1.0, phase);
    }
    return wave;
}

Waveform base_downchirp(const ChirpProfile& profile) {
    Waveform wave = synth_symbol(profile, 0);
    for (auto& s : wave.samples) s = std::conj(s);
    return wave;
}

// ---------------------------------------------------------------------------
// Built-in families
// ---------------------------------------------------------------------------

ChirpPolynomial fit_unified_polynomial(const std::vector<double>& xs,
                                       const std::vector<double>& ys,
                                       int degree, int family_id,
                                       const std::string& label,
                                       double max_residual) {
    if (degree < 2 || degree > kMaxPolyOrder)
        throw std::invalid_argument("fit degree must be in 2..8");
    if (xs.size() != ys.size() || xs.size() < static_cast<std::size_t>(degree))
        throw std::invalid_argument("fit needs matching sample vectors");

    // Endpoint constraints a_0 = 0 and sum a_i = 1 are absorbed by fitting
    // g(x) = f(x) - x over the basis x^i - x, i = 2..degree.
    const int nb = degree - 1;
    std::vector<std::vector<double>> ata(nb, std::vector<double>(nb, 0.0));
    std::vector<double> atb(nb, 0.0);
    for (std::size_t s = 0; s < xs.size(); ++s) {
        const double x = xs[s];
        std::vector<double> phi(nb);
        double xp = x;
        for (int i = 0; i < nb; ++i) {
            xp *= x;
            phi[i] = xp - x; // x^{i+2} - x
        }
        const double target = ys[s] - x;
        for (int i = 0; i < nb; ++i) {
            atb[i] += phi[i] * target;
            for (int j = 0; j < nb; ++j) ata[i][j] += phi[i] * phi[j];
        }
    }

    // Gaussian elimination with partial pivoting; nb <= 7.
    for (int col = 0; col < nb; ++col) {
        int piv = col;
        for (int r = col + 1; r < nb; ++r)
            if (std::abs(ata[r][col]) > std::abs(ata[piv][col])) piv = r;
        std::swap(ata[col], ata[piv]);
        std::swap(atb[col], atb[piv]);
        if (std::abs(ata[col][col]) < 1e-14)
            throw std::runtime_error("fit_unified_polynomial: singular normal equations");
        for (int r = col + 1; r < nb; ++r) {
            const double m = ata[r][col] / ata[col][col];
            for (int c = col; c < nb; ++c) ata[r][c] -= m * ata[col][c];
            atb[r] -= m * atb[col];
        }
    }
    std::vector<double> sol(nb);
    for (int r = nb; r-- > 0;) {
        double v = atb[r];
        for (int c = r + 1; c < nb; ++c) v -= ata[r][c] * sol[c];
        sol[r] = v / ata[r][r];
    }

    ChirpPolynomial poly;
    poly.family_id = family_id;
    poly.label = label;
    poly.coeffs.assign(static_cast<std::size_t>(degree) + 1, 0.0);
    double high_sum = 0.0;
    for (int i = 0; i < nb; ++i) {
        poly.coeffs[static_cast<std::size_t>(i) + 2] = sol[i];
        high_sum += sol[i];
    }
    poly.coeffs[1] = 1.0 - high_sum;

    double worst = 0.0;
    for (std::size_t s = 0; s < xs.size(); ++s)
        worst = std::max(worst, std::abs(poly.eval(xs[s]) - ys[s]));
    if (worst > max_residual)
        throw std::runtime_error("fit_unified_polynomial: residual " + std::to_string(worst) +
                                 " exceeds tolerance");
    poly.validate();
    return poly;
}

namespace {

ChirpPolynomial fit_sine_family(double half_span, int family_id, const std::string& label) {
    // sin(t) on [-half_span, half_span), rescaled into the unit box.
    const int kSamples = 2048;
    std::vector<double> xs(kSamples + 1), ys(kSamples + 1);
    const double lo = std::sin(-half_span);
    const double hi = std::sin(half_span);
    for (int i = 0; i <= kSamples; ++i) {
        const double x = static_cast<double>(i) / kSamples;
        const double t = -half_span + 2.0 * half_span * x;
        xs[static_cast<std::size_t>(i)] = x;
        ys[static_cast<std::size_t>(i)] = (std::sin(t) - lo) / (hi - lo);
    }
    return fit_unified_polynomial(xs, ys, kMaxPolyOrder, family_id, label);
}

} // namespace

std::vector<ChirpPolynomial> builtin_families() {
    std::vector<ChirpPolynomial> fams;
    fams.push_back({kLinear, "linear", {0.0, 1.0}});
    fams.push_back({kQuadratic1, "quadratic1", {0.0, 0.0, 1.0}});
    fams.push_back({kQuadratic2, "quadratic2", {0.0, 2.0, -1.0}});
    fams.push_back({kQuartic1, "quartic1", {0.0, 0.0, 0.0, 0.0, 1.0}});
    fams.push_back({kQuartic2, "quartic2", {0.0, 4.0, -6.0, 4.0, -1.0}});
    fams.push_back(fit_sine_family(std::numbers::pi / 2.0, kSine1, "sine1"));
    fams.push_back(fit_sine_family(3.0 * std::numbers::pi / 8.0, kSine2, "sine2"));
    for (const auto& f : fams) f.validate();
    return fams;
}

ChirpPolynomial builtin_family(int family_id) {
    for (auto& f : builtin_families())
        if (f.family_id == family_id) return f;
    throw std::invalid_argument("unknown built-in family id " + std::to_string(family_id));
}

std::vector<ChirpPolynomial> load_family_registry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open family registry: " + path);
    nlohmann::json j;
    in >> j;
    std::vector<ChirpPolynomial> fams;
    for (const auto& entry : j) {
        ChirpPolynomial poly;
        poly.family_id = entry.at("family_id").get<int>();
        poly.label = entry.at("label").get<std::string>();
        poly.coeffs = entry.at("coeffs").get<std::vector<double>>();
        poly.validate();
        fams.push_back(std::move(poly));
    }
    return fams;
}

void save_family_registry(const std::vector<ChirpPolynomial>& families,
                          const std::string& path) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& f : families)
        j.push_back({{"family_id", f.family_id}, {"label", f.label}, {"coeffs", f.coeffs}});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write family registry: " + path);
    out << j.dump(2) << '\n';
}

} // namespace nlchirp
