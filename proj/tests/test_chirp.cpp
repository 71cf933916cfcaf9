#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>

#include "nlchirp/chirp.hpp"
#include "nlchirp/modem.hpp"
#include "oracles.hpp"

using namespace nlchirp;

TEST_CASE("coefficient mapping: linear family") {
    const auto k = map_coefficients(builtin_family(kLinear), 10, 125000.0);
    REQUIRE(k.size() == 2);
    CHECK(k[0] == doctest::Approx(-62500.0).epsilon(1e-12));
    CHECK(k[1] == doctest::Approx(15258789.0625).epsilon(1e-12));
}

TEST_CASE("coefficient mapping: quadratic1 family") {
    const auto k = map_coefficients(builtin_family(kQuadratic1), 10, 125000.0);
    REQUIRE(k.size() == 3);
    CHECK(k[0] == doctest::Approx(-62500.0).epsilon(1e-12));
    CHECK(k[1] == 0.0);
    const double expected = std::pow(125000.0, 3) / std::exp2(20);
    CHECK(k[2] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(k[2] == doctest::Approx(1.862645e9).epsilon(1e-6));
}

TEST_CASE("sweep endpoints for every family / sf / bw") {
    for (const auto& fam : builtin_families())
        for (int sf : {7, 9, 12})
            for (double bw : {125000.0, 250000.0, 500000.0}) {
                const ChirpProfile p(fam, sf, bw, 1);
                const double T = p.symbol_time();
                CHECK(std::abs(instantaneous_frequency(p, 0.0) + bw / 2) < 1e-6 * bw);
                CHECK(std::abs(instantaneous_frequency(p, T) - bw / 2) < 1e-6 * bw);
            }
}

TEST_CASE("instantaneous frequency examples") {
    const ChirpProfile lin(builtin_family(kLinear), 10, 125000.0, 1);
    const double T = lin.symbol_time();
    CHECK(std::abs(instantaneous_frequency(lin, T / 2)) < 1e-6);

    const ChirpProfile q1(builtin_family(kQuadratic1), 10, 125000.0, 1);
    CHECK(instantaneous_frequency(q1, T / 2) == doctest::Approx(-31250.0).epsilon(1e-9));

    CHECK_THROWS_AS(instantaneous_frequency(lin, -1e-6), std::domain_error);
    CHECK_THROWS_AS(instantaneous_frequency(lin, T + 1e-6), std::domain_error);
}

TEST_CASE("coefficient-mapping trajectory consistency") {
    // sum k_i t^i == bw * f(t*bw/2^sf) - bw/2 at 256 sample times.
    for (const auto& fam : builtin_families())
        for (int sf : {7, 10, 12})
            for (double bw : {125000.0, 250000.0, 500000.0}) {
                const ChirpProfile p(fam, sf, bw, 1);
                const double T = p.symbol_time();
                double worst = 0.0;
                for (int i = 0; i < 256; ++i) {
                    const double t = T * i / 256.0;
                    const double expect = bw * fam.eval(t / T) - bw / 2.0;
                    worst = std::max(worst,
                                     std::abs(instantaneous_frequency(p, t) - expect));
                }
                CHECK(worst < 1e-6 * bw);
            }
}

TEST_CASE("polynomial validation errors name the violated invariant") {
    ChirpPolynomial bad;
    bad.coeffs = {0.5, 0.5};
    CHECK_THROWS_WITH_AS(bad.validate(), "chirp polynomial: f(0) != 0",
                         std::invalid_argument);
    bad.coeffs = {0.0, 0.5};
    CHECK_THROWS_WITH_AS(bad.validate(), "chirp polynomial: f(1) != 1",
                         std::invalid_argument);
    bad.coeffs = {0.0, -2.0, 3.0}; // f = -2x + 3x^2: dips negative
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.coeffs = {0.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("synthesized symbols have unit magnitude") {
    for (const auto& fam : builtin_families()) {
        const ChirpProfile p(fam, 7, 125000.0, 2);
        const Waveform w = synth_symbol(p, 37);
        for (const cplx& s : w.samples) CHECK(std::abs(std::abs(s) - 1.0) < 1e-9);
    }
    const ChirpProfile p(builtin_family(kLinear), 7, 125000.0, 1);
    CHECK_THROWS_AS(synth_symbol(p, 128), std::domain_error);
}

TEST_CASE("symbol round trip against the direct DFT oracle") {
    // Exhaustive at sf=7 for two families; the library FFT never enters.
    for (int fam_id : {kLinear, kQuadratic1}) {
        const ChirpProfile p(builtin_family(fam_id), 7, 125000.0, 1);
        const Waveform down = base_downchirp(p);
        for (std::uint32_t s = 0; s < p.n_bins(); ++s) {
            const Waveform w = synth_symbol(p, s);
            const auto mags = oracle::dechirp_magnitudes(w.samples, down.samples, p.n_bins());
            CHECK(oracle::argmax(mags) == s);
        }
    }
}

TEST_CASE("base downchirp is the exact conjugate of the up-chirp") {
    const ChirpProfile p(builtin_family(kQuartic2), 8, 125000.0, 1);
    const Waveform up = synth_symbol(p, 0);
    const Waveform down = base_downchirp(p);
    REQUIRE(up.size() == down.size());
    for (std::size_t i = 0; i < up.size(); ++i)
        CHECK(std::conj(down.samples[i]) == up.samples[i]);
}

TEST_CASE("downchirp frequency sweeps +bw/2 -> -bw/2 (phase-difference oracle)") {
    const double bw = 125000.0;
    const ChirpProfile p(builtin_family(kLinear), 8, bw, 4);
    const Waveform down = base_downchirp(p);
    const double fs = p.sample_rate();
    // The phase step from sample i to i+1 reflects the frequency at the
    // midpoint of sample i+1, i.e. t = (i + 1.5)/fs.
    const double T = p.symbol_time();
    const std::size_t i_late = down.size() - 6;
    const double f_early = oracle::measure_frequency(down.samples, fs, 4);
    const double f_late = oracle::measure_frequency(down.samples, fs, i_late);
    const double e_early = bw / 2 - bw * ((4.0 + 1.5) / fs) / T;
    const double e_late = bw / 2 - bw * ((static_cast<double>(i_late) + 1.5) / fs) / T;
    CHECK(std::abs(f_early - e_early) < 1.0);
    CHECK(std::abs(f_late - e_late) < 1.0);
    CHECK(f_early > 0.98 * bw / 2);
    CHECK(f_late < -0.98 * bw / 2);
}

TEST_CASE("synthesized frequency tracks the wrapped instantaneous frequency") {
    const double bw = 125000.0;
    const ChirpProfile p(builtin_family(kQuadratic1), 8, bw, 4);
    const double fs = p.sample_rate();
    const std::uint32_t s = 100;
    const Waveform w = synth_symbol(p, s);
    const double f0 = static_cast<double>(s) * bw / static_cast<double>(p.n_bins());
    for (std::size_t i = 16; i + 16 < w.size(); i += 97) {
        // Midpoint sampling: the phase step from sample i to i+1 reflects
        // the frequency at t = (i+1.5)/fs. Compare modulo bw because the
        // band-wrap instant is quantized to the osr grid.
        const double t = (static_cast<double>(i) + 1.5) / fs;
        const double expect = f0 + instantaneous_frequency(p, t);
        double diff = std::fmod(oracle::measure_frequency(w.samples, fs, i) - expect, bw);
        if (diff >= bw / 2) diff -= bw;
        if (diff < -bw / 2) diff += bw;
        CHECK(std::abs(diff) < 1.0);
    }
}

TEST_CASE("residual-frequency law for a time-shifted quadratic1 chirp") {
    // Synthesize with an extra t_gap, dechirp against the unshifted base
    // down-chirp, and compare the measured product frequency against
    // f0 + k2*t_gap^2 + 2*k2*t_gap*t (measured modulo bw).
    const double bw = 125000.0;
    const ChirpProfile p(builtin_family(kQuadratic1), 9, bw, 1);
    const double fs = p.sample_rate();
    const double T = p.symbol_time();
    const double t_gap = 0.3 * T;
    const double f0 = 20.0 * p.bin_width();
    const double k2 = p.k[2];

    // Shifted chirp: frequency f0 + f_c(t + t_gap), wrapped.
    const std::size_t n = p.n_samples();
    std::vector<cplx> shifted(n);
    double phase = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double t = (static_cast<double>(m) + 0.5) / fs;
        const double tt = std::min(t + t_gap, T);
        double f = f0 + instantaneous_frequency(p, tt);
        while (f >= bw / 2) f -= bw;
        phase += 2.0 * std::numbers::pi * f / fs;
        shifted[m] = std::polar(1.0, phase);
    }
    const Waveform down = base_downchirp(p);
    std::vector<cplx> prod(n);
    for (std::size_t i = 0; i < n; ++i) prod[i] = shifted[i] * down.samples[i];

    int checked = 0;
    for (std::size_t i = 8; i + 8 < n; i += 13) {
        const double t = (static_cast<double>(i) + 1.5) / fs; // midpoint of sample i+1
        if (t + t_gap >= T) break; // shifted chirp has swept past the symbol end
        const double analytic = f0 + k2 * t_gap * t_gap + 2.0 * k2 * t_gap * t;
        double measured = oracle::measure_frequency(prod, fs, i);
        double diff = std::fmod(measured - analytic, bw);
        if (diff > bw / 2) diff -= bw;
        if (diff < -bw / 2) diff += bw;
        CHECK(std::abs(diff) < 1.0);
        ++checked;
    }
    CHECK(checked > 20);
}

TEST_CASE("sine families fit the unified space with small residual") {
    for (int id : {kSine1, kSine2}) {
        const ChirpPolynomial fam = builtin_family(id);
        CHECK_NOTHROW(fam.validate());
        CHECK(fam.order() <= kMaxPolyOrder);
    }
    // Residual check against the generating curves.
    auto residual = [](const ChirpPolynomial& fam, double lo, double hi) {
        const double y_lo = std::sin(lo), y_hi = std::sin(hi);
        double worst = 0.0;
        for (int i = 0; i <= 500; ++i) {
            const double x = i / 500.0;
            const double y = (std::sin(lo + (hi - lo) * x) - y_lo) / (y_hi - y_lo);
            worst = std::max(worst, std::abs(fam.eval(x) - y));
        }
        return worst;
    };
    const double pi = std::numbers::pi;
    CHECK(residual(builtin_family(kSine1), -pi / 2, pi / 2) < 1e-4);
    CHECK(residual(builtin_family(kSine2), -3 * pi / 8, 3 * pi / 8) < 1e-4);
}

TEST_CASE("family registry JSON round trip") {
    const std::string path = "registry_roundtrip.json";
    const auto families = builtin_families();
    save_family_registry(families, path);
    const auto loaded = load_family_registry(path);
    REQUIRE(loaded.size() == families.size());
    for (std::size_t i = 0; i < families.size(); ++i) {
        CHECK(loaded[i].family_id == families[i].family_id);
        CHECK(loaded[i].label == families[i].label);
        CHECK(loaded[i].coeffs == families[i].coeffs);
    }
    std::remove(path.c_str());
}
