#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "nlchirp/channel.hpp"
#include "nlchirp/chirp.hpp"
#include "nlchirp/rng.hpp"

using namespace nlchirp;

namespace {

Waveform test_frame(std::uint64_t seed, std::size_t len = 2048) {
    Rng rng(seed);
    Waveform w;
    w.sample_rate = 125000.0;
    w.samples.resize(len);
    for (auto& s : w.samples) s = std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
    return w;
}

} // namespace

TEST_CASE("single path superposition is the padded frame") {
    Scene scene;
    scene.paths.push_back({0, 0.0, 0.0, test_frame(1)});
    scene.duration = 3000;
    const Waveform out = superpose(scene);
    REQUIRE(out.size() == 3000);
    for (std::size_t i = 0; i < 2048; ++i)
        CHECK(out.samples[i] == scene.paths[0].frame.samples[i]);
    for (std::size_t i = 2048; i < 3000; ++i) CHECK(out.samples[i] == cplx{0.0, 0.0});
}

TEST_CASE("-6 dB path scales by 0.5012 amplitude") {
    Scene scene;
    scene.paths.push_back({0, 0.0, 0.0, test_frame(2)});
    scene.paths.push_back({0, -6.0, 0.0, test_frame(2)});
    scene.duration = 2048;
    const Waveform out = superpose(scene);
    const double amp = std::pow(10.0, -6.0 / 20.0);
    CHECK(amp == doctest::Approx(0.5012).epsilon(1e-4));
    for (std::size_t i = 0; i < 100; ++i)
        CHECK(std::abs(out.samples[i] - (1.0 + amp) * scene.paths[0].frame.samples[i]) <
              1e-12);
}

TEST_CASE("CFO rotates each sample by e^{j2pi f n/fs}") {
    const double f = 731.0;
    Scene scene;
    scene.paths.push_back({100, 0.0, f, test_frame(3, 512)});
    scene.duration = 700;
    const Waveform out = superpose(scene);
    const double fs = out.sample_rate;
    for (std::size_t i = 0; i < 512; ++i) {
        const std::size_t n = 100 + i;
        const cplx expect = scene.paths[0].frame.samples[i] *
                            std::polar(1.0, 2.0 * std::numbers::pi * f *
                                                static_cast<double>(n) / fs);
        CHECK(std::abs(out.samples[n] - expect) < 1e-9);
    }
}

TEST_CASE("superposition linearity") {
    Scene a, b, both;
    a.paths.push_back({0, -1.0, 100.0, test_frame(4)});
    b.paths.push_back({500, -3.0, -250.0, test_frame(5)});
    both.paths = {a.paths[0], b.paths[0]};
    a.duration = b.duration = both.duration = 4000;
    const Waveform wa = superpose(a), wb = superpose(b), wab = superpose(both);
    for (std::size_t i = 0; i < 4000; ++i)
        CHECK(std::abs(wab.samples[i] - (wa.samples[i] + wb.samples[i])) < 1e-9);
}

TEST_CASE("scene validation") {
    Scene bad;
    bad.paths.push_back({0, 0.0, 0.0, test_frame(6)});
    bad.duration = 100; // shorter than the frame
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.duration = 2048;
    bad.target_index = 5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("awgn: infinity leaves the signal unchanged") {
    const Waveform w = test_frame(7);
    const Waveform out = awgn(w, kNoNoise, 99);
    CHECK(out.samples == w.samples);
}

TEST_CASE("awgn: 0 dB noise power within 0.1 dB over 1e5 samples") {
    Waveform w;
    w.sample_rate = 125000.0;
    w.samples.assign(100000, cplx{0.0, 0.0});
    const Waveform out = awgn(w, 0.0, 1234);
    double power = 0.0;
    for (const auto& s : out.samples) power += std::norm(s);
    power /= static_cast<double>(out.size());
    CHECK(std::abs(10.0 * std::log10(power)) < 0.1);
}

TEST_CASE("awgn: same seed is bit-identical") {
    const Waveform w = test_frame(8);
    const Waveform a = awgn(w, 5.0, 42);
    const Waveform b = awgn(w, 5.0, 42);
    CHECK(a.samples == b.samples);
    const Waveform c = awgn(w, 5.0, 43);
    CHECK(a.samples != c.samples);
}

TEST_CASE("make_collision gain and offset arithmetic") {
    const Waveform target = test_frame(9, 1024);
    const Waveform interferer = test_frame(10, 1024);
    const Scene scene = make_collision(target, {interferer}, {-10.0}, {0.25}, 256,
                                       kNoNoise, 7);
    REQUIRE(scene.paths.size() == 2);
    CHECK(scene.paths[0].gain_db == 0.0);
    CHECK(scene.paths[1].gain_db == 10.0); // SIR -10 dB -> interferer +10 dB
    CHECK(scene.paths[1].start_offset == 64);
    CHECK(std::pow(10.0, scene.paths[1].gain_db / 20.0) ==
          doctest::Approx(3.1623).epsilon(1e-4));

    CHECK_THROWS_AS(make_collision(target, {interferer}, {-10.0, 0.0}, {0.25}, 256,
                                   kNoNoise, 7),
                    std::invalid_argument);
}

TEST_CASE("SIR calibration: rendered power ratio matches request") {
    const Waveform target = test_frame(11, 8192);
    const Waveform interferer = test_frame(12, 8192);
    for (double sir : {-10.0, -3.0, 6.0}) {
        const Scene scene = make_collision(target, {interferer}, {sir}, {0.0}, 256,
                                           kNoNoise, 7);
        Scene t_only = scene, i_only = scene;
        t_only.paths = {scene.paths[0]};
        i_only.paths = {scene.paths[1]};
        const Waveform wt = superpose(t_only), wi = superpose(i_only);
        CHECK(std::abs(10.0 * std::log10(wt.energy() / wi.energy()) - sir) < 0.1);
    }
}

TEST_CASE("IQ round trip is bit-identical") {
    const std::string path = "iq_roundtrip.cf32";
    Rng rng(77);
    Waveform w;
    w.sample_rate = 125000.0;
    w.samples.resize(1024);
    for (auto& s : w.samples)
        s = cplx{static_cast<float>(rng.normal()), static_cast<float>(rng.normal())};
    save_iq(w, path);
    const Waveform r = load_iq(path, w.sample_rate);
    CHECK(r.samples == w.samples);
    std::remove(path.c_str());
}

TEST_CASE("IQ byte-level format") {
    const std::string path = "iq_format.cf32";
    // Hand-constructed 8 bytes: I = 1.0f, Q = -2.0f (little-endian).
    {
        std::ofstream out(path, std::ios::binary);
        const unsigned char bytes[8] = {0x00, 0x00, 0x80, 0x3F, 0x00, 0x00, 0x00, 0xC0};
        out.write(reinterpret_cast<const char*>(bytes), 8);
    }
    const Waveform w = load_iq(path);
    REQUIRE(w.size() == 1);
    CHECK(w.samples[0] == cplx{1.0, -2.0});
    std::remove(path.c_str());
}

TEST_CASE("IQ edge cases: empty and truncated files") {
    const std::string path = "iq_edge.cf32";
    {
        std::ofstream out(path, std::ios::binary);
    }
    CHECK(load_iq(path).size() == 0);
    {
        std::ofstream out(path, std::ios::binary);
        const char junk[4] = {0, 0, 0, 0}; // one float, odd count
        out.write(junk, 4);
    }
    CHECK_THROWS_AS(load_iq(path), std::runtime_error);
    std::remove(path.c_str());
}
