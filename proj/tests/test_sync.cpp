#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <span>

#include "nlchirp/channel.hpp"
#include "nlchirp/chirp.hpp"
#include "nlchirp/framing.hpp"
#include "nlchirp/modem.hpp"
#include "nlchirp/rng.hpp"
#include "nlchirp/sync.hpp"

using namespace nlchirp;

namespace {

const int kSf = 8;
const double kBw = 125000.0;

ProfileSet make_profiles(int osr = 1) {
    return ProfileSet(builtin_families(), kSf, kBw, osr);
}

Waveform frame_at(const ProfileSet& profiles, std::int64_t offset, double snr_db,
                  std::uint64_t seed, double cfo_hz = 0.0, std::size_t payload_len = 8) {
    Rng rng(seed);
    std::vector<std::uint32_t> payload(payload_len);
    for (auto& s : payload)
        s = static_cast<std::uint32_t>(rng.uniform_int(std::size_t{1} << kSf));
    FrameSpec spec{kQuadratic1, payload_len};
    Scene scene;
    scene.paths.push_back({offset, 0.0, cfo_hz, build_frame(profiles, spec, payload)});
    scene.duration = offset + static_cast<std::int64_t>(scene.paths[0].frame.size()) +
                     static_cast<std::int64_t>(profiles.linear().n_samples());
    scene.snr_db = snr_db;
    scene.seed = seed ^ 0x9E3779B97F4A7C15ull;
    return render(scene);
}

} // namespace

TEST_CASE("clean frame at offset 0 is detected at 0") {
    const ProfileSet profiles = make_profiles();
    const Waveform stream = frame_at(profiles, 0, kNoNoise, 1);
    const auto candidates = detect_preamble(stream, profiles.linear());
    REQUIRE(!candidates.empty());
    CHECK(candidates.front().start_offset == 0);
}

TEST_CASE("frame injected at 12345 samples, SNR 0 dB") {
    const ProfileSet profiles = make_profiles();
    const Waveform stream = frame_at(profiles, 12345, 0.0, 2);
    const auto candidates = detect_preamble(stream, profiles.linear());
    REQUIRE(!candidates.empty());
    bool found = false;
    for (const auto& c : candidates)
        if (std::llabs(c.start_offset - 12345) <= profiles.linear().osr) found = true;
    CHECK(found);
}

TEST_CASE("pure noise: false-alarm rate under 1%") {
    const ProfileSet profiles = make_profiles();
    const std::size_t n = profiles.linear().n_samples();
    int alarms = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        Rng rng(1000 + static_cast<std::uint64_t>(t));
        Waveform noise;
        noise.sample_rate = profiles.linear().sample_rate();
        noise.samples.resize(12 * n);
        for (auto& s : noise.samples) s = rng.complex_normal(1.0);
        if (!detect_preamble(noise, profiles.linear()).empty()) ++alarms;
    }
    CHECK(alarms < trials / 100);
}

TEST_CASE("pilot estimation at zero injected offsets") {
    const ProfileSet profiles = make_profiles();
    const ChirpProfile& lin = profiles.linear();
    const std::size_t n = lin.n_samples();
    const Waveform stream = frame_at(profiles, 0, kNoNoise, 3);
    std::span<const cplx> up(stream.samples.data() + 7 * n, n);
    std::span<const cplx> down(stream.samples.data() + 10 * n, n);
    const SyncEstimate est = estimate_sto_cfo(up, down, lin);
    CHECK(std::abs(est.sto_samples) < 0.1 * lin.osr);
    CHECK(std::abs(est.cfo_hz) < 0.1 * lin.bin_width());
    CHECK(!est.low_confidence);
}

TEST_CASE("pilot estimation recovers injected STO") {
    const int osr = 4;
    const ProfileSet profiles = make_profiles(osr);
    const ChirpProfile& lin = profiles.linear();
    const std::size_t n = lin.n_samples();
    const std::int64_t sto = 5 * osr;
    const std::int64_t pad = static_cast<std::int64_t>(n);
    const Waveform stream = frame_at(profiles, pad + sto, kNoNoise, 4);
    std::span<const cplx> up(stream.samples.data() + pad + 7 * static_cast<std::int64_t>(n), n);
    std::span<const cplx> down(stream.samples.data() + pad + 10 * static_cast<std::int64_t>(n), n);
    const SyncEstimate est = estimate_sto_cfo(up, down, lin);
    CHECK(std::abs(est.sto_samples - static_cast<double>(sto)) <= 0.5);
    CHECK(std::abs(est.cfo_hz) <= 0.1 * lin.bin_width());
}

TEST_CASE("pilot estimation recovers injected CFO") {
    const ProfileSet profiles = make_profiles();
    const ChirpProfile& lin = profiles.linear();
    const std::size_t n = lin.n_samples();
    const double cfo = 0.25 * lin.bin_width();
    const Waveform stream = frame_at(profiles, 0, kNoNoise, 5, cfo);
    std::span<const cplx> up(stream.samples.data() + 7 * n, n);
    std::span<const cplx> down(stream.samples.data() + 10 * n, n);
    const SyncEstimate est = estimate_sto_cfo(up, down, lin);
    CHECK(std::abs(est.cfo_hz - cfo) <= 0.05 * lin.bin_width());
    CHECK(std::abs(est.sto_samples) <= 0.5);
}

TEST_CASE("identity correction returns the input exactly") {
    const ProfileSet profiles = make_profiles();
    const Waveform stream = frame_at(profiles, 0, 10.0, 6);
    SyncEstimate zero;
    const Waveform out = correct(stream, zero);
    CHECK(out.samples == stream.samples);

    SyncEstimate too_far;
    too_far.sto_samples = static_cast<double>(stream.size());
    CHECK_THROWS_AS(correct(stream, too_far), std::invalid_argument);
}

TEST_CASE("correction idempotence: second-pass estimate near zero") {
    const int osr = 4;
    const ProfileSet profiles = make_profiles(osr);
    const ChirpProfile& lin = profiles.linear();
    const std::size_t n = lin.n_samples();
    const std::int64_t pad = static_cast<std::int64_t>(n);
    const Waveform stream = frame_at(profiles, pad + 7, 10.0, 7, 0.6 * lin.bin_width());

    Waveform segment;
    segment.sample_rate = stream.sample_rate;
    segment.samples.assign(stream.samples.begin() + pad, stream.samples.end());
    auto window = [&segment, n](std::size_t k) {
        return std::span<const cplx>(segment.samples.data() + k * n, n);
    };
    const SyncEstimate first = estimate_sto_cfo(window(7), window(10), lin);
    segment = correct(segment, first);
    const SyncEstimate second = estimate_sto_cfo(window(7), window(10), lin);
    CHECK(std::abs(second.sto_samples) / lin.osr <= 0.2);
    CHECK(std::abs(second.cfo_hz) / lin.bin_width() <= 0.2);
}

TEST_CASE("uncorrected STO hurts non-linear symbols, merely shifts linear ones") {
    const ChirpProfile q1(builtin_family(kQuadratic1), kSf, kBw, 1);
    const ChirpProfile lin(builtin_family(kLinear), kSf, kBw, 1);
    const std::size_t n = q1.n_samples();
    const std::size_t sto = 8; // samples

    const Waveform wq = synth_symbol(q1, 0);
    const double aligned = scatter_ratio(dechirp(wq.samples, q1));
    std::vector<cplx> late(n);
    for (std::size_t i = 0; i < n; ++i) late[i] = wq.samples[(i + n - sto) % n];
    const double shifted = scatter_ratio(dechirp(late, q1));
    CHECK(shifted <= 0.5 * aligned);

    const Waveform wl = synth_symbol(lin, 0);
    std::vector<cplx> late_l(n);
    for (std::size_t i = 0; i < n; ++i) late_l[i] = wl.samples[(i + n - sto) % n];
    const std::uint32_t bin = decide_symbol(dechirp(late_l, lin));
    const double peak = scatter_ratio(dechirp(late_l, lin));
    CHECK(bin != 0);       // argmax shifted...
    CHECK(peak > 0.5);     // ...but the energy stays concentrated
}

TEST_CASE("correction restores payload SER to the undistorted level") {
    const int osr = 4;
    const ProfileSet profiles = make_profiles(osr);
    const std::size_t payload_len = 16;
    int errors_clean = 0, errors_corr = 0, total = 0;
    for (std::uint64_t t = 0; t < 30; ++t) {
        Rng rng(500 + t);
        std::vector<std::uint32_t> payload(payload_len);
        for (auto& s : payload)
            s = static_cast<std::uint32_t>(rng.uniform_int(std::size_t{1} << kSf));
        FrameSpec spec{kQuadratic1, payload_len};
        const Waveform frame = build_frame(profiles, spec, payload);

        auto run = [&](std::int64_t sto, double cfo) {
            Scene scene;
            scene.paths.push_back({sto, 0.0, cfo, frame});
            scene.duration = sto + static_cast<std::int64_t>(frame.size()) + 64;
            scene.snr_db = 0.0;
            scene.seed = 900 + t;
            const Waveform stream = render(scene);
            const DecodedPacket pkt = parse_frame(stream, profiles);
            int errs = 0;
            for (std::size_t i = 0; i < payload_len; ++i)
                if (pkt.symbols.size() != payload_len || pkt.symbols[i] != payload[i])
                    ++errs;
            return errs;
        };
        errors_clean += run(0, 0.0);
        errors_corr += run(11, 0.4 * profiles.linear().bin_width());
        total += static_cast<int>(payload_len);
    }
    const double delta = std::abs(errors_corr - errors_clean) / static_cast<double>(total);
    CHECK(delta <= 0.005 + 1e-12);
}
