#include "nlchirp/channel.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "nlchirp/rng.hpp"

namespace nlchirp {

void Scene::validate() const {
    if (paths.empty()) throw std::invalid_argument("scene: no paths");
    if (target_index >= paths.size())
        throw std::invalid_argument("scene: target_index out of range");
    for (const auto& p : paths) {
        if (p.start_offset < 0) throw std::invalid_argument("scene: negative start offset");
        if (p.start_offset + static_cast<std::int64_t>(p.frame.size()) > duration)
            throw std::invalid_argument("scene: path overruns scene duration");
    }
}

Waveform superpose(const Scene& scene) {
    scene.validate();
    Waveform out;
    out.sample_rate = scene.paths.front().frame.sample_rate;
    out.samples.assign(static_cast<std::size_t>(scene.duration), cplx{0.0, 0.0});
    for (const auto& path : scene.paths) {
        const double amp = std::pow(10.0, path.gain_db / 20.0);
        const double w = 2.0 * std::numbers::pi * path.cfo_hz / path.frame.sample_rate;
        for (std::size_t n = 0; n < path.frame.size(); ++n) {
            const auto pos = static_cast<std::size_t>(path.start_offset) + n;
            const double abs_n = static_cast<double>(path.start_offset) + static_cast<double>(n);
            out.samples[pos] += amp * path.frame.samples[n] * std::polar(1.0, w * abs_n);
        }
    }
    return out;
}

Waveform awgn(const Waveform& wave, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db)) return wave;
    Waveform out = wave;
    Rng rng(seed);
    const double variance = std::pow(10.0, -snr_db / 10.0);
    for (auto& s : out.samples) s += rng.complex_normal(variance);
    return out;
}

Waveform render(const Scene& scene) {
    return awgn(superpose(scene), scene.snr_db, scene.seed);
}

Scene make_collision(const Waveform& target_frame,
                     const std::vector<Waveform>& interferer_frames,
                     const std::vector<double>& sir_db,
                     const std::vector<double>& t_gap_fractions,
                     std::size_t symbol_samples, double snr_db,
                     std::uint64_t seed) {
    if (interferer_frames.size() != sir_db.size() ||
        interferer_frames.size() != t_gap_fractions.size())
        throw std::invalid_argument("make_collision: inconsistent list lengths");
    for (double g : t_gap_fractions)
        if (g < 0.0 || g >= 1.0)
            throw std::invalid_argument("make_collision: t_gap fraction outside [0,1)");

    Scene scene;
    scene.snr_db = snr_db;
    scene.seed = seed;
    scene.target_index = 0;
    scene.paths.push_back({0, 0.0, 0.0, target_frame});
    std::int64_t end = static_cast<std::int64_t>(target_frame.size());
    for (std::size_t i = 0; i < interferer_frames.size(); ++i) {
        const auto offset = static_cast<std::int64_t>(
            std::llround(t_gap_fractions[i] * static_cast<double>(symbol_samples)));
        scene.paths.push_back({offset, -sir_db[i], 0.0, interferer_frames[i]});
        end = std::max(end, offset + static_cast<std::int64_t>(interferer_frames[i].size()));
    }
    scene.duration = end;
    return scene;
}

void save_iq(const Waveform& wave, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    static_assert(std::endian::native == std::endian::little,
                  "cf32 writer assumes a little-endian host");
    std::vector<float> buf(wave.size() * 2);
    for (std::size_t i = 0; i < wave.size(); ++i) {
        buf[2 * i] = static_cast<float>(wave.samples[i].real());
        buf[2 * i + 1] = static_cast<float>(wave.samples[i].imag());
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

Waveform load_iq(const std::string& path, double sample_rate) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open " + path);
    const std::streamsize bytes = in.tellg();
    if (bytes % 8 != 0)
        throw std::runtime_error("iq file truncated or odd float count: " + path);
    in.seekg(0);
    std::vector<float> buf(static_cast<std::size_t>(bytes) / sizeof(float));
    in.read(reinterpret_cast<char*>(buf.data()), bytes);
    if (!in) throw std::runtime_error("short read on " + path);
    Waveform wave;
    wave.sample_rate = sample_rate;
    wave.samples.resize(buf.size() / 2);
    for (std::size_t i = 0; i < wave.samples.size(); ++i)
        wave.samples[i] = {static_cast<double>(buf[2 * i]), static_cast<double>(buf[2 * i + 1])};
    return wave;
}

} // namespace nlchirp
