#include "nlchirp/dds.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace nlchirp {

void DdsConfig::validate() const {
    if (table_bits < 1) throw std::invalid_argument("dds: table_bits must be >= 1");
    if (slope.empty()) throw std::invalid_argument("dds: empty slope schedule");
    for (auto k : slope)
        if (k < 0) throw std::invalid_argument("dds: slope entries must be >= 0");
}

namespace {

std::int64_t slope_at(const DdsConfig& cfg, std::size_t i) {
    return cfg.slope.size() == 1 ? cfg.slope[0] : cfg.slope[i];
}

void check_steps(const DdsConfig& cfg, std::size_t steps) {
    cfg.validate();
    if (cfg.slope.size() > 1 && steps > cfg.slope.size())
        throw std::invalid_argument("dds: steps exceed slope schedule length");
}

} // namespace

std::vector<std::int64_t> freq_index_sequence(const DdsConfig& cfg, std::size_t steps) {
    check_steps(cfg, steps);
    std::vector<std::int64_t> f(steps);
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < steps; ++i) {
        acc += slope_at(cfg, i);
        f[i] = acc;
    }
    return f;
}

std::vector<std::int64_t> phase_index_sequence(const DdsConfig& cfg, std::size_t steps) {
    std::vector<std::int64_t> f = freq_index_sequence(cfg, steps);
    std::int64_t acc = 0;
    for (auto& v : f) {
        acc += v;
        v = acc;
    }
    return f;
}

double index_to_hz(const DdsConfig& cfg, std::int64_t index) {
    return static_cast<double>(index) * cfg.f_clk / std::exp2(cfg.table_bits);
}

Waveform synth_via_dds(const ChirpProfile& profile, const DdsConfig& cfg) {
    cfg.validate();
    if (cfg.table_bits < profile.sf)
        throw std::invalid_argument("dds: table resolution below spreading factor");

    const std::size_t n = profile.n_samples();
    const double fs = profile.sample_rate();
    const double table = std::exp2(cfg.table_bits);
    const std::int64_t table_len = std::int64_t{1} << cfg.table_bits;

    Waveform wave;
    wave.sample_rate = fs;
    wave.samples.resize(n);
    std::int64_t phase_acc = 0;
    for (std::size_t m = 0; m < n; ++m) {
        const double t = (static_cast<double>(m) + 0.5) / fs;
        double f = instantaneous_frequency(profile, t);
        while (f >= profile.bw / 2.0) f -= profile.bw;
        // Nearest-integer table step for this sample's frequency.
        const auto step = static_cast<std::int64_t>(std::llround(f / fs * table));
        phase_acc += step;
        const std::int64_t idx = ((phase_acc % table_len) + table_len) % table_len;
        wave.samples[m] =
            std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(idx) / table);
    }
    return wave;
}

void dump_index_csv(const DdsConfig& cfg, std::size_t steps, const std::string& path) {
    std::vector<std::int64_t> f = freq_index_sequence(cfg, steps);
    std::vector<std::int64_t> p = phase_index_sequence(cfg, steps);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "step,freq_index,phase_index\n";
    for (std::size_t i = 0; i < steps; ++i)
        out << (i + 1) << ',' << f[i] << ',' << p[i] << '\n';
}

} // namespace nlchirp
