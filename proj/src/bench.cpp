#include "nlchirp/bench.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <thread>

#include "nlchirp/channel.hpp"
#include "nlchirp/collision.hpp"
#include "nlchirp/dds.hpp"
#include "nlchirp/framing.hpp"
#include "nlchirp/modem.hpp"
#include "nlchirp/rng.hpp"
#include "nlchirp/sync.hpp"

namespace nlchirp {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double compute_ser(const std::vector<std::uint32_t>& truth,
                   const std::vector<std::uint32_t>& decoded) {
    if (truth.size() != decoded.size())
        throw std::invalid_argument("compute_ser: length mismatch");
    if (truth.empty()) return 0.0;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] != decoded[i]) ++errors;
    return static_cast<double>(errors) / static_cast<double>(truth.size());
}

double compute_pdr(const std::vector<double>& per_packet_ser) {
    if (per_packet_ser.empty()) throw std::invalid_argument("compute_pdr: empty list");
    std::size_t delivered = 0;
    for (double ser : per_packet_ser)
        if (ser <= 0.20) ++delivered;
    return static_cast<double>(delivered) / static_cast<double>(per_packet_ser.size());
}

double compute_throughput(std::size_t decoded_symbol_count, double duration_seconds) {
    if (duration_seconds <= 0.0)
        throw std::invalid_argument("compute_throughput: non-positive duration");
    return static_cast<double>(decoded_symbol_count) / duration_seconds;
}

// ---------------------------------------------------------------------------
// Config plumbing
// ---------------------------------------------------------------------------

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::SerVsSnr: return "ser_vs_snr";
        case ExperimentKind::SerVsSir: return "ser_vs_sir";
        case ExperimentKind::SerVsOffset: return "ser_vs_offset";
        case ExperimentKind::AlignedCollision: return "aligned_collision";
        case ExperimentKind::Concurrency: return "concurrency";
        case ExperimentKind::SyncSweep: return "sync_sweep";
        case ExperimentKind::DdsCheck: return "dds_check";
    }
    throw std::invalid_argument("unknown experiment kind");
}

ExperimentKind kind_from_name(const std::string& name) {
    for (ExperimentKind k :
         {ExperimentKind::SerVsSnr, ExperimentKind::SerVsSir, ExperimentKind::SerVsOffset,
          ExperimentKind::AlignedCollision, ExperimentKind::Concurrency,
          ExperimentKind::SyncSweep, ExperimentKind::DdsCheck})
        if (kind_name(k) == name) return k;
    throw std::invalid_argument("unknown experiment kind: " + name);
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (families.empty()) throw std::invalid_argument("config: empty family list");
    if (sf_list.empty()) throw std::invalid_argument("config: empty sf list");
    const bool needs_grid = kind == ExperimentKind::SerVsSnr ||
                            kind == ExperimentKind::SerVsSir ||
                            kind == ExperimentKind::SerVsOffset;
    if (needs_grid && grid.empty()) throw std::invalid_argument("config: empty sweep grid");
    if (kind == ExperimentKind::Concurrency && n_tx_grid.empty())
        throw std::invalid_argument("config: empty n_tx grid");
    if (kind == ExperimentKind::AlignedCollision && families.size() < 2)
        throw std::invalid_argument("config: aligned_collision needs two families");
}

namespace {

const ChirpPolynomial& poly_of(const ExperimentConfig& cfg, int family_id) {
    for (const auto& f : cfg.registry)
        if (f.family_id == family_id) return f;
    throw std::invalid_argument("family id not in registry: " + std::to_string(family_id));
}

ResultRow blank_row(const ExperimentConfig& cfg, int sf) {
    ResultRow row;
    row.kind = kind_name(cfg.kind);
    row.sf = sf;
    row.bw = cfg.bw;
    row.snr_db = kNaN;
    row.sir_db = kNaN;
    row.t_gap = kNaN;
    row.n_tx = 0;
    row.ser = kNaN;
    row.pdr = kNaN;
    row.throughput = kNaN;
    row.trials = cfg.trials;
    return row;
}

void add_noise(std::vector<cplx>& samples, double snr_db, Rng& rng) {
    if (std::isinf(snr_db)) return;
    const double variance = std::pow(10.0, -snr_db / 10.0);
    for (auto& s : samples) s += rng.complex_normal(variance);
}

// ---------------------------------------------------------------------------
// Point runners
// ---------------------------------------------------------------------------

ResultRow run_ser_vs_snr_point(const ExperimentConfig& cfg, int sf, int family,
                               double snr_db, std::uint64_t seed) {
    const ChirpProfile profile(poly_of(cfg, family), sf, cfg.bw, cfg.osr);
    Rng rng(seed);
    std::size_t errors = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const auto s = static_cast<std::uint32_t>(rng.uniform_int(profile.n_bins()));
        Waveform wave = synth_symbol(profile, s);
        add_noise(wave.samples, snr_db, rng);
        if (decide_symbol(dechirp(wave.samples, profile)) != s) ++errors;
    }
    ResultRow row = blank_row(cfg, sf);
    row.family = poly_of(cfg, family).label;
    row.snr_db = snr_db;
    row.ser = static_cast<double>(errors) / static_cast<double>(cfg.trials);
    row.seed = seed;
    return row;
}

// One oracle-aligned target symbol colliding with a same-family interferer
// stream offset by t_gap of a symbol: the window sees the tail of one
// interferer symbol and the head of the next.
ResultRow run_near_far_point(const ExperimentConfig& cfg, int sf, int family, double sir_db,
                             double t_gap, double snr_db, std::uint64_t seed) {
    const ChirpProfile profile(poly_of(cfg, family), sf, cfg.bw, cfg.osr);
    const std::size_t n = profile.n_samples();
    const auto head = static_cast<std::size_t>(
        std::llround(t_gap * static_cast<double>(n)));
    const double amp = std::pow(10.0, -sir_db / 20.0);
    Rng rng(seed);
    std::size_t errors = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const auto s = static_cast<std::uint32_t>(rng.uniform_int(profile.n_bins()));
        const auto b0 = static_cast<std::uint32_t>(rng.uniform_int(profile.n_bins()));
        const auto b1 = static_cast<std::uint32_t>(rng.uniform_int(profile.n_bins()));
        Waveform window = synth_symbol(profile, s);
        const Waveform w0 = synth_symbol(profile, b0);
        const Waveform w1 = synth_symbol(profile, b1);
        for (std::size_t i = 0; i < head; ++i)
            window.samples[i] += amp * w0.samples[n - head + i];
        for (std::size_t i = head; i < n; ++i)
            window.samples[i] += amp * w1.samples[i - head];
        add_noise(window.samples, snr_db, rng);
        if (decide_symbol(dechirp(window.samples, profile)) != s) ++errors;
    }
    ResultRow row = blank_row(cfg, sf);
    row.family = poly_of(cfg, family).label;
    row.snr_db = snr_db;
    row.sir_db = sir_db;
    row.t_gap = t_gap;
    row.ser = static_cast<double>(errors) / static_cast<double>(cfg.trials);
    row.seed = seed;
    return row;
}

ResultRow run_aligned_collision_point(const ExperimentConfig& cfg, int sf,
                                      std::uint64_t seed) {
    const int fam_a = cfg.families[0];
    const int fam_b = cfg.families[1];
    const ProfileSet profiles({poly_of(cfg, fam_a), poly_of(cfg, fam_b)}, sf, cfg.bw,
                              cfg.osr);
    Rng rng(seed);
    std::vector<double> per_packet_ser;
    std::size_t correct_symbols = 0;
    double total_seconds = 0.0;

    for (std::size_t t = 0; t < cfg.trials; ++t) {
        std::vector<std::uint32_t> payload_a(cfg.payload_len), payload_b(cfg.payload_len);
        for (auto& s : payload_a)
            s = static_cast<std::uint32_t>(rng.uniform_int(std::size_t{1} << sf));
        for (auto& s : payload_b)
            s = static_cast<std::uint32_t>(rng.uniform_int(std::size_t{1} << sf));
        FrameSpec spec_a{fam_a, cfg.payload_len};
        FrameSpec spec_b{fam_b, cfg.payload_len};
        Scene scene;
        scene.paths.push_back({0, 0.0, 0.0, build_frame(profiles, spec_a, payload_a)});
        scene.paths.push_back({0, 0.0, 0.0, build_frame(profiles, spec_b, payload_b)});
        scene.duration = static_cast<std::int64_t>(scene.paths[0].frame.size());
        scene.snr_db = cfg.snr_db;
        scene.seed = rng.next_u64();
        const Waveform stream = render(scene);
        total_seconds += static_cast<double>(scene.duration) / stream.sample_rate;

        const std::vector<DecodedPacket> decoded = decode_all(stream, profiles);
        for (const auto& [fam, truth] :
             {std::pair{fam_a, &payload_a}, std::pair{fam_b, &payload_b}}) {
            double ser = 1.0;
            for (const auto& pkt : decoded) {
                if (pkt.family != fam || pkt.symbols.size() != truth->size()) continue;
                ser = compute_ser(*truth, pkt.symbols);
                correct_symbols += static_cast<std::size_t>(
                    std::llround((1.0 - ser) * static_cast<double>(truth->size())));
                break;
            }
            per_packet_ser.push_back(ser);
        }
    }

    ResultRow row = blank_row(cfg, sf);
    row.family = poly_of(cfg, fam_a).label + "+" + poly_of(cfg, fam_b).label;
    row.snr_db = cfg.snr_db;
    row.t_gap = 0.0;
    row.n_tx = 2;
    double sum = 0.0;
    for (double s : per_packet_ser) sum += s;
    row.ser = sum / static_cast<double>(per_packet_ser.size());
    row.pdr = compute_pdr(per_packet_ser);
    row.throughput = compute_throughput(correct_symbols, total_seconds);
    row.seed = seed;
    return row;
}

ResultRow run_concurrency_point(const ExperimentConfig& cfg, int sf, int n_tx,
                                const std::vector<int>& system_families,
                                const std::string& system_label, std::uint64_t seed) {
    std::vector<ChirpPolynomial> polys;
    for (int f : system_families) polys.push_back(poly_of(cfg, f));
    const ProfileSet profiles(polys, sf, cfg.bw, cfg.osr);
    const std::size_t n = profiles.linear().n_samples();
    const auto frame_len =
        static_cast<std::int64_t>(FrameSpec::frame_samples(n, cfg.payload_len));
    const std::int64_t duration = frame_len * 5 / 2;
    const std::int64_t slot = (duration - frame_len) / n_tx;

    Rng rng(seed);
    std::vector<double> per_packet_ser;
    std::size_t correct_symbols = 0;
    double total_seconds = 0.0;
    const std::size_t n_scenes =
        (cfg.trials + static_cast<std::size_t>(n_tx) - 1) / static_cast<std::size_t>(n_tx);

    for (std::size_t sc = 0; sc < n_scenes; ++sc) {
        Scene scene;
        scene.duration = duration;
        scene.snr_db = cfg.snr_db;
        scene.seed = rng.next_u64();
        std::vector<std::vector<std::uint32_t>> payloads(static_cast<std::size_t>(n_tx));
        std::vector<int> fams(static_cast<std::size_t>(n_tx));
        for (int i = 0; i < n_tx; ++i) {
            auto& payload = payloads[static_cast<std::size_t>(i)];
            payload.resize(cfg.payload_len);
            for (auto& s : payload)
                s = static_cast<std::uint32_t>(rng.uniform_int(std::size_t{1} << sf));
            const int fam = system_families[static_cast<std::size_t>(i) %
                                            system_families.size()];
            fams[static_cast<std::size_t>(i)] = fam;
            FrameSpec spec{fam, cfg.payload_len};
            ChannelPath path;
            path.frame = build_frame(profiles, spec, payload);
            // Stagger packet starts across the scene; the fractional part of
            // each start follows the 0.2..0.8 symbol-offset emulation rule.
            path.start_offset =
                i * slot + static_cast<std::int64_t>(std::llround(
                               rng.uniform(0.2, 0.8) * static_cast<double>(n)));
            path.gain_db = -rng.uniform(0.0, 5.0);
            scene.paths.push_back(std::move(path));
        }
        const Waveform stream = render(scene);
        total_seconds += static_cast<double>(duration) / stream.sample_rate;

        const std::vector<DecodedPacket> decoded = decode_all(stream, profiles);
        for (int i = 0; i < n_tx; ++i) {
            const auto& truth = payloads[static_cast<std::size_t>(i)];
            double ser = 1.0;
            for (const auto& pkt : decoded) {
                if (pkt.family != fams[static_cast<std::size_t>(i)]) continue;
                if (std::llabs(pkt.start_offset -
                               scene.paths[static_cast<std::size_t>(i)].start_offset) >
                    static_cast<std::int64_t>(n / 2))
                    continue;
                if (pkt.symbols.size() != truth.size()) continue;
                ser = compute_ser(truth, pkt.symbols);
                correct_symbols += static_cast<std::size_t>(
                    std::llround((1.0 - ser) * static_cast<double>(truth.size())));
                break;
            }
            per_packet_ser.push_back(ser);
        }
    }

    ResultRow row = blank_row(cfg, sf);
    row.family = system_label;
    row.snr_db = cfg.snr_db;
    row.n_tx = n_tx;
    double sum = 0.0;
    for (double s : per_packet_ser) sum += s;
    row.ser = sum / static_cast<double>(per_packet_ser.size());
    row.pdr = compute_pdr(per_packet_ser);
    row.throughput = compute_throughput(correct_symbols, total_seconds);
    row.trials = per_packet_ser.size();
    row.seed = seed;
    return row;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Injects (sto, cfo) pairs from a +-8 sample x +-2 bin grid and reports the
// median absolute estimation errors: sto error (samples) in the ser column,
// cfo error (bins) in the pdr column.
ResultRow run_sync_sweep_point(const ExperimentConfig& cfg, int sf, std::uint64_t seed) {
    const int family = cfg.families.front();
    const ProfileSet profiles({builtin_family(kLinear), poly_of(cfg, family)}, sf, cfg.bw,
                              cfg.osr);
    const ChirpProfile& linear = profiles.linear();
    const std::size_t n = linear.n_samples();
    const std::size_t payload_len = 4;
    Rng rng(seed);

    std::vector<double> sto_errors, cfo_errors;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const auto sto = static_cast<std::int64_t>(rng.uniform_int(17)) - 8;
        const auto cfo_bins = static_cast<std::int64_t>(rng.uniform_int(5)) - 2;
        const double cfo_hz = static_cast<double>(cfo_bins) * linear.bin_width();

        std::vector<std::uint32_t> payload(payload_len);
        for (auto& s : payload)
            s = static_cast<std::uint32_t>(rng.uniform_int(std::size_t{1} << sf));
        FrameSpec spec{family, payload_len};
        Scene scene;
        const auto pad = static_cast<std::int64_t>(2 * n);
        scene.paths.push_back(
            {pad + sto, 0.0, cfo_hz, build_frame(profiles, spec, payload)});
        scene.duration = pad + sto +
                         static_cast<std::int64_t>(scene.paths[0].frame.size()) +
                         static_cast<std::int64_t>(n);
        scene.snr_db = cfg.snr_db;
        scene.seed = rng.next_u64();
        const Waveform stream = render(scene);

        std::span<const cplx> up(stream.samples.data() + pad + 7 * static_cast<std::int64_t>(n), n);
        std::span<const cplx> down(stream.samples.data() + pad + 10 * static_cast<std::int64_t>(n), n);
        const SyncEstimate est = estimate_sto_cfo(up, down, linear);
        sto_errors.push_back(std::abs(est.sto_samples - static_cast<double>(sto)));
        cfo_errors.push_back(std::abs(est.cfo_hz - cfo_hz) / linear.bin_width());
    }

    ResultRow row = blank_row(cfg, sf);
    row.family = poly_of(cfg, family).label;
    row.snr_db = cfg.snr_db;
    row.ser = median(sto_errors);
    row.pdr = median(cfo_errors);
    row.seed = seed;
    return row;
}

ResultRow run_dds_check_point(const ExperimentConfig& cfg, const std::vector<std::int64_t>& k,
                              const std::vector<std::int64_t>& expect_f,
                              const std::vector<std::int64_t>& expect_p,
                              const std::string& label, std::uint64_t seed) {
    DdsConfig dds;
    dds.slope = k;
    const bool ok = freq_index_sequence(dds, expect_f.size()) == expect_f &&
                    phase_index_sequence(dds, expect_p.size()) == expect_p;
    ResultRow row = blank_row(cfg, cfg.sf_list.front());
    row.family = label;
    row.ser = ok ? 0.0 : 1.0;
    row.trials = expect_f.size();
    row.seed = seed;
    return row;
}

} // namespace

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<std::function<ResultRow(std::uint64_t)>> points;

    switch (cfg.kind) {
        case ExperimentKind::SerVsSnr:
            for (int sf : cfg.sf_list)
                for (int fam : cfg.families)
                    for (double snr : cfg.grid)
                        points.push_back([=, &cfg](std::uint64_t seed) {
                            return run_ser_vs_snr_point(cfg, sf, fam, snr, seed);
                        });
            break;
        case ExperimentKind::SerVsSir:
            for (int sf : cfg.sf_list)
                for (int fam : cfg.families)
                    for (double sir : cfg.grid)
                        points.push_back([=, &cfg](std::uint64_t seed) {
                            return run_near_far_point(cfg, sf, fam, sir, cfg.t_gap,
                                                      cfg.snr_db, seed);
                        });
            break;
        case ExperimentKind::SerVsOffset:
            for (int sf : cfg.sf_list)
                for (int fam : cfg.families)
                    for (double t_gap : cfg.grid)
                        points.push_back([=, &cfg](std::uint64_t seed) {
                            return run_near_far_point(cfg, sf, fam, cfg.sir_db, t_gap,
                                                      cfg.snr_db, seed);
                        });
            break;
        case ExperimentKind::AlignedCollision:
            for (int sf : cfg.sf_list)
                points.push_back([=, &cfg](std::uint64_t seed) {
                    return run_aligned_collision_point(cfg, sf, seed);
                });
            break;
        case ExperimentKind::Concurrency:
            for (int sf : cfg.sf_list)
                for (int n_tx : cfg.n_tx_grid) {
                    points.push_back([=, &cfg](std::uint64_t seed) {
                        return run_concurrency_point(cfg, sf, n_tx, cfg.families,
                                                     "nonlinear", seed);
                    });
                    points.push_back([=, &cfg](std::uint64_t seed) {
                        return run_concurrency_point(cfg, sf, n_tx, {kLinear}, "linear",
                                                     seed);
                    });
                }
            break;
        case ExperimentKind::SyncSweep:
            for (int sf : cfg.sf_list)
                points.push_back([=, &cfg](std::uint64_t seed) {
                    return run_sync_sweep_point(cfg, sf, seed);
                });
            break;
        case ExperimentKind::DdsCheck:
            points.push_back([&cfg](std::uint64_t seed) {
                return run_dds_check_point(cfg, {1}, {1, 2, 3, 4}, {1, 3, 6, 10},
                                           "K=1", seed);
            });
            points.push_back([&cfg](std::uint64_t seed) {
                return run_dds_check_point(cfg, {1, 2, 4, 8}, {1, 3, 7, 15}, {1, 4, 11, 26},
                                           "K=1-2-4-8", seed);
            });
            break;
    }

    std::vector<ResultRow> rows(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            rows[i] = points[i](derive_seed(cfg.seed, i));
        }
    };
    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), points.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    if (!cfg.out_path.empty()) write_csv(rows, cfg.out_path);
    return rows;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace

std::string csv_string(const std::vector<ResultRow>& rows) {
    std::string out = "kind,sf,bw,family,snr_db,sir_db,t_gap,n_tx,ser,pdr,throughput,trials,seed\n";
    for (const auto& r : rows) {
        out += r.kind + ',' + std::to_string(r.sf) + ',' + fmt(r.bw) + ',' + r.family + ',';
        out += fmt(r.snr_db) + ',' + fmt(r.sir_db) + ',' + fmt(r.t_gap) + ',';
        out += (r.n_tx > 0 ? std::to_string(r.n_tx) : std::string{}) + ',';
        out += fmt(r.ser) + ',' + fmt(r.pdr) + ',' + fmt(r.throughput) + ',';
        out += std::to_string(r.trials) + ',' + std::to_string(r.seed) + '\n';
    }
    return out;
}

void write_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << csv_string(rows);
}

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json j;
    in >> j;

    ExperimentConfig cfg;
    cfg.kind = kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("sf")) cfg.sf_list = j["sf"].get<std::vector<int>>();
    if (j.contains("bw")) cfg.bw = j["bw"].get<double>();
    if (j.contains("osr")) cfg.osr = j["osr"].get<int>();
    if (j.contains("families")) cfg.families = j["families"].get<std::vector<int>>();
    if (j.contains("grid")) cfg.grid = j["grid"].get<std::vector<double>>();
    if (j.contains("n_tx")) cfg.n_tx_grid = j["n_tx"].get<std::vector<int>>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
    if (j.contains("snr_db")) cfg.snr_db = j["snr_db"].get<double>();
    if (j.contains("sir_db")) cfg.sir_db = j["sir_db"].get<double>();
    if (j.contains("t_gap")) cfg.t_gap = j["t_gap"].get<double>();
    if (j.contains("payload_len")) cfg.payload_len = j["payload_len"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
    if (j.contains("out")) cfg.out_path = j["out"].get<std::string>();
    if (j.contains("registry_file"))
        cfg.registry = load_family_registry(j["registry_file"].get<std::string>());
    return cfg;
}

} // namespace nlchirp
