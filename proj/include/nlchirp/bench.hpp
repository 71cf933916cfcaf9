#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlchirp/chirp.hpp"

namespace nlchirp {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Fraction of positions where decoded != truth. Lengths must match.
double compute_ser(const std::vector<std::uint32_t>& truth,
                   const std::vector<std::uint32_t>& decoded);

/// Fraction of packets with symbol accuracy >= 80% (SER <= 0.20).
/// Undetected packets enter the list as SER 1.0.
double compute_pdr(const std::vector<double>& per_packet_ser);

/// Correctly decoded symbols per second of scene time.
double compute_throughput(std::size_t decoded_symbol_count, double duration_seconds);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

enum class ExperimentKind {
    SerVsSnr,
    SerVsSir,
    SerVsOffset,
    AlignedCollision,
    Concurrency,
    SyncSweep,
    DdsCheck,
};

std::string kind_name(ExperimentKind kind);
ExperimentKind kind_from_name(const std::string& name);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::SerVsSnr;
    std::vector<int> sf_list{10};
    double bw = 125000.0;
    int osr = 1;
    std::vector<int> families{kQuadratic1};  // ids into the registry
    std::vector<double> grid;                // sweep values (snr / sir / t_gap)
    std::vector<int> n_tx_grid{2, 4, 6, 8, 10};
    std::size_t trials = 10000;              // symbols (or packets) per point
    double snr_db = 30.0;                    // fixed SNR where not swept
    double sir_db = -10.0;                   // fixed SIR for the offset sweep
    double t_gap = 0.2;                      // fixed symbol offset for the SIR sweep
    std::size_t payload_len = 40;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out_path;
    std::vector<ChirpPolynomial> registry = builtin_families();

    void validate() const;
};

/// One sweep point. Coordinates that do not apply to the experiment kind
/// are NaN (written as empty CSV cells).
struct ResultRow {
    std::string kind;
    int sf = 0;
    double bw = 0.0;
    std::string family;
    double snr_db, sir_db, t_gap;
    int n_tx = 0;
    double ser, pdr, throughput;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

/// Fixed column order: kind,sf,bw,family,snr_db,sir_db,t_gap,n_tx,ser,pdr,
/// throughput,trials,seed. Byte-stable for a given config+seed.
void write_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::string csv_string(const std::vector<ResultRow>& rows);

/// Runs every sweep point (parallelized over cfg.workers; per-point seeds
/// derive from the master seed so the worker count never changes results)
/// and writes cfg.out_path when set.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

/// JSON config file -> config; missing keys keep their defaults.
ExperimentConfig load_experiment_config(const std::string& path);

} // namespace nlchirp
