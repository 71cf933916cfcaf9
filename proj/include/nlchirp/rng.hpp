#pragma once

#include <cstdint>

#include "nlchirp/waveform.hpp"

namespace nlchirp {

/// Deterministic generator used everywhere randomness is needed. Avoids the
/// standard distributions on purpose: their output is implementation
/// defined, and experiment CSVs must be byte-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    /// Uniform in [0, 1).
    double uniform();

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t uniform_int(std::uint64_t bound); // [0, bound)

    /// Standard normal via Box-Muller.
    double normal();

    /// Circularly symmetric complex normal with total variance `variance`.
    cplx complex_normal(double variance);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Stable per-task seed derivation (splitmix64 mix of master and index),
/// so a worker pool of any size reproduces identical per-point streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

} // namespace nlchirp
