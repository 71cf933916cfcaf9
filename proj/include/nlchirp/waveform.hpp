#pragma once

#include <complex>
#include <vector>

namespace nlchirp {

using cplx = std::complex<double>;

/// Complex baseband sample buffer. The universal signal currency: every
/// synthesis, channel and demodulation stage consumes and produces these.
struct Waveform {
    std::vector<cplx> samples;
    double sample_rate = 0.0; // Hz

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }

    double energy() const {
        double e = 0.0;
        for (const auto& s : samples) e += std::norm(s);
        return e;
    }
};

} // namespace nlchirp
