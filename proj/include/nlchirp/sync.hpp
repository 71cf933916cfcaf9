#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nlchirp/chirp.hpp"
#include "nlchirp/modem.hpp"
#include "nlchirp/waveform.hpp"

namespace nlchirp {

/// Symbol-time / carrier-frequency offset estimate from the conjugate
/// pilot pair. sto_samples > 0 means the packet arrives later than the
/// assumed alignment.
struct SyncEstimate {
    double sto_samples = 0.0;
    double cfo_hz = 0.0;
    double peak_up_bin = 0.0;   // signed fractional bin, (-N/2, N/2]
    double peak_down_bin = 0.0;
    double confidence = 0.0;    // peak-to-mean spectral ratio, min of the two pilots
    bool low_confidence = false;
};

struct PreambleCandidate {
    std::int64_t start_offset = 0; // samples
    double score = 0.0;            // mean preamble+SFD scatter at this alignment
};

/// Per-bin energy-fraction gate used by preamble detection; noise bins sit
/// near ln(N)/N, and requiring 6 consecutive windows on the same bin keeps
/// the false-alarm rate negligible even at a 3x margin.
double detection_threshold(std::size_t n_bins);

/// Scans the stream with symbol-length windows and reports packet start
/// offsets where some bin stays above the noise-calibrated energy
/// threshold (drifting at most +-1) for at least 6 consecutive windows.
/// Runs are tracked per bin, so overlapping preambles are reported
/// separately even when one packet owns the spectral argmax.
std::vector<PreambleCandidate> detect_preamble(const Waveform& stream,
                                               const ChirpProfile& linear_profile);

/// Conjugate-pilot STO/CFO estimation: dechirp the up-pilot against the
/// down-chirp (peak p1) and the down-pilot against the up-chirp (peak p2),
/// both as fractional bins. CFO shifts both peaks identically, STO shifts
/// them oppositely: cfo = (p1+p2)/2, sto = (p2-p1)/2.
SyncEstimate estimate_sto_cfo(std::span<const cplx> pilot_up_window,
                              std::span<const cplx> pilot_down_window,
                              const ChirpProfile& linear_profile);

/// Integer shift plus fractional delay (linear interpolation), then
/// per-sample derotation by the estimated CFO.
Waveform correct(const Waveform& stream, const SyncEstimate& est);

/// Three-point complex interpolation around the spectral argmax,
/// wrapped into (-N/2, N/2]. Exposed for tests.
double fractional_peak_bin(const DechirpSpectrum& spec);

} // namespace nlchirp
