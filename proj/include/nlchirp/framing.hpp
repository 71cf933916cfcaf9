#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlchirp/chirp.hpp"
#include "nlchirp/sync.hpp"
#include "nlchirp/waveform.hpp"

namespace nlchirp {

/// Frame layout: 8 linear preamble up-chirps, 2 sync-word symbols in the
/// payload family, 2.25 linear SFD down-chirps, then the payload. The sync
/// word doubles as configuration: the family that modulates it identifies
/// the payload family, and its two symbol values encode payload_len on a
/// multiple-of-4 grid, tolerating +-1 bin of demodulation error.
struct FrameSpec {
    static constexpr int kPreambleSymbols = 8;
    static constexpr int kSyncwordSymbols = 2;
    // SFD is 2 full down-chirps plus the first quarter of a third.

    int payload_family = kQuadratic1;
    std::size_t payload_len = 1;

    /// Symbols between frame start and the first payload symbol: 12.25.
    static std::size_t header_samples(std::size_t symbol_samples) {
        return symbol_samples * 12 + symbol_samples / 4;
    }
    static std::size_t frame_samples(std::size_t symbol_samples, std::size_t payload_len) {
        return header_samples(symbol_samples) + payload_len * symbol_samples;
    }

    std::pair<std::uint32_t, std::uint32_t> syncword_values(int sf) const;
    static std::size_t decode_payload_len(std::uint32_t v1, std::uint32_t v2, int sf);
};

struct DecodedPacket {
    std::int64_t start_offset = 0;
    SyncEstimate sync;
    int family = -1;
    std::size_t payload_len = 0;
    std::vector<std::uint32_t> symbols;
    std::vector<double> per_symbol_scatter;
};

struct FrameNotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sync word demodulates comparably well under two families (top scores
/// within 10%), or under none at all.
struct SyncAmbiguityError : std::runtime_error {
    SyncAmbiguityError(std::string msg, std::vector<int> cands)
        : std::runtime_error(std::move(msg)), candidates(std::move(cands)) {}
    std::vector<int> candidates;
};

/// Profiles for every registered family at one SF/BW/OSR setting. A linear
/// profile is always available for the preamble/SFD even when the linear
/// family is not registered for payloads.
class ProfileSet {
public:
    ProfileSet(const std::vector<ChirpPolynomial>& families, int sf, double bw, int osr);

    const ChirpProfile& linear() const { return linear_; }
    const ChirpProfile& by_family(int family_id) const;
    const std::vector<ChirpProfile>& all() const { return profiles_; }

private:
    std::vector<ChirpProfile> profiles_;
    ChirpProfile linear_;
};

Waveform build_frame(const ProfileSet& profiles, const FrameSpec& spec,
                     const std::vector<std::uint32_t>& payload);

/// Sync-word demodulation score of one registered family at a candidate
/// alignment, with the sync symbol values that family reads.
struct FamilySyncScore {
    int family_id = -1;
    double score = 0.0;
    std::uint32_t sync_v1 = 0;
    std::uint32_t sync_v2 = 0;
    // Both sync values land within 1 bin of the multiple-of-4 encoding grid.
    // Readings under the wrong family are essentially random, so this prunes
    // them even when a strong foreign signal inflates their score.
    bool grid_consistent = false;
};

/// Families scoring below this on the sync word are treated as absent.
/// Scores are peak-to-mean bin energy: noise alone sits near ln(N)
/// regardless of N, a matching family near N * (signal fraction).
constexpr double kMinSyncScore = 10.0;

/// Pilot estimation + correction + per-family sync scoring at one detected
/// candidate. The corrected tail segment starts at `start_offset`.
struct CandidateAnalysis {
    std::int64_t start_offset = 0;
    SyncEstimate sync;
    Waveform corrected;
    std::vector<FamilySyncScore> family_scores; // sorted by descending score
};

CandidateAnalysis analyze_candidate(const Waveform& stream, std::int64_t start,
                                    const ProfileSet& profiles);

DecodedPacket decode_with_family(const CandidateAnalysis& analysis,
                                 const FamilySyncScore& fs, const ProfileSet& profiles);

/// Full single-packet receive pipeline: detect preamble, estimate and
/// correct STO/CFO, identify the payload family from the sync word, then
/// demodulate the payload. Throws FrameNotFoundError / SyncAmbiguityError.
DecodedPacket parse_frame(const Waveform& stream, const ProfileSet& profiles);

} // namespace nlchirp
