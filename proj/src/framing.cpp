#include "nlchirp/framing.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "nlchirp/modem.hpp"

namespace nlchirp {

std::pair<std::uint32_t, std::uint32_t> FrameSpec::syncword_values(int sf) const {
    const std::size_t quarter = std::size_t{1} << (sf - 2);
    const std::size_t hi = payload_len / quarter;
    const std::size_t lo = payload_len % quarter;
    if (hi >= quarter)
        throw std::invalid_argument("frame: payload_len too large for sync-word encoding");
    return {static_cast<std::uint32_t>(4 * hi), static_cast<std::uint32_t>(4 * lo)};
}

namespace {

// Snap a demodulated sync symbol onto the multiple-of-4 grid. A step-2 grid
// cannot tolerate +-1 bin errors: an odd value is equidistant from two grid
// points.
std::uint32_t snap_grid(std::uint32_t v, int sf) {
    const std::uint32_t n = 1u << sf;
    return (((v + 2) >> 2) << 2) % n;
}

// Circular distance of v from the nearest multiple of 4.
std::uint32_t grid_distance(std::uint32_t v) {
    const std::uint32_t r = v % 4;
    return std::min(r, 4 - r);
}

} // namespace

std::size_t FrameSpec::decode_payload_len(std::uint32_t v1, std::uint32_t v2, int sf) {
    const std::size_t quarter = std::size_t{1} << (sf - 2);
    return (snap_grid(v1, sf) / 4) * quarter + (snap_grid(v2, sf) / 4);
}

ProfileSet::ProfileSet(const std::vector<ChirpPolynomial>& families, int sf, double bw,
                       int osr) {
    if (families.empty()) throw std::invalid_argument("profile set: empty family registry");
    for (const auto& fam : families) profiles_.emplace_back(fam, sf, bw, osr);
    linear_ = ChirpProfile(builtin_family(kLinear), sf, bw, osr);
}

const ChirpProfile& ProfileSet::by_family(int family_id) const {
    for (const auto& p : profiles_)
        if (p.poly.family_id == family_id) return p;
    throw std::invalid_argument("family not registered: " + std::to_string(family_id));
}

Waveform build_frame(const ProfileSet& profiles, const FrameSpec& spec,
                     const std::vector<std::uint32_t>& payload) {
    if (payload.size() != spec.payload_len)
        throw std::invalid_argument("build_frame: payload length mismatch");
    const ChirpProfile& linear = profiles.linear();
    const ChirpProfile& family = profiles.by_family(spec.payload_family);
    const std::size_t n = linear.n_samples();

    Waveform frame;
    frame.sample_rate = linear.sample_rate();
    frame.samples.reserve(FrameSpec::frame_samples(n, spec.payload_len));

    auto append = [&frame](const Waveform& w, std::size_t count) {
        frame.samples.insert(frame.samples.end(), w.samples.begin(),
                             w.samples.begin() + static_cast<std::ptrdiff_t>(count));
    };

    const Waveform up = synth_symbol(linear, 0);
    for (int i = 0; i < FrameSpec::kPreambleSymbols; ++i) append(up, n);

    const auto [v1, v2] = spec.syncword_values(linear.sf);
    append(synth_symbol(family, v1), n);
    append(synth_symbol(family, v2), n);

    const Waveform down = base_downchirp(linear);
    append(down, n);
    append(down, n);
    append(down, n / 4); // quarter SFD symbol, rounded down

    for (std::uint32_t s : payload) append(synth_symbol(family, s), n);
    return frame;
}

// ---------------------------------------------------------------------------
// Receive pipeline internals (shared with the collision decoder)
// ---------------------------------------------------------------------------

CandidateAnalysis analyze_candidate(const Waveform& stream, std::int64_t start,
                                    const ProfileSet& profiles) {
    const ChirpProfile& linear = profiles.linear();
    const std::size_t n = linear.n_samples();
    if (start < 0 ||
        static_cast<std::size_t>(start) + FrameSpec::header_samples(n) > stream.size())
        throw FrameNotFoundError("candidate header does not fit in stream");

    CandidateAnalysis out;
    out.start_offset = start;

    // Work on the tail segment beginning at the candidate start.
    Waveform segment;
    segment.sample_rate = stream.sample_rate;
    segment.samples.assign(stream.samples.begin() + start, stream.samples.end());

    auto pilot_window = [&segment, n](std::size_t symbol_index) {
        return std::span<const cplx>(segment.samples.data() + symbol_index * n, n);
    };

    out.sync = estimate_sto_cfo(pilot_window(7), pilot_window(10), linear);
    segment = correct(segment, out.sync);

    // One refinement pass at the corrected alignment.
    const SyncEstimate refine = estimate_sto_cfo(pilot_window(7), pilot_window(10), linear);
    if (std::abs(refine.sto_samples) > 0.5 * linear.osr ||
        std::abs(refine.cfo_hz) > 0.25 * linear.bin_width()) {
        segment = correct(segment, refine);
        out.sync.sto_samples += refine.sto_samples;
        out.sync.cfo_hz += refine.cfo_hz;
        out.sync.confidence = std::min(out.sync.confidence, refine.confidence);
        out.sync.low_confidence = out.sync.low_confidence || refine.low_confidence;
    }

    // Score every registered family on the two sync-word windows.
    for (const auto& profile : profiles.all()) {
        FamilySyncScore fs;
        fs.family_id = profile.poly.family_id;
        double score = 0.0;
        std::uint32_t values[2];
        for (int k = 0; k < 2; ++k) {
            std::span<const cplx> window(segment.samples.data() + (8 + k) * n, n);
            const DechirpSpectrum spec = dechirp(window, profile);
            values[k] = decide_symbol(spec);
            // Peak energy over mean bin energy: scale-free, so a matching
            // family scores ~N even when channel noise dominates the total
            // window energy.
            score += scatter_ratio(spec) * static_cast<double>(profile.n_bins());
        }
        fs.score = score / 2.0;
        fs.sync_v1 = values[0];
        fs.sync_v2 = values[1];
        fs.grid_consistent = grid_distance(values[0]) <= 1 && grid_distance(values[1]) <= 1;
        out.family_scores.push_back(fs);
    }
    std::sort(out.family_scores.begin(), out.family_scores.end(),
              [](const auto& a, const auto& b) { return a.score > b.score; });
    out.corrected = std::move(segment);
    return out;
}

DecodedPacket decode_with_family(const CandidateAnalysis& analysis,
                                 const FamilySyncScore& fs, const ProfileSet& profiles) {
    const ChirpProfile& profile = profiles.by_family(fs.family_id);
    const std::size_t n = profile.n_samples();
    const std::size_t payload_len =
        FrameSpec::decode_payload_len(fs.sync_v1, fs.sync_v2, profile.sf);
    const std::size_t payload_begin = FrameSpec::header_samples(n);
    if (payload_len == 0)
        throw FrameNotFoundError("decoded payload length is zero");
    if (payload_begin + payload_len * n > analysis.corrected.size())
        throw FrameNotFoundError("decoded payload length overruns stream");

    DecodedPacket pkt;
    pkt.start_offset = analysis.start_offset;
    pkt.sync = analysis.sync;
    pkt.family = fs.family_id;
    pkt.payload_len = payload_len;
    for (std::size_t k = 0; k < payload_len; ++k) {
        std::span<const cplx> window(analysis.corrected.samples.data() + payload_begin + k * n,
                                     n);
        const DechirpSpectrum spec = dechirp(window, profile);
        pkt.symbols.push_back(decide_symbol(spec));
        pkt.per_symbol_scatter.push_back(scatter_ratio(spec));
    }
    return pkt;
}

DecodedPacket parse_frame(const Waveform& stream, const ProfileSet& profiles) {
    const std::vector<PreambleCandidate> candidates =
        detect_preamble(stream, profiles.linear());
    if (candidates.empty()) throw FrameNotFoundError("no preamble detected");

    const CandidateAnalysis analysis =
        analyze_candidate(stream, candidates.front().start_offset, profiles);
    std::vector<FamilySyncScore> scores;
    for (const auto& fs : analysis.family_scores)
        if (fs.grid_consistent) scores.push_back(fs);
    if (scores.empty() || scores.front().score < kMinSyncScore)
        throw SyncAmbiguityError("sync word matches no registered family", {});
    if (scores.size() > 1 && scores[1].score >= 0.9 * scores[0].score)
        throw SyncAmbiguityError("sync word family ambiguous",
                                 {scores[0].family_id, scores[1].family_id});
    return decode_with_family(analysis, scores.front(), profiles);
}

} // namespace nlchirp
