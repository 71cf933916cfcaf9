#include "nlchirp/collision.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <span>
#include <stdexcept>

#include "nlchirp/modem.hpp"
#include "nlchirp/sync.hpp"

namespace nlchirp {

std::vector<DecodedPacket> decode_candidate(const Waveform& stream,
                                            const PreambleCandidate& candidate,
                                            const ProfileSet& profiles) {
    std::vector<DecodedPacket> packets;
    CandidateAnalysis analysis;
    try {
        analysis = analyze_candidate(stream, candidate.start_offset, profiles);
    } catch (const FrameNotFoundError&) {
        return packets;
    }
    double best = 0.0;
    for (const auto& fs : analysis.family_scores)
        if (fs.grid_consistent) best = std::max(best, fs.score);
    for (const auto& fs : analysis.family_scores) {
        if (!fs.grid_consistent || fs.score < kMinSyncScore || fs.score < 0.4 * best)
            continue;
        try {
            packets.push_back(decode_with_family(analysis, fs, profiles));
        } catch (const FrameNotFoundError&) {
            // Payload length from a marginal sync word may overrun the stream.
        }
    }
    return packets;
}

std::vector<DecodedPacket> decode_all(const Waveform& stream, const ProfileSet& profiles) {
    std::vector<DecodedPacket> packets;
    for (const PreambleCandidate& cand : detect_preamble(stream, profiles.linear())) {
        std::vector<DecodedPacket> decoded = decode_candidate(stream, cand, profiles);
        packets.insert(packets.end(), decoded.begin(), decoded.end());
    }
    std::sort(packets.begin(), packets.end(), [](const auto& a, const auto& b) {
        return a.start_offset != b.start_offset ? a.start_offset < b.start_offset
                                                : a.family < b.family;
    });
    return packets;
}

std::vector<std::uint32_t> decode_target(const Waveform& stream, std::int64_t frame_start,
                                         const ChirpProfile& profile,
                                         std::size_t payload_len) {
    const std::size_t n = profile.n_samples();
    const std::int64_t payload_begin =
        frame_start + static_cast<std::int64_t>(FrameSpec::header_samples(n));
    if (frame_start < 0 ||
        payload_begin + static_cast<std::int64_t>(payload_len * n) >
            static_cast<std::int64_t>(stream.size()))
        throw std::invalid_argument("decode_target: alignment outside stream");

    std::vector<std::uint32_t> symbols;
    symbols.reserve(payload_len);
    for (std::size_t k = 0; k < payload_len; ++k) {
        std::span<const cplx> window(
            stream.samples.data() + payload_begin + static_cast<std::int64_t>(k * n), n);
        symbols.push_back(decide_symbol(dechirp(window, profile)));
    }
    return symbols;
}

std::string packets_to_json(const std::vector<DecodedPacket>& packets) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : packets) {
        j.push_back({{"offset", p.start_offset},
                     {"family", p.family},
                     {"sto_samples", p.sync.sto_samples},
                     {"cfo_hz", p.sync.cfo_hz},
                     {"confidence", p.sync.confidence},
                     {"payload_len", p.payload_len},
                     {"symbols", p.symbols},
                     {"scatter", p.per_symbol_scatter}});
    }
    return j.dump(2);
}

} // namespace nlchirp
