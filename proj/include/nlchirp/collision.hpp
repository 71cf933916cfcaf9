#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlchirp/framing.hpp"
#include "nlchirp/waveform.hpp"

namespace nlchirp {

/// Sliding-window concurrent decoder. Every detected packet is aligned and
/// demodulated independently at its own family; colliders are suppressed by
/// energy scattering alone, never by interference cancellation.
std::vector<DecodedPacket> decode_all(const Waveform& stream, const ProfileSet& profiles);

/// Aligned collisions of different families at one detection are resolved
/// by decoding one packet per family whose sync-word score holds up against
/// the best one.
std::vector<DecodedPacket> decode_candidate(const Waveform& stream,
                                            const PreambleCandidate& candidate,
                                            const ProfileSet& profiles);

/// Oracle-aligned payload demodulation of one packet: used by controlled
/// experiments to isolate the modem from detection and sync effects.
std::vector<std::uint32_t> decode_target(const Waveform& stream, std::int64_t frame_start,
                                         const ChirpProfile& profile,
                                         std::size_t payload_len);

/// Per-packet JSON records (offset, family, sto, cfo, symbols, scatter).
std::string packets_to_json(const std::vector<DecodedPacket>& packets);

} // namespace nlchirp
