#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace manet {

using NodeId = uint32_t;
using PacketId = uint64_t;

constexpr NodeId kBroadcast = 0xffffffffu;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class FrameKind : uint8_t { Rts, Cts, Data, Ack, RouteRequest, RouteReply, RouteError };

inline bool is_mac_control(FrameKind k) {
    return k == FrameKind::Rts || k == FrameKind::Cts || k == FrameKind::Ack;
}

enum class DropCause : uint8_t {
    Subthreshold,  // arrived below the reception threshold
    Collision,     // overlapped another decodable frame, no capture
    Retry,         // transmit attempts exhausted at the MAC
    Ifq,           // MAC transmit queue overflow
    NoRoute,       // send buffer overflow or expiry with no route
    LinkBreak,     // stranded on a broken link
    Misroute,      // source route did not contain the forwarding node
};

/// One over-the-air unit. A single struct covers MAC control frames and the
/// routing-layer payloads; unused fields stay empty for kinds that do not
/// carry them.
struct Frame {
    FrameKind kind = FrameKind::Data;
    NodeId src = 0;             // transmitting hop
    NodeId dst = 0;             // next hop, or kBroadcast
    uint64_t uid = 0;           // per-simulation frame identity, set at MAC enqueue
    uint32_t payload_bytes = 0;
    double tx_time = 0.0;       // seconds on air, set at MAC enqueue
    double duration_field = 0.0;  // NAV reservation covering the rest of the exchange

    // Source-routed kinds (Data, RouteReply, RouteError): complete hop
    // sequence in travel order, path.front() is the originator of the frame.
    std::vector<NodeId> path;
    PacketId packet_id = 0;     // Data only: identity of the carried payload

    // RouteRequest fields.
    NodeId origin = 0;
    NodeId target = 0;
    uint32_t request_seq = 0;
    std::vector<NodeId> record;  // accumulated route, begins at origin

    // RouteError fields.
    NodeId broken_from = 0;
    NodeId broken_to = 0;
};

}  // namespace manet
