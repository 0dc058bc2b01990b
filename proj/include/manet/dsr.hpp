#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "manet/env.hpp"
#include "manet/observer.hpp"
#include "manet/types.hpp"

namespace manet {

struct DsrParams {
    size_t send_buffer_capacity = 64;
    double send_buffer_timeout = 30.0;        // seconds a payload may wait for a route
    double discovery_retry_initial = 0.5;     // first re-discovery delay
    double discovery_retry_cap = 10.0;        // exponential backoff ceiling
    bool cache_reply = true;                  // intermediates may answer from cache
};

struct DsrCounters {
    uint64_t discoveries = 0;
    uint64_t rreq_sent = 0, rreq_recv = 0;
    uint64_t rrep_sent = 0, rrep_recv = 0;
    uint64_t rerr_sent = 0, rerr_recv = 0;
};

struct DsrCallbacks {
    std::function<void(Frame)> mac_enqueue;
    std::function<void(PacketId)> packet_delivered;
    std::function<void(PacketId, DropCause)> packet_dropped;
};

struct CachedRoute {
    std::vector<NodeId> hops;  // begins at the owning node, ends at the destination
    bool valid = true;
};

/// Dynamic source routing agent for one node: route discovery by flooding
/// with accumulated route records, a per-destination route cache, source
/// routed forwarding, and route maintenance through route error frames.
class DsrEntity {
public:
    DsrEntity(NodeId id, const DsrParams& params, SchedulerEnv& env, DsrCallbacks callbacks,
              SimObserver* observer = nullptr);

    /// Hand a payload to the routing layer. Routes immediately on a cache
    /// hit, otherwise buffers the payload and starts a discovery.
    void originate(NodeId dest, PacketId packet, uint32_t payload_bytes);

    /// Decoded frame delivered by the MAC (Data or routing kinds).
    void on_frame(const Frame& frame);

    /// MAC retry exhaustion toward next_hop while carrying `stranded`.
    void on_link_failure(NodeId next_hop, const Frame& stranded);

    NodeId id() const { return id_; }
    const DsrCounters& counters() const { return counters_; }
    size_t send_buffer_size() const { return buffer_.size(); }

    /// Shortest valid cached route to dest, or nullptr. Ties keep the
    /// earliest cached route.
    const CachedRoute* best_route(NodeId dest) const;
    const std::vector<CachedRoute>* routes_for(NodeId dest) const;

private:
    struct Buffered {
        PacketId packet;
        NodeId dest;
        uint32_t bytes;
        double expiry;
    };
    struct Discovery {
        bool active = false;
        double backoff = 0.0;
        uint64_t gen = 0;
    };

    void send_data(PacketId packet, uint32_t bytes, const std::vector<NodeId>& route);
    void on_route_request(const Frame& frame);
    void on_route_reply(const Frame& frame);
    void on_route_error(const Frame& frame);
    void on_data(const Frame& frame);
    void start_discovery(NodeId dest);
    void retry_discovery(NodeId dest, uint64_t gen);
    void send_rreq(NodeId dest);
    void cache_route(const std::vector<NodeId>& route);
    void invalidate_edge(NodeId from, NodeId to);
    void flush_buffer(NodeId dest);
    bool has_buffered(NodeId dest) const;

    NodeId id_;
    DsrParams params_;
    SchedulerEnv& env_;
    DsrCallbacks cb_;
    SimObserver* observer_;

    std::unordered_map<NodeId, std::vector<CachedRoute>> cache_;
    std::deque<Buffered> buffer_;
    std::unordered_map<NodeId, Discovery> discovery_;
    uint32_t next_request_seq_ = 0;
    std::unordered_set<uint64_t> seen_requests_;  // (origin, seq) at intermediates
    std::unordered_map<uint64_t, std::unordered_set<uint64_t>> replied_records_;  // at target
    DsrCounters counters_;
};

}  // namespace manet
