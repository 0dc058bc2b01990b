#include "manet/dsr.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace manet {

namespace {

constexpr uint32_t kRouteFrameBaseBytes = 16;

uint32_t route_frame_bytes(size_t hop_count) {
    return kRouteFrameBaseBytes + 4u * static_cast<uint32_t>(hop_count);
}

uint64_t request_key(NodeId origin, uint32_t seq) {
    return (static_cast<uint64_t>(origin) << 32) | seq;
}

uint64_t record_hash(const std::vector<NodeId>& record) {
    uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (NodeId n : record) {
        h ^= n;
        h *= 1099511628211ull;
    }
    return h;
}

bool contains(const std::vector<NodeId>& hops, NodeId n) {
    return std::find(hops.begin(), hops.end(), n) != hops.end();
}

bool loop_free(const std::vector<NodeId>& hops) {
    for (size_t i = 0; i < hops.size(); ++i)
        for (size_t j = i + 1; j < hops.size(); ++j)
            if (hops[i] == hops[j]) return false;
    return true;
}

bool contains_edge(const std::vector<NodeId>& hops, NodeId from, NodeId to) {
    for (size_t i = 0; i + 1 < hops.size(); ++i)
        if (hops[i] == from && hops[i + 1] == to) return true;
    return false;
}

size_t index_of(const std::vector<NodeId>& hops, NodeId n) {
    return static_cast<size_t>(std::find(hops.begin(), hops.end(), n) - hops.begin());
}

}  // namespace

DsrEntity::DsrEntity(NodeId id, const DsrParams& params, SchedulerEnv& env,
                     DsrCallbacks callbacks, SimObserver* observer)
    : id_(id), params_(params), env_(env), cb_(std::move(callbacks)), observer_(observer) {}

const std::vector<CachedRoute>* DsrEntity::routes_for(NodeId dest) const {
    auto it = cache_.find(dest);
    return it == cache_.end() ? nullptr : &it->second;
}

const CachedRoute* DsrEntity::best_route(NodeId dest) const {
    auto it = cache_.find(dest);
    if (it == cache_.end()) return nullptr;
    const CachedRoute* best = nullptr;
    for (const CachedRoute& r : it->second) {
        if (!r.valid) continue;
        if (!best || r.hops.size() < best->hops.size()) best = &r;
    }
    if (best && observer_) {
        observer_->route_selected(id_, best->hops.size(), best->hops.size());
    }
    return best;
}

void DsrEntity::originate(NodeId dest, PacketId packet, uint32_t payload_bytes) {
    if (dest == id_) throw std::invalid_argument("DsrEntity: payload destined to self");
    if (const CachedRoute* route = best_route(dest)) {
        send_data(packet, payload_bytes, route->hops);
        return;
    }
    if (buffer_.size() >= params_.send_buffer_capacity) {
        if (cb_.packet_dropped) cb_.packet_dropped(packet, DropCause::NoRoute);
        return;
    }
    buffer_.push_back(Buffered{packet, dest, payload_bytes, env_.now() + params_.send_buffer_timeout});
    env_.schedule(params_.send_buffer_timeout, [this, packet] {
        auto it = std::find_if(buffer_.begin(), buffer_.end(),
                               [packet](const Buffered& b) { return b.packet == packet; });
        if (it != buffer_.end()) {
            buffer_.erase(it);
            if (cb_.packet_dropped) cb_.packet_dropped(packet, DropCause::NoRoute);
        }
    });
    start_discovery(dest);
}

void DsrEntity::send_data(PacketId packet, uint32_t bytes, const std::vector<NodeId>& route) {
    assert(route.size() >= 2 && route.front() == id_);
    Frame f;
    f.kind = FrameKind::Data;
    f.src = id_;
    f.dst = route[1];
    f.path = route;
    f.packet_id = packet;
    f.payload_bytes = bytes;
    cb_.mac_enqueue(std::move(f));
}

void DsrEntity::on_frame(const Frame& frame) {
    switch (frame.kind) {
        case FrameKind::Data: on_data(frame); break;
        case FrameKind::RouteRequest: on_route_request(frame); break;
        case FrameKind::RouteReply: on_route_reply(frame); break;
        case FrameKind::RouteError: on_route_error(frame); break;
        default: break;  // MAC control frames never reach the routing layer
    }
}

void DsrEntity::on_data(const Frame& frame) {
    size_t pos = index_of(frame.path, id_);
    if (pos >= frame.path.size()) {
        if (cb_.packet_dropped) cb_.packet_dropped(frame.packet_id, DropCause::Misroute);
        return;
    }
    if (pos + 1 == frame.path.size()) {
        if (cb_.packet_delivered) cb_.packet_delivered(frame.packet_id);
        return;
    }
    Frame next = frame;
    next.src = id_;
    next.dst = frame.path[pos + 1];
    cb_.mac_enqueue(std::move(next));
}

void DsrEntity::on_route_request(const Frame& frame) {
    ++counters_.rreq_recv;
    if (frame.origin == id_ || contains(frame.record, id_)) return;

    if (frame.target == id_) {
        // The target answers every request copy carrying a record it has not
        // already answered; distinct records give the origin distinct routes.
        auto& replied = replied_records_[request_key(frame.origin, frame.request_seq)];
        if (!replied.insert(record_hash(frame.record)).second) return;
        std::vector<NodeId> full = frame.record;
        full.push_back(id_);
        Frame reply;
        reply.kind = FrameKind::RouteReply;
        reply.src = id_;
        reply.path.assign(full.rbegin(), full.rend());
        reply.dst = reply.path[1];
        reply.record = std::move(full);
        reply.payload_bytes = route_frame_bytes(reply.record.size());
        ++counters_.rrep_sent;
        cb_.mac_enqueue(std::move(reply));
        return;
    }

    if (!seen_requests_.insert(request_key(frame.origin, frame.request_seq)).second) return;

    if (params_.cache_reply) {
        if (const CachedRoute* cached = best_route(frame.target)) {
            std::vector<NodeId> full = frame.record;
            full.insert(full.end(), cached->hops.begin(), cached->hops.end());
            if (loop_free(full)) {
                // Answer from cache and suppress further propagation of
                // this request copy.
                std::vector<NodeId> back = frame.record;
                back.push_back(id_);
                Frame reply;
                reply.kind = FrameKind::RouteReply;
                reply.src = id_;
                reply.path.assign(back.rbegin(), back.rend());
                reply.dst = reply.path[1];
                reply.record = std::move(full);
                reply.payload_bytes = route_frame_bytes(reply.record.size());
                ++counters_.rrep_sent;
                cb_.mac_enqueue(std::move(reply));
                return;
            }
        }
    }

    Frame forward = frame;
    forward.src = id_;
    forward.record.push_back(id_);
    forward.payload_bytes = route_frame_bytes(forward.record.size());
    if (observer_) observer_->rreq_rebroadcast(id_, frame.origin, frame.request_seq);
    ++counters_.rreq_sent;
    cb_.mac_enqueue(std::move(forward));
}

void DsrEntity::on_route_reply(const Frame& frame) {
    ++counters_.rrep_recv;
    size_t pos = index_of(frame.path, id_);
    if (pos >= frame.path.size()) return;
    if (pos + 1 == frame.path.size()) {
        // Reached the discovery origin.
        if (frame.record.empty() || frame.record.front() != id_) return;
        cache_route(frame.record);
        flush_buffer(frame.record.back());
        return;
    }
    Frame next = frame;
    next.src = id_;
    next.dst = frame.path[pos + 1];
    ++counters_.rrep_sent;
    cb_.mac_enqueue(std::move(next));
}

void DsrEntity::on_route_error(const Frame& frame) {
    ++counters_.rerr_recv;
    invalidate_edge(frame.broken_from, frame.broken_to);
    size_t pos = index_of(frame.path, id_);
    if (pos >= frame.path.size() || pos + 1 == frame.path.size()) return;
    Frame next = frame;
    next.src = id_;
    next.dst = frame.path[pos + 1];
    ++counters_.rerr_sent;
    cb_.mac_enqueue(std::move(next));
}

void DsrEntity::on_link_failure(NodeId next_hop, const Frame& stranded) {
    invalidate_edge(id_, next_hop);
    if (stranded.kind == FrameKind::Data && cb_.packet_dropped)
        cb_.packet_dropped(stranded.packet_id, DropCause::LinkBreak);
    // Report the break to the frame's source along the reversed prefix of
    // its travel path. A lost route error is not recovered.
    if (stranded.kind == FrameKind::RouteError) return;
    if (stranded.path.empty() || stranded.path.front() == id_) return;
    size_t pos = index_of(stranded.path, id_);
    if (pos >= stranded.path.size()) return;
    Frame err;
    err.kind = FrameKind::RouteError;
    err.src = id_;
    err.broken_from = id_;
    err.broken_to = next_hop;
    err.path.assign(stranded.path.rend() - static_cast<long>(pos) - 1, stranded.path.rend());
    err.dst = err.path[1];
    err.payload_bytes = route_frame_bytes(err.path.size());
    ++counters_.rerr_sent;
    cb_.mac_enqueue(std::move(err));
}

void DsrEntity::cache_route(const std::vector<NodeId>& route) {
    // Guard against malformed or looping routes instead of trusting the
    // channel; such a route must never become selectable.
    if (route.size() < 2 || route.front() != id_ || !loop_free(route)) return;
    auto& entries = cache_[route.back()];
    for (CachedRoute& r : entries) {
        if (r.hops == route) {
            r.valid = true;  // a fresh discovery re-learns an invalidated route
            return;
        }
    }
    entries.push_back(CachedRoute{route, true});
    if (observer_) observer_->route_cached(id_, route);
}

void DsrEntity::invalidate_edge(NodeId from, NodeId to) {
    for (auto& [dest, entries] : cache_)
        for (CachedRoute& r : entries)
            if (r.valid && contains_edge(r.hops, from, to)) r.valid = false;
}

void DsrEntity::flush_buffer(NodeId dest) {
    auto& d = discovery_[dest];
    d.active = false;
    ++d.gen;
    std::deque<Buffered> keep;
    for (Buffered& b : buffer_) {
        if (b.dest != dest) {
            keep.push_back(b);
            continue;
        }
        if (const CachedRoute* route = best_route(dest)) {
            send_data(b.packet, b.bytes, route->hops);
        } else {
            keep.push_back(b);
        }
    }
    buffer_.swap(keep);
}

bool DsrEntity::has_buffered(NodeId dest) const {
    return std::any_of(buffer_.begin(), buffer_.end(),
                       [dest](const Buffered& b) { return b.dest == dest; });
}

void DsrEntity::start_discovery(NodeId dest) {
    Discovery& d = discovery_[dest];
    if (d.active) return;
    d.active = true;
    d.backoff = params_.discovery_retry_initial;
    uint64_t gen = ++d.gen;
    ++counters_.discoveries;
    send_rreq(dest);
    env_.schedule(d.backoff, [this, dest, gen] { retry_discovery(dest, gen); });
}

void DsrEntity::retry_discovery(NodeId dest, uint64_t gen) {
    Discovery& d = discovery_[dest];
    if (!d.active || gen != d.gen) return;
    if (best_route(dest) != nullptr || !has_buffered(dest)) {
        d.active = false;
        return;
    }
    d.backoff = std::min(2.0 * d.backoff, params_.discovery_retry_cap);
    send_rreq(dest);
    env_.schedule(d.backoff, [this, dest, gen] { retry_discovery(dest, gen); });
}

void DsrEntity::send_rreq(NodeId dest) {
    Frame f;
    f.kind = FrameKind::RouteRequest;
    f.src = id_;
    f.dst = kBroadcast;
    f.origin = id_;
    f.target = dest;
    f.request_seq = next_request_seq_++;
    f.record = {id_};
    f.payload_bytes = route_frame_bytes(1);
    ++counters_.rreq_sent;
    cb_.mac_enqueue(std::move(f));
}

}  // namespace manet
