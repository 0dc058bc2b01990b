#pragma once

#include <cstdint>
#include <vector>

#include "manet/types.hpp"

namespace manet {

/// Trace hooks for state transitions the invariant tests care about.
/// All callbacks default to no-ops.
struct SimObserver {
    virtual ~SimObserver() = default;

    virtual void nav_updated(NodeId, double /*before*/, double /*after*/) {}
    virtual void retry_changed(NodeId, int /*retry*/, int /*limit*/) {}
    virtual void cw_changed(NodeId, int /*before*/, int /*after*/, int /*cap*/) {}
    virtual void tx_started(NodeId, bool /*medium_busy*/) {}
    virtual void rreq_rebroadcast(NodeId, NodeId /*origin*/, uint32_t /*seq*/) {}
    virtual void route_cached(NodeId, const std::vector<NodeId>& /*route*/) {}
    virtual void route_selected(NodeId, size_t /*chosen_len*/, size_t /*shortest_valid_len*/) {}
};

}  // namespace manet
