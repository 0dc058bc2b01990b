#pragma once

#include <cstdint>
#include <vector>

#include "manet/event_queue.hpp"
#include "manet/mac.hpp"
#include "manet/propagation.hpp"
#include "manet/rng.hpp"
#include "manet/types.hpp"

namespace manet {

enum class PropagationModel : uint8_t { TwoRay, Shadowing };
enum class FadingMode : uint8_t { PerFrame, PerLink };

struct ChannelCounters {
    uint64_t subthreshold = 0;  // addressed frames arriving below the reception threshold
    uint64_t collision = 0;     // addressed frames lost to overlap, no capture
};

/// The shared medium: dispatches each transmission to every other node with
/// a power draw from the active propagation model, tracks in-progress
/// receptions per node for physical carrier sensing, and applies the
/// no-capture collision rule before handing decoded frames to the MACs.
class Channel {
public:
    Channel(EventQueue& queue, Rng& rng, const RadioParams& radio, PropagationModel model,
            FadingMode fading, std::vector<Vec2> positions);

    void attach(NodeId id, MacEntity* mac);

    /// Called by a node's MAC when its transmitter starts. Draws one power
    /// sample per receiver, schedules reception start/end events for every
    /// node that can sense the frame, and marks the sender busy for the
    /// frame's duration.
    void start_transmission(NodeId tx, const Frame& frame);

    /// Energy at or above the carrier-sense threshold at this node, or its
    /// own transmitter running.
    bool physical_busy(NodeId id) const;

    const ChannelCounters& counters() const { return counters_; }
    double node_distance(NodeId a, NodeId b) const;
    const std::vector<Vec2>& positions() const { return positions_; }

private:
    struct Arrival {
        Frame frame;
        double end;
        bool candidate;  // at or above the reception threshold
        bool corrupted;
    };
    struct NodeState {
        double tx_until = 0.0;
        std::vector<Arrival> arrivals;
        MacEntity* mac = nullptr;
    };

    double sample_power_dbm(NodeId tx, NodeId rx, double d);
    void begin_arrival(NodeId rx, Arrival arrival);
    void end_arrival(NodeId rx, uint64_t uid);
    void poke(NodeId id);

    EventQueue& queue_;
    Rng& rng_;
    RadioParams radio_;
    PropagationModel model_;
    FadingMode fading_;
    std::vector<Vec2> positions_;
    std::vector<NodeState> nodes_;
    std::vector<double> link_fade_db_;  // symmetric per-pair fades, PerLink mode
    ChannelCounters counters_;
};

}  // namespace manet
