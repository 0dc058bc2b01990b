#include "manet/channel.hpp"

#include <algorithm>
#include <cassert>

namespace manet {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
}

Channel::Channel(EventQueue& queue, Rng& rng, const RadioParams& radio, PropagationModel model,
                 FadingMode fading, std::vector<Vec2> positions)
    : queue_(queue), rng_(rng), radio_(radio), model_(model), fading_(fading),
      positions_(std::move(positions)), nodes_(positions_.size()) {
    if (fading_ == FadingMode::PerLink && model_ == PropagationModel::Shadowing) {
        // One static fade per unordered pair, drawn up front in index order
        // so the stream stays deterministic.
        size_t n = positions_.size();
        link_fade_db_.assign(n * n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i + 1; j < n; ++j) {
                double x = rng_.gaussian(0.0, radio_.shadow_sigma_db);
                link_fade_db_[i * n + j] = x;
                link_fade_db_[j * n + i] = x;
            }
        }
    }
}

void Channel::attach(NodeId id, MacEntity* mac) { nodes_.at(id).mac = mac; }

double Channel::node_distance(NodeId a, NodeId b) const {
    return distance(positions_[a], positions_[b]);
}

double Channel::sample_power_dbm(NodeId tx, NodeId rx, double d) {
    // The propagation models are defined from the reference distance out;
    // the rare closer pair is evaluated at the reference distance.
    double d_eff = std::max(d, radio_.ref_distance_m);
    if (model_ == PropagationModel::TwoRay) return received_power_tworay(radio_, d_eff).value;
    double loss = mean_path_loss_db(radio_, d_eff);
    if (radio_.shadow_sigma_db > 0.0) {
        if (fading_ == FadingMode::PerLink)
            loss += link_fade_db_[tx * positions_.size() + rx];
        else
            loss += rng_.gaussian(0.0, radio_.shadow_sigma_db);
    }
    return radio_.tx_power.value - loss;
}

bool Channel::physical_busy(NodeId id) const {
    const NodeState& n = nodes_[id];
    if (queue_.now() < n.tx_until) return true;
    for (const Arrival& a : n.arrivals)
        if (a.end > queue_.now()) return true;
    return false;
}

void Channel::start_transmission(NodeId tx, const Frame& frame) {
    NodeState& sender = nodes_[tx];
    double now = queue_.now();
    sender.tx_until = now + frame.tx_time;
    // A radio cannot hear while it talks: receptions in progress are lost.
    for (Arrival& a : sender.arrivals)
        if (a.end > now) a.corrupted = true;
    poke(tx);
    queue_.at(sender.tx_until, [this, tx] { poke(tx); });

    for (NodeId rx = 0; rx < nodes_.size(); ++rx) {
        if (rx == tx) continue;
        double d = node_distance(tx, rx);
        double power = sample_power_dbm(tx, rx, d);
        bool addressed = frame.dst == rx || frame.dst == kBroadcast;
        if (power < radio_.rx_threshold.value && addressed) ++counters_.subthreshold;
        if (power < radio_.carrier_sense_threshold.value) continue;
        double delay = d / kSpeedOfLight;
        Arrival arrival{frame, now + delay + frame.tx_time,
                        power >= radio_.rx_threshold.value, false};
        queue_.at(now + delay, [this, rx, arrival = std::move(arrival)]() mutable {
            begin_arrival(rx, std::move(arrival));
        });
    }
}

void Channel::begin_arrival(NodeId rx, Arrival arrival) {
    NodeState& n = nodes_[rx];
    double now = queue_.now();
    if (now < n.tx_until) arrival.corrupted = true;
    if (arrival.candidate) {
        // No capture: two decodable frames overlapping in time destroy
        // each other.
        for (Arrival& other : n.arrivals) {
            if (other.end > now && other.candidate) {
                other.corrupted = true;
                arrival.corrupted = true;
            }
        }
    }
    uint64_t uid = arrival.frame.uid;
    double end = arrival.end;
    n.arrivals.push_back(std::move(arrival));
    queue_.at(end, [this, rx, uid] { end_arrival(rx, uid); });
    poke(rx);
}

void Channel::end_arrival(NodeId rx, uint64_t uid) {
    NodeState& n = nodes_[rx];
    auto it = std::find_if(n.arrivals.begin(), n.arrivals.end(),
                           [uid](const Arrival& a) { return a.frame.uid == uid; });
    assert(it != n.arrivals.end());
    Arrival arrival = std::move(*it);
    n.arrivals.erase(it);
    bool addressed = arrival.frame.dst == rx || arrival.frame.dst == kBroadcast;
    if (arrival.candidate && !arrival.corrupted) {
        if (n.mac) n.mac->on_frame_received(arrival.frame);
    } else if (arrival.candidate && arrival.corrupted && addressed) {
        ++counters_.collision;
    }
    poke(rx);
}

void Channel::poke(NodeId id) {
    if (nodes_[id].mac) nodes_[id].mac->on_channel_activity();
}

}  // namespace manet
