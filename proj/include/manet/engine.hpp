#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "manet/analytics.hpp"
#include "manet/channel.hpp"
#include "manet/dsr.hpp"
#include "manet/mac.hpp"
#include "manet/observer.hpp"
#include "manet/propagation.hpp"
#include "manet/types.hpp"

namespace manet {

/// One simulation scenario: topology, radio, MAC, routing, and traffic.
struct ScenarioConfig {
    RectRegion region{400.0, 300.0};
    int node_count = 30;
    PropagationModel propagation = PropagationModel::Shadowing;
    FadingMode fading = FadingMode::PerFrame;
    RadioParams radio;
    MacParams mac;
    DsrParams dsr;
    int connections = 5;
    double cbr_rate = 1.0;        // packets per second per connection
    uint32_t payload_bytes = 512;
    double sim_duration = 250.0;  // seconds of traffic generation
    double traffic_start_window = 10.0;  // sources start uniformly inside this
    uint64_t seed = 1;

    // Test hooks: fixed topologies and traffic endpoints. Empty means
    // random per the seed.
    std::vector<Vec2> explicit_positions;
    std::vector<std::pair<NodeId, NodeId>> explicit_connections;

    void validate() const;
};

struct DropCounts {
    uint64_t subthreshold = 0;
    uint64_t collision = 0;
    uint64_t retry = 0;
    uint64_t ifq = 0;
    uint64_t no_route = 0;
    uint64_t link_break = 0;
    uint64_t misroute = 0;

    uint64_t total() const {
        return subthreshold + collision + retry + ifq + no_route + link_break + misroute;
    }
    bool operator==(const DropCounts&) const = default;
};

/// Per-run counters. data_drops records the single terminal fate of each
/// originated payload packet; frame_drops records per-frame channel and MAC
/// events (one payload packet can cost several frames).
struct MetricsReport {
    uint64_t n_sent = 0;
    uint64_t n_recvd = 0;
    DropCounts data_drops;
    DropCounts frame_drops;
    uint64_t discoveries = 0;
    uint64_t rreq_sent = 0, rreq_recv = 0;
    uint64_t rrep_sent = 0, rrep_recv = 0;
    uint64_t rerr_sent = 0, rerr_recv = 0;
    uint64_t mac_tx_frames = 0;
    uint64_t mac_acked = 0;
    uint64_t unaccounted = 0;  // packets with no terminal state; zero after a drained run

    double delivery_ratio() const {
        return n_sent == 0 ? 0.0 : static_cast<double>(n_recvd) / static_cast<double>(n_sent);
    }
    bool conserved() const {
        return unaccounted == 0 && n_sent == n_recvd + data_drops.total();
    }
    bool operator==(const MetricsReport&) const = default;
};

struct ReplicatedReport {
    std::vector<MetricsReport> runs;
    double delivery_mean = 0.0;
    double delivery_std = 0.0;  // sample standard deviation across runs
};

/// Node positions with both coordinates uniform over the region,
/// deterministic per config.seed. The same positions open a full run()
/// with the same config.
std::vector<Vec2> generate_topology(const ScenarioConfig& config);

/// The eight constant-density scenarios: region sizes from 400x300 up to
/// 700x700 with node counts 30 through 122.
std::vector<ScenarioConfig> scenario_suite();

/// Execute one scenario to completion. Traffic stops at sim_duration and
/// the event queue then drains, so every originated packet reaches exactly
/// one terminal counter. Identical seeds give identical reports.
MetricsReport run(const ScenarioConfig& config, SimObserver* observer = nullptr);

/// n_seeds independent replications with seeds derived from config.seed,
/// optionally in parallel (max_threads 0 picks the hardware count).
/// Aggregation is by replication index, so concurrency never changes the
/// result.
ReplicatedReport run_replicated(const ScenarioConfig& config, int n_seeds,
                                unsigned max_threads = 0);

}  // namespace manet
