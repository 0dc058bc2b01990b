#pragma once

// Shared fixtures: scripted environments for driving the MAC and routing
// state machines without a full simulation, plus small statistics helpers.

#include <algorithm>
#include <functional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "manet/env.hpp"
#include "manet/observer.hpp"
#include "manet/event_queue.hpp"
#include "manet/rng.hpp"
#include "manet/types.hpp"

namespace manet::test {

/// MacEnv over a bare event queue with a hand-controlled carrier flag.
/// Transmissions are logged with their start times instead of reaching any
/// channel.
class ScriptedMacEnv : public MacEnv {
public:
    explicit ScriptedMacEnv(uint64_t seed = 42) : rng_(seed) {}

    double now() const override { return queue.now(); }
    void schedule(double delay, std::function<void()> fn) override {
        queue.in(delay, std::move(fn));
    }
    bool physical_carrier_busy() const override { return carrier_busy; }
    void start_transmission(const Frame& frame) override {
        tx_log.push_back({queue.now(), frame});
    }
    Rng& rng() override { return rng_; }
    uint64_t next_frame_uid() override { return ++uid_; }

    struct TxRecord {
        double at;
        Frame frame;
    };

    EventQueue queue;
    bool carrier_busy = false;
    std::vector<TxRecord> tx_log;

private:
    Rng rng_;
    uint64_t uid_ = 0;
};

/// SchedulerEnv over a bare event queue, for routing-layer tests.
class ScriptedSchedEnv : public SchedulerEnv {
public:
    double now() const override { return queue.now(); }
    void schedule(double delay, std::function<void()> fn) override {
        queue.in(delay, std::move(fn));
    }

    EventQueue queue;
};

/// Normalized histogram: densities over `bins` equal cells of [lo, hi).
inline std::vector<double> density_histogram(const std::vector<double>& samples, int bins,
                                             double lo, double hi) {
    std::vector<double> h(bins, 0.0);
    double width = (hi - lo) / bins;
    for (double s : samples) {
        int b = static_cast<int>((s - lo) / width);
        if (b >= 0 && b < bins) h[b] += 1.0;
    }
    for (double& v : h) v /= samples.size() * width;
    return h;
}

}  // namespace manet::test

namespace manet::test {

/// Watches every hooked transition and records the first violation of the
/// MAC and routing invariants: NAV monotonicity, the retry bound, the
/// contention-window doubling sequence, carrier sense at transmit start,
/// single rebroadcast per request id, loop-free owned routes, and
/// shortest-route selection.
class InvariantObserver : public SimObserver {
public:
    explicit InvariantObserver(int cw_min, int cw_max) : cw_min_(cw_min), cw_max_(cw_max) {}

    void nav_updated(NodeId n, double before, double after) override {
        if (after < before) fail("NAV moved backward at node " + std::to_string(n));
    }

    void retry_changed(NodeId n, int retry, int limit) override {
        if (retry > limit) fail("retry count above limit at node " + std::to_string(n));
    }

    void cw_changed(NodeId n, int before, int after, int cap) override {
        if (after > cap) fail("contention window above cap at node " + std::to_string(n));
        if (after > before) {
            int expected = std::min(2 * (before + 1) - 1, cap);
            if (after != expected) fail("contention window skipped the doubling sequence");
        } else if (after < before && after != cw_min_) {
            fail("contention window reset away from its floor");
        }
        if (cap != cw_max_) fail("contention window cap drifted");
    }

    void tx_started(NodeId n, bool medium_busy) override {
        if (medium_busy) fail("transmission started on a busy medium at node " +
                              std::to_string(n));
    }

    void rreq_rebroadcast(NodeId n, NodeId origin, uint32_t seq) override {
        if (!rebroadcasts_.insert({n, origin, seq}).second)
            fail("request rebroadcast twice by node " + std::to_string(n));
    }

    void route_cached(NodeId n, const std::vector<NodeId>& route) override {
        if (route.size() < 2 || route.front() != n) fail("cached route does not start at owner");
        std::vector<NodeId> sorted = route;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            fail("cached route contains a loop");
    }

    void route_selected(NodeId, size_t chosen, size_t best) override {
        if (chosen > best) fail("selected route longer than the shortest valid route");
    }

    bool clean() const { return violations_ == 0; }
    const std::string& first_violation() const { return first_; }
    uint64_t violations() const { return violations_; }

private:
    void fail(const std::string& what) {
        if (violations_++ == 0) first_ = what;
    }

    int cw_min_;
    int cw_max_;
    std::set<std::tuple<NodeId, NodeId, uint32_t>> rebroadcasts_;
    uint64_t violations_ = 0;
    std::string first_;
};

}  // namespace manet::test
