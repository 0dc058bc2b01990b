#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "manet/channel.hpp"
#include "manet/engine.hpp"
#include "manet/event_queue.hpp"
#include "test_support.hpp"

using namespace manet;

namespace {

ScenarioConfig two_node_config(double separation_m) {
    ScenarioConfig cfg;
    cfg.region = RectRegion(500.0, 400.0);
    cfg.node_count = 2;
    cfg.connections = 1;
    cfg.propagation = PropagationModel::TwoRay;
    cfg.sim_duration = 30.0;
    cfg.explicit_positions = {{10.0, 10.0}, {10.0 + separation_m, 10.0}};
    cfg.explicit_connections = {{0, 1}};
    return cfg;
}

/// MacEnv bound to a shared queue and channel, for driving Channel directly.
class ChannelEnv : public MacEnv {
public:
    ChannelEnv(EventQueue& q, NodeId id) : q_(q), id_(id), rng_(17) {}
    void bind(Channel* ch) { ch_ = ch; }
    double now() const override { return q_.now(); }
    void schedule(double delay, std::function<void()> fn) override {
        q_.in(delay, std::move(fn));
    }
    bool physical_carrier_busy() const override { return ch_->physical_busy(id_); }
    void start_transmission(const Frame& f) override { ch_->start_transmission(id_, f); }
    Rng& rng() override { return rng_; }
    uint64_t next_frame_uid() override { return ++uid_; }

private:
    EventQueue& q_;
    NodeId id_;
    Channel* ch_ = nullptr;
    Rng rng_;
    uint64_t uid_ = 5000;
};

struct ChannelFixture {
    ChannelFixture(std::vector<Vec2> positions, PropagationModel model, RadioParams radio = {})
        : rng(7) {
        for (NodeId i = 0; i < positions.size(); ++i)
            envs.push_back(std::make_unique<ChannelEnv>(queue, i));
        channel = std::make_unique<Channel>(queue, rng, radio, model, FadingMode::PerFrame,
                                            std::move(positions));
        for (NodeId i = 0; i < envs.size(); ++i) {
            envs[i]->bind(channel.get());
            MacCallbacks cb;
            cb.deliver_up = [this, i](const Frame& f) { received[i].push_back(f); };
            macs.push_back(std::make_unique<MacEntity>(i, MacParams{}, *envs[i], std::move(cb)));
            channel->attach(i, macs[i].get());
        }
    }

    Frame probe(uint64_t uid) const {
        Frame f;
        f.kind = FrameKind::RouteRequest;
        f.dst = kBroadcast;
        f.payload_bytes = 20;
        f.tx_time = macs[0]->params().tx_time_for_bytes(20);
        f.uid = uid;
        return f;
    }

    EventQueue queue;
    Rng rng;
    std::unique_ptr<Channel> channel;
    std::vector<std::unique_ptr<ChannelEnv>> envs;
    std::vector<std::unique_ptr<MacEntity>> macs;
    std::map<NodeId, std::vector<Frame>> received;
};

}  // namespace

TEST_CASE("event queue runs in timestamp order with stable ties") {
    EventQueue q;
    std::vector<int> order;
    q.at(3.0, [&] { order.push_back(3); });
    q.at(1.0, [&] { order.push_back(1); });
    q.at(2.0, [&] { order.push_back(20); });
    q.at(2.0, [&] { order.push_back(21); });  // same time, inserted later
    q.at(1.0, [&] {
        order.push_back(2);
        q.in(0.0, [&] { order.push_back(10); });  // nested same-time event
    });
    q.run_all();
    CHECK(order == std::vector<int>{1, 2, 10, 20, 21, 3});
    CHECK(q.now() == 3.0);
}

TEST_CASE("topology is uniform, bounded, and deterministic") {
    ScenarioConfig cfg;
    cfg.region = RectRegion(400.0, 300.0);
    cfg.node_count = 30;
    cfg.seed = 77;
    auto a = generate_topology(cfg);
    auto b = generate_topology(cfg);
    REQUIRE(a.size() == 30);
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
        CHECK(a[i].x >= 0.0);
        CHECK(a[i].x <= cfg.region.width_d1);
        CHECK(a[i].y >= 0.0);
        CHECK(a[i].y <= cfg.region.length_d2);
    }

    // Chi-square uniformity over a 10x10 grid; 99 dof upper 1% point.
    ScenarioConfig big = cfg;
    big.node_count = 100'000;
    auto pos = generate_topology(big);
    std::vector<int> cells(100, 0);
    for (const Vec2& p : pos) {
        int cx = std::min(9, static_cast<int>(10.0 * p.x / big.region.width_d1));
        int cy = std::min(9, static_cast<int>(10.0 * p.y / big.region.length_d2));
        ++cells[cy * 10 + cx];
    }
    double expected = big.node_count / 100.0;
    double chi2 = 0.0;
    for (int c : cells) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 134.6416);  // chi-square(99) upper 1% critical value
}

TEST_CASE("the scenario suite holds density constant") {
    auto suite = scenario_suite();
    REQUIRE(suite.size() == 8);
    CHECK(suite[0].region.width_d1 == 300.0);
    CHECK(suite[0].region.length_d2 == 400.0);
    CHECK(suite[0].node_count == 30);
    CHECK(suite[7].region.width_d1 == 700.0);
    CHECK(suite[7].region.length_d2 == 700.0);
    CHECK(suite[7].node_count == 122);

    double base_density = 30.0 / (400.0 * 300.0);
    for (const auto& cfg : suite) {
        double density = cfg.node_count / cfg.region.area();
        CHECK(std::fabs(density - base_density) / base_density < 0.04);
    }
}

TEST_CASE("a single stable link delivers everything") {
    MetricsReport r = run(two_node_config(50.0));
    CHECK(r.n_sent > 0);
    CHECK(r.delivery_ratio() == 1.0);
    CHECK(r.conserved());
    CHECK(r.frame_drops.subthreshold == 0);
}

TEST_CASE("an out-of-range pair loses everything to no_route") {
    MetricsReport r = run(two_node_config(300.0));  // past the 166.7 m range
    CHECK(r.n_sent > 0);
    CHECK(r.delivery_ratio() == 0.0);
    CHECK(r.conserved());
    CHECK(r.n_recvd == 0);
    CHECK(r.data_drops.no_route == r.n_sent);
    CHECK(r.frame_drops.subthreshold > 0);  // request floods heard below threshold
}

TEST_CASE("same seed, same report across three configurations") {
    ScenarioConfig shadow;
    shadow.region = RectRegion(300.0, 300.0);
    shadow.node_count = 12;
    shadow.connections = 3;
    shadow.sim_duration = 20.0;
    shadow.seed = 42;

    ScenarioConfig clear = shadow;
    clear.propagation = PropagationModel::TwoRay;

    ScenarioConfig sticky = shadow;
    sticky.fading = FadingMode::PerLink;

    for (const ScenarioConfig& cfg : {shadow, clear, sticky}) {
        MetricsReport a = run(cfg);
        MetricsReport b = run(cfg);
        CHECK(a == b);
        CHECK(a.conserved());
    }
}

TEST_CASE("replications aggregate identically, sequential or parallel") {
    ScenarioConfig cfg;
    cfg.region = RectRegion(300.0, 300.0);
    cfg.node_count = 10;
    cfg.connections = 2;
    cfg.sim_duration = 10.0;
    cfg.seed = 9;

    ReplicatedReport seq = run_replicated(cfg, 4, 1);
    ReplicatedReport par = run_replicated(cfg, 4, 4);
    REQUIRE(seq.runs.size() == 4);
    CHECK(seq.runs == par.runs);
    CHECK(seq.delivery_mean == par.delivery_mean);
    CHECK(seq.delivery_std == par.delivery_std);

    // A single replication equals a plain run of the same config.
    ReplicatedReport one = run_replicated(cfg, 1);
    MetricsReport direct = run(cfg);
    CHECK(one.runs[0] == direct);
    CHECK(one.delivery_mean == doctest::Approx(direct.delivery_ratio()));
    CHECK(one.delivery_std == 0.0);
}

TEST_CASE("discovery terminates and delivers on a line and a grid") {
    ScenarioConfig line;
    line.region = RectRegion(1400.0, 100.0);
    line.node_count = 10;
    line.propagation = PropagationModel::TwoRay;
    line.sim_duration = 40.0;
    line.explicit_connections = {{0, 9}};
    for (int i = 0; i < 10; ++i)
        line.explicit_positions.push_back({10.0 + 150.0 * i, 50.0});
    MetricsReport r = run(line);
    CHECK(r.n_sent > 0);
    CHECK(r.delivery_ratio() == 1.0);
    CHECK(r.conserved());
    CHECK(r.discoveries >= 1);

    ScenarioConfig grid;
    grid.region = RectRegion(300.0, 300.0);
    grid.node_count = 9;
    grid.propagation = PropagationModel::TwoRay;
    grid.sim_duration = 40.0;
    grid.explicit_connections = {{0, 8}};
    for (int i = 0; i < 9; ++i)
        grid.explicit_positions.push_back({10.0 + 120.0 * (i % 3), 10.0 + 120.0 * (i / 3)});
    MetricsReport g = run(grid);
    CHECK(g.delivery_ratio() == 1.0);
    CHECK(g.conserved());
}

TEST_CASE("two contending stations all get through without fading") {
    ScenarioConfig cfg = two_node_config(50.0);
    cfg.explicit_connections = {{0, 1}, {1, 0}};
    cfg.cbr_rate = 4.0;
    MetricsReport r = run(cfg);
    CHECK(r.n_sent > 100);
    CHECK(r.delivery_ratio() == 1.0);
    CHECK(r.conserved());
}

TEST_CASE("in-range two-ray traffic never drops below threshold") {
    ScenarioConfig cfg;
    cfg.region = RectRegion(120.0, 120.0);
    cfg.node_count = 5;
    cfg.connections = 2;
    cfg.propagation = PropagationModel::TwoRay;
    cfg.sim_duration = 15.0;
    cfg.seed = 3;
    MetricsReport r = run(cfg);  // diagonal 170 m > range, but positions are random
    CHECK(r.conserved());
    // All pair distances are inside the two-ray range for this seed's layout.
    auto pos = generate_topology(cfg);
    double range = tworay_range(cfg.radio);
    bool all_in_range = true;
    for (size_t i = 0; i < pos.size(); ++i)
        for (size_t j = i + 1; j < pos.size(); ++j)
            if (distance(pos[i], pos[j]) > range) all_in_range = false;
    if (all_in_range) CHECK(r.frame_drops.subthreshold == 0);
}

TEST_CASE("channel: reception follows the threshold-exceedance law") {
    RadioParams radio;
    ChannelFixture fx({{0.0, 0.0}, {80.0, 0.0}}, PropagationModel::Shadowing, radio);
    const int n = 10'000;
    for (int i = 0; i < n; ++i) {
        Frame f = fx.probe(i + 1);
        fx.queue.at(i * 0.01, [&fx, f] { fx.channel->start_transmission(0, f); });
    }
    fx.queue.run_all();
    double rate = static_cast<double>(fx.received[1].size()) / n;
    CHECK(rate == doctest::Approx(prob_above_threshold(radio, 80.0)).epsilon(0.02 /
          prob_above_threshold(radio, 80.0)));
}

TEST_CASE("channel: two-ray reception is certain inside the range") {
    ChannelFixture fx({{0.0, 0.0}, {100.0, 0.0}}, PropagationModel::TwoRay);
    for (int i = 0; i < 200; ++i) {
        Frame f = fx.probe(i + 1);
        fx.queue.at(i * 0.01, [&fx, f] { fx.channel->start_transmission(0, f); });
    }
    fx.queue.run_all();
    CHECK(fx.received[1].size() == 200);
    CHECK(fx.channel->counters().subthreshold == 0);
}

TEST_CASE("channel: carriers below the sensing threshold stay invisible") {
    // Past carrier-sense range: the receiver's medium never goes busy.
    ChannelFixture far({{0.0, 0.0}, {400.0, 0.0}}, PropagationModel::TwoRay);
    Frame f = far.probe(1);
    far.queue.at(0.0, [&] { far.channel->start_transmission(0, f); });
    bool busy_seen = false;
    far.queue.at(f.tx_time * 0.5, [&] { busy_seen = far.channel->physical_busy(1); });
    far.queue.run_all();
    CHECK(!busy_seen);
    CHECK(far.received[1].empty());

    // Between the sensing and reception thresholds: busy but undecodable.
    ChannelFixture mid({{0.0, 0.0}, {250.0, 0.0}}, PropagationModel::TwoRay);
    Frame g = mid.probe(1);
    mid.queue.at(0.0, [&] { mid.channel->start_transmission(0, g); });
    bool mid_busy = false;
    mid.queue.at(g.tx_time * 0.5 + 250.0 / 2.9e8, [&] { mid_busy = mid.channel->physical_busy(1); });
    mid.queue.run_all();
    CHECK(mid_busy);
    CHECK(mid.received[1].empty());
    CHECK(mid.channel->counters().subthreshold == 1);
}

TEST_CASE("channel: overlapping decodable frames collide with no capture") {
    ChannelFixture fx({{0.0, 0.0}, {100.0, 0.0}, {200.0, 0.0}}, PropagationModel::TwoRay);
    Frame a = fx.probe(1);
    Frame b = fx.probe(2);
    fx.queue.at(0.0, [&] { fx.channel->start_transmission(0, a); });
    fx.queue.at(0.0, [&] { fx.channel->start_transmission(2, b); });
    fx.queue.run_all();
    CHECK(fx.received[1].empty());  // both frames audible and both lost
    CHECK(fx.channel->counters().collision == 2);

    // A sub-threshold overlapper does not corrupt a decodable frame.
    ChannelFixture cap({{0.0, 0.0}, {100.0, 0.0}, {450.0, 0.0}}, PropagationModel::TwoRay);
    Frame c = cap.probe(1);
    Frame d = cap.probe(2);
    cap.queue.at(0.0, [&] { cap.channel->start_transmission(0, c); });
    cap.queue.at(0.0, [&] { cap.channel->start_transmission(2, d); });
    cap.queue.run_all();
    REQUIRE(cap.received[1].size() == 1);
    CHECK(cap.received[1][0].uid == 1);
}

TEST_CASE("per-link fading freezes one fade per pair") {
    // At 80 m the per-frame decode probability is near one half; under the
    // static mode every probe over the same pair shares a single draw, so a
    // seed either delivers all probes or none.
    RadioParams radio;
    int mixed_outcomes = 0;
    int all_or_nothing = 0;
    for (uint64_t seed = 1; seed <= 24; ++seed) {
        EventQueue queue;
        Rng rng(seed);
        std::vector<Vec2> pos{{0.0, 0.0}, {80.0, 0.0}};
        ChannelEnv env(queue, 1);
        Channel channel(queue, rng, radio, PropagationModel::Shadowing, FadingMode::PerLink,
                        pos);
        env.bind(&channel);
        int received = 0;
        MacCallbacks cb;
        cb.deliver_up = [&](const Frame&) { ++received; };
        MacEntity mac(1, MacParams{}, env, std::move(cb));
        channel.attach(1, &mac);
        const int probes = 20;
        for (int i = 0; i < probes; ++i) {
            Frame f;
            f.kind = FrameKind::RouteRequest;
            f.dst = kBroadcast;
            f.payload_bytes = 20;
            f.tx_time = mac.params().tx_time_for_bytes(20);
            f.uid = i + 1;
            queue.at(i * 0.01, [&channel, f] { channel.start_transmission(0, f); });
        }
        queue.run_all();
        if (received == 0 || received == probes) ++all_or_nothing;
        else ++mixed_outcomes;
    }
    CHECK(mixed_outcomes == 0);
    CHECK(all_or_nothing == 24);
}

TEST_CASE("config invariants are enforced before any event runs") {
    ScenarioConfig bad;
    bad.node_count = 1;
    CHECK_THROWS_AS(run(bad), std::invalid_argument);

    ScenarioConfig conns;
    conns.node_count = 6;
    conns.connections = 4;  // above node_count/2
    CHECK_THROWS_AS(conns.validate(), std::invalid_argument);

    ScenarioConfig dur;
    dur.sim_duration = -1.0;
    CHECK_THROWS_AS(dur.validate(), std::invalid_argument);
}
