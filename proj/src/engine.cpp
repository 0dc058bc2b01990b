#include "manet/engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cassert>
#include <cmath>
#include <memory>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "manet/event_queue.hpp"

namespace manet {

void ScenarioConfig::validate() const {
    if (node_count < 2) throw std::invalid_argument("ScenarioConfig: need at least 2 nodes");
    if (!(sim_duration > 0.0))
        throw std::invalid_argument("ScenarioConfig: sim_duration must be positive");
    if (!(cbr_rate > 0.0)) throw std::invalid_argument("ScenarioConfig: cbr_rate must be positive");
    if (payload_bytes == 0)
        throw std::invalid_argument("ScenarioConfig: payload_bytes must be positive");
    if (explicit_connections.empty()) {
        if (connections < 1 || connections > node_count / 2)
            throw std::invalid_argument(
                "ScenarioConfig: connections must be in [1, node_count/2]");
    } else {
        for (auto [s, d] : explicit_connections) {
            if (s == d || s >= static_cast<NodeId>(node_count) ||
                d >= static_cast<NodeId>(node_count))
                throw std::invalid_argument("ScenarioConfig: bad explicit connection");
        }
    }
    if (!explicit_positions.empty() &&
        explicit_positions.size() != static_cast<size_t>(node_count))
        throw std::invalid_argument("ScenarioConfig: explicit_positions size mismatch");
    radio.validate();
    mac.validate();
}

namespace {

std::vector<Vec2> draw_positions(Rng& rng, const ScenarioConfig& cfg) {
    std::vector<Vec2> pos;
    pos.reserve(cfg.node_count);
    for (int i = 0; i < cfg.node_count; ++i) {
        double x = rng.uniform01() * cfg.region.width_d1;
        double y = rng.uniform01() * cfg.region.length_d2;
        pos.push_back(Vec2{x, y});
    }
    return pos;
}

std::vector<std::pair<NodeId, NodeId>> draw_connections(Rng& rng, const ScenarioConfig& cfg) {
    // Ordered pairs without replacement, source != destination.
    std::vector<std::pair<NodeId, NodeId>> out;
    std::set<std::pair<NodeId, NodeId>> used;
    auto n = static_cast<uint64_t>(cfg.node_count);
    while (out.size() < static_cast<size_t>(cfg.connections)) {
        NodeId s = static_cast<NodeId>(rng.bounded(n));
        NodeId d = static_cast<NodeId>(rng.bounded(n));
        if (s == d) continue;
        if (!used.insert({s, d}).second) continue;
        out.emplace_back(s, d);
    }
    return out;
}

/// Terminal-state bookkeeping for originated payload packets. Each packet
/// latches exactly one outcome; later events for the same packet (a retry
/// drop racing a delivery at the last hop) are ignored.
struct PacketLedger {
    uint64_t sent = 0;
    uint64_t recvd = 0;
    DropCounts drops;
    std::unordered_set<PacketId> open;

    void originated(PacketId p) {
        ++sent;
        open.insert(p);
    }
    void delivered(PacketId p) {
        if (open.erase(p)) ++recvd;
    }
    void dropped(PacketId p, DropCause cause) {
        if (!open.erase(p)) return;
        switch (cause) {
            case DropCause::Subthreshold: ++drops.subthreshold; break;
            case DropCause::Collision: ++drops.collision; break;
            case DropCause::Retry: ++drops.retry; break;
            case DropCause::Ifq: ++drops.ifq; break;
            case DropCause::NoRoute: ++drops.no_route; break;
            case DropCause::LinkBreak: ++drops.link_break; break;
            case DropCause::Misroute: ++drops.misroute; break;
        }
    }
};

class Simulation {
public:
    Simulation(const ScenarioConfig& cfg, SimObserver* observer)
        : cfg_(cfg), rng_(cfg.seed) {
        cfg_.validate();
        auto positions =
            cfg_.explicit_positions.empty() ? draw_positions(rng_, cfg_) : cfg_.explicit_positions;
        channel_ = std::make_unique<Channel>(queue_, rng_, cfg_.radio, cfg_.propagation,
                                             cfg_.fading, std::move(positions));
        connections_ = cfg_.explicit_connections.empty() ? draw_connections(rng_, cfg_)
                                                         : cfg_.explicit_connections;

        envs_.reserve(cfg_.node_count);
        macs_.reserve(cfg_.node_count);
        dsrs_.reserve(cfg_.node_count);
        for (NodeId id = 0; id < static_cast<NodeId>(cfg_.node_count); ++id) {
            envs_.push_back(std::make_unique<NodeEnvImpl>(this, id));
            MacCallbacks mac_cb;
            mac_cb.deliver_up = [this, id](const Frame& f) { dsrs_[id]->on_frame(f); };
            mac_cb.link_failure = [this, id](NodeId next, const Frame& f) {
                dsrs_[id]->on_link_failure(next, f);
            };
            mac_cb.frame_dropped = [this](const Frame& f, DropCause cause) {
                // Queue overflow is terminal for a payload packet; a retry
                // drop is attributed by the routing layer as a link break.
                if (f.kind == FrameKind::Data && cause == DropCause::Ifq)
                    ledger_.dropped(f.packet_id, DropCause::Ifq);
            };
            macs_.push_back(
                std::make_unique<MacEntity>(id, cfg_.mac, *envs_[id], std::move(mac_cb), observer));
            DsrCallbacks dsr_cb;
            dsr_cb.mac_enqueue = [this, id](Frame f) { macs_[id]->enqueue(std::move(f)); };
            dsr_cb.packet_delivered = [this](PacketId p) { ledger_.delivered(p); };
            dsr_cb.packet_dropped = [this](PacketId p, DropCause c) { ledger_.dropped(p, c); };
            dsrs_.push_back(
                std::make_unique<DsrEntity>(id, cfg_.dsr, *envs_[id], std::move(dsr_cb), observer));
            channel_->attach(id, macs_[id].get());
        }
    }

    MetricsReport run() {
        for (auto [src, dst] : connections_) {
            double start = rng_.uniform(0.0, cfg_.traffic_start_window);
            if (start >= cfg_.sim_duration) continue;
            queue_.at(start, [this, src = src, dst = dst] { traffic_tick(src, dst); });
        }
        queue_.at(cfg_.sim_duration, [] {});  // marker; the queue then drains
        queue_.run_all();
        for (const auto& mac : macs_) {
            if (mac->queue_length() != 0)
                throw std::logic_error("simulation drained with frames still queued");
        }
        return report();
    }

private:
    class NodeEnvImpl : public MacEnv {
    public:
        NodeEnvImpl(Simulation* sim, NodeId id) : sim_(sim), id_(id) {}
        double now() const override { return sim_->queue_.now(); }
        void schedule(double delay, std::function<void()> fn) override {
            sim_->queue_.in(delay, std::move(fn));
        }
        bool physical_carrier_busy() const override {
            return sim_->channel_->physical_busy(id_);
        }
        void start_transmission(const Frame& frame) override {
            sim_->channel_->start_transmission(id_, frame);
        }
        Rng& rng() override { return sim_->rng_; }
        uint64_t next_frame_uid() override { return ++sim_->next_uid_; }

    private:
        Simulation* sim_;
        NodeId id_;
    };

    void traffic_tick(NodeId src, NodeId dst) {
        if (queue_.now() >= cfg_.sim_duration) return;
        PacketId pid = ++next_packet_;
        ledger_.originated(pid);
        dsrs_[src]->originate(dst, pid, cfg_.payload_bytes);
        queue_.in(1.0 / cfg_.cbr_rate, [this, src, dst] { traffic_tick(src, dst); });
    }

    MetricsReport report() const {
        MetricsReport r;
        r.n_sent = ledger_.sent;
        r.n_recvd = ledger_.recvd;
        r.data_drops = ledger_.drops;
        r.unaccounted = ledger_.open.size();
        r.frame_drops.subthreshold = channel_->counters().subthreshold;
        r.frame_drops.collision = channel_->counters().collision;
        for (const auto& mac : macs_) {
            r.frame_drops.ifq += mac->counters().drop_ifq;
            r.frame_drops.retry += mac->counters().drop_retry;
            r.mac_tx_frames += mac->counters().tx_frames;
            r.mac_acked += mac->counters().acked;
        }
        for (const auto& dsr : dsrs_) {
            const DsrCounters& c = dsr->counters();
            r.discoveries += c.discoveries;
            r.rreq_sent += c.rreq_sent;
            r.rreq_recv += c.rreq_recv;
            r.rrep_sent += c.rrep_sent;
            r.rrep_recv += c.rrep_recv;
            r.rerr_sent += c.rerr_sent;
            r.rerr_recv += c.rerr_recv;
        }
        return r;
    }

    ScenarioConfig cfg_;
    Rng rng_;
    EventQueue queue_;
    std::unique_ptr<Channel> channel_;
    std::vector<std::unique_ptr<NodeEnvImpl>> envs_;
    std::vector<std::unique_ptr<MacEntity>> macs_;
    std::vector<std::unique_ptr<DsrEntity>> dsrs_;
    std::vector<std::pair<NodeId, NodeId>> connections_;
    PacketLedger ledger_;
    uint64_t next_uid_ = 0;
    PacketId next_packet_ = 0;
};

}  // namespace

std::vector<Vec2> generate_topology(const ScenarioConfig& config) {
    config.validate();
    Rng rng(config.seed);
    return draw_positions(rng, config);
}

std::vector<ScenarioConfig> scenario_suite() {
    const std::array<std::pair<std::pair<double, double>, int>, 8> table{{
        {{400.0, 300.0}, 30},
        {{400.0, 400.0}, 40},
        {{500.0, 400.0}, 50},
        {{500.0, 500.0}, 62},
        {{600.0, 500.0}, 75},
        {{600.0, 600.0}, 90},
        {{700.0, 600.0}, 105},
        {{700.0, 700.0}, 122},
    }};
    std::vector<ScenarioConfig> out;
    out.reserve(table.size());
    for (const auto& [dims, nodes] : table) {
        ScenarioConfig cfg;
        cfg.region = RectRegion(dims.first, dims.second);
        cfg.node_count = nodes;
        out.push_back(std::move(cfg));
    }
    return out;
}

MetricsReport run(const ScenarioConfig& config, SimObserver* observer) {
    Simulation sim(config, observer);
    return sim.run();
}

ReplicatedReport run_replicated(const ScenarioConfig& config, int n_seeds,
                                unsigned max_threads) {
    if (n_seeds < 1) throw std::invalid_argument("run_replicated: n_seeds must be >= 1");
    config.validate();
    ReplicatedReport agg;
    agg.runs.resize(n_seeds);

    unsigned hw = std::thread::hardware_concurrency();
    unsigned workers = max_threads == 0 ? (hw == 0 ? 1 : hw) : max_threads;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n_seeds));

    std::atomic<int> next{0};
    auto work = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n_seeds) return;
            ScenarioConfig cfg = config;
            cfg.seed = derive_seed(config.seed, static_cast<uint64_t>(i));
            agg.runs[i] = run(cfg);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }

    double mean = 0.0;
    for (const auto& r : agg.runs) mean += r.delivery_ratio();
    mean /= n_seeds;
    double var = 0.0;
    for (const auto& r : agg.runs) {
        double d = r.delivery_ratio() - mean;
        var += d * d;
    }
    agg.delivery_mean = mean;
    agg.delivery_std = n_seeds > 1 ? std::sqrt(var / (n_seeds - 1)) : 0.0;
    return agg;
}

}  // namespace manet
