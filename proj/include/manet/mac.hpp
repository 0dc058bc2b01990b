#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <unordered_set>

#include "manet/env.hpp"
#include "manet/observer.hpp"
#include "manet/types.hpp"

namespace manet {

/// Distributed-coordination-function timing and limits. Defaults are the
/// classic DSSS values: 20 us slots, SIFS 10 us, DIFS 50 us, 2 Mb/s.
struct MacParams {
    double slot_time = 20e-6;
    double sifs = 10e-6;
    double difs = 50e-6;
    int cw_min = 31;
    int cw_max = 1023;
    int long_retry_limit = 7;
    int short_retry_limit = 7;
    double data_rate_bps = 2e6;
    uint32_t rts_threshold_bytes = 0;  // unicast payloads at or above this use RTS/CTS
    size_t queue_capacity = 50;
    double phy_overhead_s = 192e-6;    // preamble and header time per frame

    static constexpr uint32_t kRtsBytes = 20;
    static constexpr uint32_t kCtsBytes = 14;
    static constexpr uint32_t kAckBytes = 14;

    void validate() const;

    double tx_time_for_bytes(uint32_t bytes) const {
        return phy_overhead_s + bytes * 8.0 / data_rate_bps;
    }
    double cts_time() const { return tx_time_for_bytes(kCtsBytes); }
    double ack_time() const { return tx_time_for_bytes(kAckBytes); }
    /// Response window after a transmitted RTS or DATA: SIFS, the response
    /// itself, and two slots of slack for propagation.
    double response_timeout(double response_tx_time) const {
        return sifs + response_tx_time + 2.0 * slot_time;
    }
};

struct MacCounters {
    uint64_t drop_ifq = 0;    // queue overflow at enqueue
    uint64_t drop_retry = 0;  // attempts exhausted
    uint64_t tx_frames = 0;   // transmissions started, all kinds
    uint64_t acked = 0;       // unicast exchanges completed
};

struct MacCallbacks {
    /// Decoded frame addressed to (or broadcast at) this node, after
    /// duplicate filtering; Data and routing kinds only.
    std::function<void(const Frame&)> deliver_up;
    /// Retry limit exhausted on a unicast frame to next_hop.
    std::function<void(NodeId next_hop, const Frame&)> link_failure;
    /// Frame discarded by the MAC itself (queue overflow or retry limit).
    std::function<void(const Frame&, DropCause)> frame_dropped;
};

/// Per-node CSMA/CA state machine: physical and virtual carrier sensing,
/// DIFS deferral, binary exponential backoff, the RTS/CTS/DATA/ACK unicast
/// exchange, NAV maintenance, and retry accounting.
///
/// One retry counter bounded by long_retry_limit covers the whole exchange:
/// both CTS and ACK timeouts advance it, so the limit is the total number of
/// rounds spent on one frame.
class MacEntity {
public:
    MacEntity(NodeId id, const MacParams& params, MacEnv& env, MacCallbacks callbacks,
              SimObserver* observer = nullptr);

    /// Queue a frame for transmission. Sets uid and tx_time. Full queue
    /// drops the frame with DropCause::Ifq.
    void enqueue(Frame frame);

    /// A frame decoded at this node's position (threshold met, no collision).
    /// Frames for other destinations only update the NAV.
    void on_frame_received(const Frame& frame);

    /// Poke from the host whenever physical channel activity may have
    /// changed (arrival start or end, own transmitter start or stop).
    void on_channel_activity();

    /// Virtual or physical carrier sense result at time now.
    bool medium_busy() const;

    NodeId id() const { return id_; }
    const MacParams& params() const { return params_; }
    const MacCounters& counters() const { return counters_; }
    double nav_expiry() const { return nav_expiry_; }
    int contention_window() const { return cw_; }
    int retry_count() const { return retry_; }
    size_t queue_length() const { return queue_.size(); }
    bool idle() const;

private:
    enum class AccessStage : uint8_t { None, WaitIdle, Difs, Count };
    enum class Exchange : uint8_t { None, TxRts, TxData, TxBroadcast, TxResponse,
                                    AwaitCts, AwaitAck, SifsData };

    void start_access(bool fresh);
    void on_difs_elapsed();
    void on_backoff_elapsed();
    void draw_backoff();
    void pause_access();
    void transmit_head();
    void send_frame(Frame frame, Exchange role);
    void on_own_tx_end(Exchange role);
    void arm_response_timeout(double window);
    void on_response_timeout();
    void finish_frame();
    void set_nav(double until);
    void schedule_response(Frame frame);
    double data_exchange_duration(const Frame& data) const;
    bool wants_rts(const Frame& frame) const;

    NodeId id_;
    MacParams params_;
    MacEnv& env_;
    MacCallbacks cb_;
    SimObserver* observer_;

    std::deque<Frame> queue_;
    AccessStage stage_ = AccessStage::None;
    Exchange exchange_ = Exchange::None;
    bool backoff_drawn_ = false;
    int backoff_slots_ = 0;
    double count_start_ = 0.0;
    uint64_t access_gen_ = 0;    // invalidates DIFS/backoff timers
    uint64_t response_gen_ = 0;  // invalidates CTS/ACK timeouts
    int cw_;
    int retry_ = 0;
    double nav_expiry_ = 0.0;
    bool transmitting_ = false;
    bool last_busy_ = false;
    MacCounters counters_;
    std::unordered_set<uint64_t> delivered_uids_;  // duplicate filter for re-sent unicasts
};

}  // namespace manet
