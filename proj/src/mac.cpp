#include "manet/mac.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace manet {

void MacParams::validate() const {
    if (!(sifs > 0.0) || !(difs > sifs))
        throw std::invalid_argument("MacParams: require difs > sifs > 0");
    if (std::fabs(difs - (sifs + 2.0 * slot_time)) > 1e-12)
        throw std::invalid_argument("MacParams: require difs = sifs + 2*slot_time");
    if (cw_min > cw_max) throw std::invalid_argument("MacParams: cw_min must be <= cw_max");
    if (long_retry_limit < 1)
        throw std::invalid_argument("MacParams: long_retry_limit must be >= 1");
    if (!(data_rate_bps > 0.0))
        throw std::invalid_argument("MacParams: data_rate_bps must be positive");
    if (queue_capacity < 1) throw std::invalid_argument("MacParams: queue_capacity must be >= 1");
}

MacEntity::MacEntity(NodeId id, const MacParams& params, MacEnv& env, MacCallbacks callbacks,
                     SimObserver* observer)
    : id_(id), params_(params), env_(env), cb_(std::move(callbacks)), observer_(observer),
      cw_(params.cw_min) {
    params_.validate();
}

bool MacEntity::medium_busy() const {
    return transmitting_ || env_.physical_carrier_busy() || env_.now() < nav_expiry_;
}

bool MacEntity::idle() const {
    return stage_ == AccessStage::None && exchange_ == Exchange::None && queue_.empty() &&
           !transmitting_;
}

bool MacEntity::wants_rts(const Frame& frame) const {
    return frame.payload_bytes >= params_.rts_threshold_bytes;
}

double MacEntity::data_exchange_duration(const Frame& data) const {
    // Remaining exchange reserved by an RTS: CTS + DATA + ACK and the three
    // SIFS gaps between them.
    return 3.0 * params_.sifs + params_.cts_time() + data.tx_time + params_.ack_time();
}

void MacEntity::enqueue(Frame frame) {
    if (queue_.size() >= params_.queue_capacity) {
        ++counters_.drop_ifq;
        if (cb_.frame_dropped) cb_.frame_dropped(frame, DropCause::Ifq);
        return;
    }
    frame.uid = env_.next_frame_uid();
    frame.src = id_;
    frame.tx_time = params_.tx_time_for_bytes(frame.payload_bytes);
    queue_.push_back(std::move(frame));
    if (stage_ == AccessStage::None && exchange_ == Exchange::None && !transmitting_)
        start_access(/*fresh=*/true);
}

// ---------------------------------------------------------------------------
// Channel access: DIFS deferral and backoff counting.
//
// A frame arriving at an idle MAC with an idle medium transmits after one
// uninterrupted DIFS with no backoff. Any busy observation, a retry, or a
// queued successor forces a drawn backoff which then counts down one slot
// per idle slot, freezing while the medium is busy and resuming only after
// the medium has again been idle for DIFS.
// ---------------------------------------------------------------------------

void MacEntity::start_access(bool fresh) {
    assert(stage_ == AccessStage::None);
    assert(!queue_.empty());
    (void)fresh;
    if (medium_busy()) {
        if (!backoff_drawn_) draw_backoff();
        stage_ = AccessStage::WaitIdle;
        last_busy_ = true;
        return;
    }
    // The immediate DIFS-then-transmit path requires a medium that was
    // already idle when the frame arrived. If the busy-to-idle edge lands on
    // this same instant (typical for a frame enqueued while handling a
    // reception), the access owes a backoff; otherwise every node that heard
    // the same transmission would fire in the same slot and their forwarded
    // frames would collide forever.
    if (last_busy_ && !backoff_drawn_) draw_backoff();
    stage_ = AccessStage::Difs;
    uint64_t gen = ++access_gen_;
    env_.schedule(params_.difs, [this, gen] {
        if (gen == access_gen_ && stage_ == AccessStage::Difs) on_difs_elapsed();
    });
}

void MacEntity::draw_backoff() {
    backoff_slots_ = static_cast<int>(env_.rng().bounded(static_cast<uint64_t>(cw_) + 1));
    backoff_drawn_ = true;
}

void MacEntity::on_difs_elapsed() {
    if (!backoff_drawn_ || backoff_slots_ == 0) {
        transmit_head();
        return;
    }
    stage_ = AccessStage::Count;
    count_start_ = env_.now();
    uint64_t gen = ++access_gen_;
    env_.schedule(backoff_slots_ * params_.slot_time, [this, gen] {
        if (gen == access_gen_ && stage_ == AccessStage::Count) on_backoff_elapsed();
    });
}

void MacEntity::on_backoff_elapsed() {
    backoff_slots_ = 0;
    transmit_head();
}

void MacEntity::pause_access() {
    switch (stage_) {
        case AccessStage::Difs:
            ++access_gen_;
            stage_ = AccessStage::WaitIdle;
            // An interrupted initial DIFS means the medium was seen busy, so
            // this access now owes a backoff.
            if (!backoff_drawn_) draw_backoff();
            break;
        case AccessStage::Count: {
            double elapsed = env_.now() - count_start_;
            int whole_slots = static_cast<int>(std::floor(elapsed / params_.slot_time + 1e-9));
            backoff_slots_ -= whole_slots;
            if (backoff_slots_ < 0) backoff_slots_ = 0;
            ++access_gen_;
            stage_ = AccessStage::WaitIdle;
            break;
        }
        default:
            break;
    }
}

void MacEntity::on_channel_activity() {
    bool busy = medium_busy();
    if (busy == last_busy_) return;
    last_busy_ = busy;
    if (busy) {
        pause_access();
    } else if (stage_ == AccessStage::WaitIdle) {
        stage_ = AccessStage::Difs;
        uint64_t gen = ++access_gen_;
        env_.schedule(params_.difs, [this, gen] {
            if (gen == access_gen_ && stage_ == AccessStage::Difs) on_difs_elapsed();
        });
    }
}

// ---------------------------------------------------------------------------
// Transmission paths.
// ---------------------------------------------------------------------------

void MacEntity::transmit_head() {
    assert(!queue_.empty());
    if (observer_) observer_->tx_started(id_, medium_busy());
    stage_ = AccessStage::None;
    const Frame& head = queue_.front();
    if (head.dst == kBroadcast) {
        send_frame(head, Exchange::TxBroadcast);
        return;
    }
    if (wants_rts(head)) {
        Frame rts;
        rts.kind = FrameKind::Rts;
        rts.src = id_;
        rts.dst = head.dst;
        rts.uid = env_.next_frame_uid();
        rts.payload_bytes = MacParams::kRtsBytes;
        rts.tx_time = params_.tx_time_for_bytes(MacParams::kRtsBytes);
        rts.duration_field = data_exchange_duration(head);
        send_frame(std::move(rts), Exchange::TxRts);
        return;
    }
    Frame data = head;
    data.duration_field = params_.sifs + params_.ack_time();
    send_frame(std::move(data), Exchange::TxData);
}

void MacEntity::send_frame(Frame frame, Exchange role) {
    if (role != Exchange::TxResponse) exchange_ = role;
    transmitting_ = true;
    ++counters_.tx_frames;
    env_.start_transmission(frame);
    env_.schedule(frame.tx_time, [this, role] {
        transmitting_ = false;
        on_own_tx_end(role);
        on_channel_activity();
    });
    on_channel_activity();  // own carrier counts as busy for the access logic
}

void MacEntity::on_own_tx_end(Exchange role) {
    switch (role) {
        case Exchange::TxRts:
            exchange_ = Exchange::AwaitCts;
            arm_response_timeout(params_.response_timeout(params_.cts_time()));
            break;
        case Exchange::TxData:
            exchange_ = Exchange::AwaitAck;
            arm_response_timeout(params_.response_timeout(params_.ack_time()));
            break;
        case Exchange::TxBroadcast:
            // Broadcasts are one-shot: no CTS, no ACK, no retries.
            queue_.pop_front();
            finish_frame();
            break;
        default:
            // A response transmission may have blocked a frame that arrived
            // while the radio was talking; restart access for it.
            if (exchange_ == Exchange::None && stage_ == AccessStage::None && !queue_.empty())
                start_access(/*fresh=*/false);
            break;
    }
}

void MacEntity::arm_response_timeout(double window) {
    uint64_t gen = ++response_gen_;
    env_.schedule(window, [this, gen] {
        if (gen != response_gen_) return;
        if (exchange_ == Exchange::AwaitCts || exchange_ == Exchange::AwaitAck)
            on_response_timeout();
    });
}

void MacEntity::on_response_timeout() {
    ++retry_;
    if (observer_) observer_->retry_changed(id_, retry_, params_.long_retry_limit);
    if (retry_ >= params_.long_retry_limit) {
        ++counters_.drop_retry;
        Frame failed = std::move(queue_.front());
        queue_.pop_front();
        if (cb_.frame_dropped) cb_.frame_dropped(failed, DropCause::Retry);
        finish_frame();
        if (cb_.link_failure) cb_.link_failure(failed.dst, failed);
        return;
    }
    int next_cw = std::min(2 * (cw_ + 1) - 1, params_.cw_max);
    if (observer_) observer_->cw_changed(id_, cw_, next_cw, params_.cw_max);
    cw_ = next_cw;
    draw_backoff();
    exchange_ = Exchange::None;
    stage_ = AccessStage::None;
    start_access(/*fresh=*/false);
}

void MacEntity::finish_frame() {
    exchange_ = Exchange::None;
    stage_ = AccessStage::None;
    retry_ = 0;
    if (cw_ != params_.cw_min && observer_)
        observer_->cw_changed(id_, cw_, params_.cw_min, params_.cw_max);
    cw_ = params_.cw_min;
    backoff_drawn_ = false;
    backoff_slots_ = 0;
    if (!queue_.empty()) {
        // Post-frame backoff: successive frames from the same node always
        // contend, which keeps one station from capturing the channel.
        draw_backoff();
        start_access(/*fresh=*/false);
    }
}

// ---------------------------------------------------------------------------
// Reception.
// ---------------------------------------------------------------------------

void MacEntity::set_nav(double until) {
    double before = nav_expiry_;
    if (until > nav_expiry_) nav_expiry_ = until;
    if (observer_) observer_->nav_updated(id_, before, nav_expiry_);
    if (nav_expiry_ > env_.now())
        env_.schedule(nav_expiry_ - env_.now(), [this] { on_channel_activity(); });
    on_channel_activity();
}

void MacEntity::schedule_response(Frame frame) {
    env_.schedule(params_.sifs, [this, frame = std::move(frame)] {
        // SIFS responses ignore carrier sense, but one radio cannot start a
        // second transmission.
        if (transmitting_) return;
        send_frame(frame, Exchange::TxResponse);
    });
}

void MacEntity::on_frame_received(const Frame& frame) {
    bool for_me = frame.dst == id_;
    switch (frame.kind) {
        case FrameKind::Rts: {
            if (for_me) {
                // Respond only when the virtual carrier allows it; a silent
                // station leaves the RTS sender to time out and retry.
                if (env_.now() >= nav_expiry_ && !transmitting_) {
                    Frame cts;
                    cts.kind = FrameKind::Cts;
                    cts.src = id_;
                    cts.dst = frame.src;
                    cts.uid = env_.next_frame_uid();
                    cts.payload_bytes = MacParams::kCtsBytes;
                    cts.tx_time = params_.cts_time();
                    cts.duration_field =
                        std::max(0.0, frame.duration_field - params_.sifs - params_.cts_time());
                    schedule_response(std::move(cts));
                }
            } else {
                set_nav(env_.now() + frame.duration_field);
            }
            break;
        }
        case FrameKind::Cts: {
            if (for_me) {
                if (exchange_ == Exchange::AwaitCts) {
                    ++response_gen_;  // cancel the CTS timeout
                    exchange_ = Exchange::SifsData;
                    env_.schedule(params_.sifs, [this] {
                        if (exchange_ != Exchange::SifsData) return;
                        if (transmitting_) {
                            // Radio already busy with a response duty; treat
                            // this round as failed rather than deadlocking.
                            on_response_timeout();
                            return;
                        }
                        Frame data = queue_.front();
                        data.duration_field = params_.sifs + params_.ack_time();
                        send_frame(std::move(data), Exchange::TxData);
                    });
                }
            } else {
                set_nav(env_.now() + frame.duration_field);
            }
            break;
        }
        case FrameKind::Ack: {
            if (for_me) {
                if (exchange_ == Exchange::AwaitAck) {
                    ++response_gen_;
                    ++counters_.acked;
                    queue_.pop_front();
                    finish_frame();
                }
            } else {
                set_nav(env_.now() + frame.duration_field);
            }
            break;
        }
        default: {  // Data and routing payloads
            if (frame.dst == kBroadcast) {
                if (cb_.deliver_up) cb_.deliver_up(frame);
            } else if (for_me) {
                Frame ack;
                ack.kind = FrameKind::Ack;
                ack.src = id_;
                ack.dst = frame.src;
                ack.uid = env_.next_frame_uid();
                ack.payload_bytes = MacParams::kAckBytes;
                ack.tx_time = params_.ack_time();
                schedule_response(std::move(ack));
                // A retransmission after a lost ACK must be re-acknowledged
                // but not delivered upward twice.
                if (delivered_uids_.insert(frame.uid).second) {
                    if (cb_.deliver_up) cb_.deliver_up(frame);
                }
            } else {
                set_nav(env_.now() + frame.duration_field);
            }
            break;
        }
    }
}

}  // namespace manet
