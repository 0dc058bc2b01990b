#pragma once

#include <functional>

#include "manet/rng.hpp"
#include "manet/types.hpp"

namespace manet {

/// Clock and timer services a protocol entity gets from its host.
class SchedulerEnv {
public:
    virtual ~SchedulerEnv() = default;
    virtual double now() const = 0;
    virtual void schedule(double delay, std::function<void()> fn) = 0;
};

/// Full per-node environment for the MAC: timers plus the radio.
class MacEnv : public SchedulerEnv {
public:
    /// Physical carrier sense at this node: any in-flight energy at or above
    /// the carrier-sense threshold, or the node's own transmitter running.
    virtual bool physical_carrier_busy() const = 0;

    /// Put a frame on the air. The caller has already stamped tx_time.
    virtual void start_transmission(const Frame& frame) = 0;

    virtual Rng& rng() = 0;
    virtual uint64_t next_frame_uid() = 0;
};

}  // namespace manet
