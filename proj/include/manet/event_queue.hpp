#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace manet {

/// Discrete-event scheduler. Events run in (timestamp, insertion sequence)
/// order; the sequence counter makes same-time ordering deterministic.
class EventQueue {
public:
    using Handler = std::function<void()>;

    double now() const { return now_; }
    size_t pending() const { return heap_.size(); }

    void at(double t, Handler fn) {
        assert(t >= now_ && "event scheduled in the past");
        heap_.push_back(Item{t, next_seq_++, std::move(fn)});
        std::push_heap(heap_.begin(), heap_.end(), Later{});
    }

    void in(double delay, Handler fn) { at(now_ + delay, std::move(fn)); }

    /// Execute the earliest event. Returns false when the queue is empty.
    bool step() {
        if (heap_.empty()) return false;
        std::pop_heap(heap_.begin(), heap_.end(), Later{});
        Item item = std::move(heap_.back());
        heap_.pop_back();
        now_ = item.t;
        item.fn();
        return true;
    }

    void run_all() {
        while (step()) {}
    }

private:
    struct Item {
        double t;
        uint64_t seq;
        Handler fn;
    };
    struct Later {  // max-heap comparator inverted into earliest-first
        bool operator()(const Item& a, const Item& b) const {
            return a.t != b.t ? a.t > b.t : a.seq > b.seq;
        }
    };

    std::vector<Item> heap_;
    double now_ = 0.0;
    uint64_t next_seq_ = 0;
};

}  // namespace manet
