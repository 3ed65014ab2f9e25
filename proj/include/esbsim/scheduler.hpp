#pragma once

#include "esbsim/sim_time.hpp"

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace esbsim {

/// Raised on contract violations inside the engine (scheduling in the
/// past, dispatch at the wrong clock). These are simulator bugs, never
/// model outcomes, so they abort the run.
class SimFault : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct EventHandle {
    std::uint64_t seq = 0;
};

/// Deterministic discrete-event scheduler. Events fire in strict
/// (fire_at, insertion seq) order; ties break by insertion order.
class Scheduler {
public:
    using Action = std::function<void()>;

    SimTime now() const { return now_; }

    /// Enqueue an action at an absolute time. Scheduling in the past is a
    /// hard fault. The handle cancels the event (exact: a cancelled
    /// handle never fires).
    EventHandle schedule(SimTime fire_at, Action action) {
        if (fire_at < now_) {
            throw SimFault("schedule: fire_at precedes current clock");
        }
        std::uint64_t seq = next_seq_++;
        queue_.push(Entry{fire_at, seq});
        pending_.emplace(seq, std::move(action));
        return EventHandle{seq};
    }

    EventHandle schedule_in(std::uint64_t delta_us, Action action) {
        return schedule(now_ + delta_us, std::move(action));
    }

    void cancel(EventHandle h) { pending_.erase(h.seq); }

    bool is_pending(EventHandle h) const { return pending_.count(h.seq) != 0; }

    /// Dispatch every event with fire_at <= t_end, then settle the clock
    /// at t_end. Returns the number of dispatched events. Handlers may
    /// schedule further events, including at the current instant.
    std::uint64_t run_until(SimTime t_end) {
        if (t_end < now_) {
            throw SimFault("run_until: t_end precedes current clock");
        }
        std::uint64_t dispatched = 0;
        while (!queue_.empty() && queue_.top().fire_at <= t_end) {
            Entry e = queue_.top();
            queue_.pop();
            auto it = pending_.find(e.seq);
            if (it == pending_.end()) {
                continue; // cancelled
            }
            Action action = std::move(it->second);
            pending_.erase(it);
            now_ = e.fire_at;
            action();
            ++dispatched;
        }
        now_ = t_end;
        return dispatched;
    }

    /// Run until the queue drains completely (used to flush pipelines at
    /// the end of a scenario).
    std::uint64_t run_all() {
        std::uint64_t dispatched = 0;
        while (!queue_.empty()) {
            Entry e = queue_.top();
            queue_.pop();
            auto it = pending_.find(e.seq);
            if (it == pending_.end()) continue;
            Action action = std::move(it->second);
            pending_.erase(it);
            now_ = e.fire_at;
            action();
            ++dispatched;
        }
        return dispatched;
    }

    bool empty() const { return pending_.empty(); }

private:
    struct Entry {
        SimTime fire_at;
        std::uint64_t seq;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.fire_at.us != b.fire_at.us) return a.fire_at.us > b.fire_at.us;
            return a.seq > b.seq;
        }
    };

    SimTime now_{0};
    std::uint64_t next_seq_ = 0;
    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    std::unordered_map<std::uint64_t, Action> pending_;
};

} // namespace esbsim
