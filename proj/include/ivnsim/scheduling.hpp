// Schedule data model and evaluation.
//
// A schedule fixes, per task, the computing unit, the forward path and the
// return path. Evaluation replays the whole batch on a shared timeline:
//
//   * wired links carry one transmission at a time; a transmission takes
//     the earliest free interval at or after its ready time,
//   * wireless hops book the full resource set of their band for a
//     contiguous run of slots (earliest fit), with per-slot fading and
//     per-slot delivery trials,
//   * computing units serve queued tasks one at a time under a configurable
//     discipline (deadline order by default).
//
// The reported per-task times decompose exactly as
//   total = t_comm_forward + t_unit + t_comm_return
// where t_unit covers both queue wait and execution at the unit.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ivnsim/channel.hpp"
#include "ivnsim/topology.hpp"
#include "ivnsim/types.hpp"
#include "ivnsim/workload.hpp"

namespace ivnsim {

enum class SchedulerKind { Deterministic, Minimum, Shortest, Baseline };

inline const char* to_string(SchedulerKind k) {
    switch (k) {
        case SchedulerKind::Deterministic: return "deterministic";
        case SchedulerKind::Minimum: return "minimum";
        case SchedulerKind::Shortest: return "shortest";
        case SchedulerKind::Baseline: return "baseline";
    }
    return "?";
}

// How a computing unit orders queued tasks.
//   None: no contention, tasks execute on arrival (pure model timing).
//   Fifo: arrival order.
//   Edf:  earliest absolute deadline first, non-preemptive.
enum class UnitQueueDiscipline { None, Fifo, Edf };

struct SimOptions {
    UnitQueueDiscipline discipline = UnitQueueDiscipline::Edf;
};

struct Assignment {
    int task_id = -1;
    NodeId unit;
    Path forward;   // origin -> unit; empty when processing locally
    Path backward;  // unit -> origin; reverse of forward
};

struct Schedule {
    std::vector<Assignment> assignments;  // index == task id
};

// One wireless reservation: a run of slots on every resource of a band.
struct ResourceBooking {
    int task_id = -1;
    int link_id = -1;
    BandId band;
    int first_resource = 0;
    int resource_count = 0;
    std::int64_t start_slot = 0;
    std::int64_t slot_count = 0;
    std::int64_t retransmission_slots = 0;
};

// One serialized occupancy of a wired link.
struct WiredUse {
    int task_id = -1;
    int link_id = -1;
    double start_s = 0.0;
    double end_s = 0.0;
};

struct EvaluatedTask {
    int task_id = -1;
    NodeId unit;
    double t_comm_forward = 0.0;
    double t_unit = 0.0;  // queue wait + execution
    double t_comm_return = 0.0;
    double total = 0.0;
    double unit_wait = 0.0;
    double exec = 0.0;
    bool satisfied = false;
    bool comm_failed = false;  // ran out of slots before delivery
    double selected_reliability = 1.0;  // product over the distinct links used
    double forward_distance = 0.0;
};

struct EvaluatedSchedule {
    std::vector<EvaluatedTask> tasks;
    std::vector<double> used_cycles;  // aligned with Topology::compute_specs
    std::vector<ResourceBooking> bookings;
    std::vector<WiredUse> wired_uses;
    bool all_comm_completed = true;
};

// Execution time of a task on a unit (no contention).
inline double processing_time(const Task& task, const ComputeSpec& spec) {
    if (spec.speed_hz <= 0) throw std::invalid_argument("unit speed must be positive");
    return task.compute_cycles / spec.speed_hz;
}

// Deadline-miss penalty. On time, the penalty is the unreliability of the
// selected link set; past the deadline it saturates at 1.
inline double penalty_beta(double deadline_ratio, double selected_reliability) {
    if (deadline_ratio > 1.0) return 1.0;
    return 1.0 - selected_reliability;
}

// ---------------------------------------------------------------------------
// Evaluation context: channel realization plus per-slot rate cache. One
// context serves many schedule evaluations of the same scenario (the cache
// is what makes solver loops cheap). Not thread-safe; use one per worker.
// ---------------------------------------------------------------------------

class EvalContext {
public:
    EvalContext(const Topology& topo, const ChannelConfig& channel, FadingProcess fading,
                DeliveryRng delivery, SimOptions options = {})
        : topo_(&topo), channel_(&channel), fading_(fading), delivery_(delivery),
          options_(options) {
        for (int b = 0; b < kBandCount; ++b) {
            const BandPlan& plan = channel.band_plans.at(b);
            std::vector<int> rs(plan.resource_count);
            for (int r = 0; r < plan.resource_count; ++r) rs[r] = r;
            full_band_[b] = std::move(rs);
        }
    }

    const Topology& topo() const { return *topo_; }
    const ChannelConfig& channel() const { return *channel_; }
    const FadingProcess& fading() const { return fading_; }
    const DeliveryRng& delivery() const { return delivery_; }
    const SimOptions& options() const { return options_; }
    std::span<const int> full_band(BandId band) const { return full_band_[band.array_index()]; }

    // Bits the link moves in one slot over the full band (before delivery).
    double slot_bits_cached(const Link& link, std::int64_t slot) {
        std::vector<double>& per_slot = cache_[link.id];
        while (static_cast<std::int64_t>(per_slot.size()) <= slot) {
            std::int64_t s = static_cast<std::int64_t>(per_slot.size());
            per_slot.push_back(slot_bits(channel_->plan(link.band), link.id,
                                         full_band(link.band), fading_, s, channel_->ber));
        }
        return per_slot[static_cast<std::size_t>(slot)];
    }

private:
    const Topology* topo_;
    const ChannelConfig* channel_;
    FadingProcess fading_;
    DeliveryRng delivery_;
    SimOptions options_;
    std::vector<int> full_band_[kBandCount];
    std::unordered_map<int, std::vector<double>> cache_;
};

namespace detail {

// First fit on a wired link: earliest interval of length dur starting at or
// after ready. Intervals are kept sorted by start.
inline double book_wired_interval(std::vector<std::pair<double, double>>& busy, double ready,
                                  double dur) {
    double cand = ready;
    std::size_t pos = 0;
    for (; pos < busy.size(); ++pos) {
        if (cand + dur <= busy[pos].first) break;
        cand = std::max(cand, busy[pos].second);
    }
    busy.insert(busy.begin() + pos, {cand, cand + dur});
    return cand;
}

struct WirelessBookingResult {
    bool completed = false;
    std::int64_t start_slot = 0;
    std::int64_t slots = 0;
    std::int64_t retx = 0;
};

// Earliest contiguous run of free slots on the band, at or after
// ready_slot, in which the transmission finishes. The slot count depends on
// the fading realization inside the candidate window, so each candidate
// window is stepped slot by slot until the bits fit or the window closes.
inline WirelessBookingResult book_wireless(EvalContext& ctx,
                                           std::vector<std::pair<std::int64_t, std::int64_t>>& busy,
                                           const Link& link, double bits, std::int64_t ready_slot) {
    const std::int64_t horizon = ctx.channel().max_slots;
    auto try_window = [&](std::int64_t from, std::int64_t until,
                          WirelessBookingResult& out) -> bool {
        double acc = 0.0;
        out.start_slot = from;
        out.slots = 0;
        out.retx = 0;
        for (std::int64_t s = from; s < until; ++s) {
            ++out.slots;
            if (ctx.delivery().delivered(link.id, s, link.reliability)) {
                acc += ctx.slot_bits_cached(link, s);
            } else {
                ++out.retx;
            }
            if (acc >= bits) {
                out.completed = true;
                return true;
            }
        }
        return false;
    };

    WirelessBookingResult res;
    std::int64_t cand = std::max<std::int64_t>(ready_slot, 0);
    std::size_t pos = 0;
    while (true) {
        // Skip bookings that end at or before the candidate.
        while (pos < busy.size() && busy[pos].second <= cand) ++pos;
        if (pos < busy.size() && busy[pos].first <= cand) {
            cand = busy[pos].second;
            ++pos;
            continue;
        }
        std::int64_t window_end = pos < busy.size() ? busy[pos].first : horizon;
        if (cand < window_end && try_window(cand, window_end, res)) break;
        if (pos >= busy.size()) {
            // Ran off the horizon.
            res.completed = false;
            res.start_slot = cand;
            res.slots = horizon > cand ? horizon - cand : 0;
            break;
        }
        cand = busy[pos].second;
        ++pos;
    }
    if (res.completed) {
        busy.insert(std::lower_bound(busy.begin(), busy.end(),
                                     std::make_pair(res.start_slot, res.start_slot)),
                    {res.start_slot, res.start_slot + res.slots});
    }
    return res;
}

}  // namespace detail

// Replays the schedule on the shared timeline. Pure in (schedule, tasks,
// context): identical inputs give identical outputs.
inline EvaluatedSchedule evaluate_schedule(const Schedule& schedule, const std::vector<Task>& tasks,
                                           EvalContext& ctx) {
    if (schedule.assignments.size() != tasks.size()) {
        throw std::invalid_argument("one assignment per task required");
    }
    const Topology& topo = ctx.topo();
    const double slot_dur = ctx.channel().slot_duration_s;
    const double horizon_s = static_cast<double>(ctx.channel().max_slots) * slot_dur;

    EvaluatedSchedule ev;
    ev.tasks.resize(tasks.size());
    ev.used_cycles.assign(topo.compute_specs.size(), 0.0);

    // Per-task progress.
    struct Progress {
        const Path* path = nullptr;  // current direction
        std::size_t hop = 0;
        bool returning = false;
        double arrival = 0.0;
        double proc_done = 0.0;
        bool dead = false;
    };
    std::vector<Progress> prog(tasks.size());

    // Shared resource timelines.
    std::map<int, std::vector<std::pair<double, double>>> wired_busy;
    std::vector<std::pair<std::int64_t, std::int64_t>> band_busy[kBandCount];

    // Unit queues.
    struct UnitState {
        bool busy = false;
        std::vector<int> pending;  // arrived, waiting tasks
    };
    std::map<NodeId, UnitState> units;
    for (const ComputeSpec& s : topo.compute_specs) units[s.unit] = UnitState{};

    enum EvKind : int { kHopReady = 0, kArrival = 1, kProcDone = 2 };
    struct Ev {
        double t;
        int kind;
        int task;
        bool operator>(const Ev& o) const {
            if (t != o.t) return t > o.t;
            if (kind != o.kind) return kind > o.kind;
            return task > o.task;
        }
    };
    std::priority_queue<Ev, std::vector<Ev>, std::greater<Ev>> queue;

    auto slot_of = [&](double t) {
        return static_cast<std::int64_t>(std::ceil(t / slot_dur - 1e-9));
    };

    auto fail_task = [&](int id, double now) {
        Progress& p = prog[id];
        p.dead = true;
        EvaluatedTask& et = ev.tasks[id];
        et.comm_failed = true;
        ev.all_comm_completed = false;
        // The task never completes inside the horizon; charge the horizon.
        if (!p.returning) {
            et.t_comm_forward = horizon_s - tasks[id].gen_time_s;
        } else {
            et.t_comm_return = horizon_s - p.proc_done;
        }
        (void)now;
    };

    std::vector<int> unit_index_of_task(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Assignment& a = schedule.assignments[i];
        const auto& specs = topo.compute_specs;
        int idx = -1;
        for (std::size_t u = 0; u < specs.size(); ++u) {
            if (specs[u].unit == a.unit) idx = static_cast<int>(u);
        }
        if (idx < 0) throw std::invalid_argument("assignment targets a non-computing unit");
        unit_index_of_task[i] = idx;
        ev.used_cycles[idx] += tasks[i].compute_cycles;

        EvaluatedTask& et = ev.tasks[i];
        et.task_id = static_cast<int>(i);
        et.unit = a.unit;
        et.forward_distance = path_distance(a.forward);

        // Reliability over the distinct links the task uses (forward and
        // return combined; shared links count once).
        std::set<int> link_ids;
        double rel = 1.0;
        for (const Link& l : a.forward.links) {
            if (link_ids.insert(l.id).second) rel *= l.reliability;
        }
        for (const Link& l : a.backward.links) {
            if (link_ids.insert(l.id).second) rel *= l.reliability;
        }
        et.selected_reliability = rel;

        prog[i].path = &a.forward;
        queue.push(Ev{tasks[i].gen_time_s, a.forward.links.empty() ? kArrival : kHopReady,
                      static_cast<int>(i)});
    }

    auto dispatch = [&](NodeId unit, double now) {
        UnitState& st = units[unit];
        if (st.busy || st.pending.empty()) return;
        std::size_t pick = 0;
        if (ctx.options().discipline == UnitQueueDiscipline::Edf) {
            for (std::size_t j = 1; j < st.pending.size(); ++j) {
                const Task& a = tasks[st.pending[j]];
                const Task& b = tasks[st.pending[pick]];
                double da = a.gen_time_s + a.deadline_s;
                double db = b.gen_time_s + b.deadline_s;
                if (da < db || (da == db && st.pending[j] < st.pending[pick])) pick = j;
            }
        }
        // Fifo: pending is kept in arrival order already (ties by task id).
        int id = st.pending[pick];
        st.pending.erase(st.pending.begin() + pick);
        st.busy = true;
        double exec = processing_time(tasks[id], topo.compute_specs[unit_index_of_task[id]]);
        EvaluatedTask& et = ev.tasks[id];
        et.unit_wait = now - prog[id].arrival;
        et.exec = exec;
        queue.push(Ev{now + exec, kProcDone, id});
    };

    while (!queue.empty()) {
        Ev e = queue.top();
        queue.pop();
        Progress& p = prog[e.task];
        if (p.dead) continue;
        const Task& task = tasks[e.task];
        const Assignment& a = schedule.assignments[e.task];
        EvaluatedTask& et = ev.tasks[e.task];

        switch (e.kind) {
            case kHopReady: {
                const Link& link = p.path->links[p.hop];
                double bits = p.returning ? task.result_bits : task.size_bits;
                double done_t;
                if (link.medium == LinkMedium::Wired) {
                    if (bits <= 0) {
                        done_t = e.t;
                    } else {
                        double dur = wired_tx_time(bits, link.wired_rate_bps);
                        double start = detail::book_wired_interval(wired_busy[link.id], e.t, dur);
                        done_t = start + dur;
                        ev.wired_uses.push_back(WiredUse{e.task, link.id, start, done_t});
                    }
                } else {
                    auto res = detail::book_wireless(ctx, band_busy[link.band.array_index()], link,
                                                     bits, slot_of(e.t));
                    if (!res.completed) {
                        fail_task(e.task, e.t);
                        break;
                    }
                    ev.bookings.push_back(ResourceBooking{
                        e.task, link.id, link.band, 0,
                        ctx.channel().plan(link.band).resource_count, res.start_slot, res.slots,
                        res.retx});
                    done_t = static_cast<double>(res.start_slot + res.slots) * slot_dur;
                }
                ++p.hop;
                if (p.hop < p.path->links.size()) {
                    queue.push(Ev{done_t, kHopReady, e.task});
                } else if (!p.returning) {
                    queue.push(Ev{done_t, kArrival, e.task});
                } else {
                    et.t_comm_return = done_t - p.proc_done;
                    et.total = et.t_comm_forward + et.t_unit + et.t_comm_return;
                    et.satisfied = et.total <= task.deadline_s;
                }
                break;
            }
            case kArrival: {
                p.arrival = e.t;
                et.t_comm_forward = e.t - task.gen_time_s;
                if (ctx.options().discipline == UnitQueueDiscipline::None) {
                    double exec =
                        processing_time(task, topo.compute_specs[unit_index_of_task[e.task]]);
                    et.unit_wait = 0.0;
                    et.exec = exec;
                    queue.push(Ev{e.t + exec, kProcDone, e.task});
                } else {
                    units[a.unit].pending.push_back(e.task);
                    dispatch(a.unit, e.t);
                }
                break;
            }
            case kProcDone: {
                p.proc_done = e.t;
                et.t_unit = e.t - p.arrival;
                if (ctx.options().discipline != UnitQueueDiscipline::None) {
                    units[a.unit].busy = false;
                    dispatch(a.unit, e.t);
                }
                if (a.backward.links.empty()) {
                    et.t_comm_return = 0.0;
                    et.total = et.t_comm_forward + et.t_unit + et.t_comm_return;
                    et.satisfied = et.total <= task.deadline_s;
                } else {
                    p.path = &a.backward;
                    p.hop = 0;
                    p.returning = true;
                    queue.push(Ev{e.t, kHopReady, e.task});
                }
                break;
            }
        }
    }

    // Tasks whose communication ran off the horizon report the horizon as
    // their completion time and count as unsatisfied.
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (ev.tasks[i].comm_failed) {
            EvaluatedTask& et = ev.tasks[i];
            et.total = et.t_comm_forward + et.t_unit + et.t_comm_return;
            et.satisfied = false;
        }
    }
    return ev;
}

inline EvaluatedSchedule evaluate_schedule(const Schedule& schedule, const std::vector<Task>& tasks,
                                           const Topology& topo, const ChannelConfig& channel,
                                           const FadingProcess& fading, const DeliveryRng& delivery,
                                           SimOptions options = {}) {
    EvalContext ctx(topo, channel, fading, delivery, options);
    return evaluate_schedule(schedule, tasks, ctx);
}

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

// Sum of deadline-miss penalties weighted by selected-path reliability.
inline double objective_deterministic(const EvaluatedSchedule& ev, const std::vector<Task>& tasks) {
    if (ev.tasks.size() != tasks.size()) throw std::invalid_argument("evaluation/task mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        sum += penalty_beta(ev.tasks[i].total / tasks[i].deadline_s,
                            ev.tasks[i].selected_reliability);
    }
    return sum;
}

// Sum of forward-path distances; independent of channel state.
inline double objective_shortest(const Schedule& schedule) {
    double sum = 0.0;
    for (const Assignment& a : schedule.assignments) sum += path_distance(a.forward);
    return sum;
}

// Sum of total execution times.
inline double objective_minimum(const EvaluatedSchedule& ev) {
    double sum = 0.0;
    for (const EvaluatedTask& t : ev.tasks) sum += t.total;
    return sum;
}

// ---------------------------------------------------------------------------
// Static mapping: sensors offload to their zone ECU over the direct link,
// computing units process their own tasks locally.
// ---------------------------------------------------------------------------

inline Schedule baseline_schedule(const std::vector<Task>& tasks, const Topology& topo) {
    Schedule s;
    s.assignments.reserve(tasks.size());
    for (const Task& t : tasks) {
        Assignment a;
        a.task_id = t.id;
        if (t.origin.kind == NodeKind::SensorActuator) {
            NodeId ecu = NodeId::zone_ecu(t.origin.zone);
            int li = topo.direct_link(t.origin, ecu);
            if (li < 0) throw std::invalid_argument("sensor lacks a link to its zone ECU");
            a.unit = ecu;
            a.forward = Path{t.origin, ecu, {topo.links[li]}};
            a.backward = a.forward.reversed();
        } else {
            a.unit = t.origin;
            a.forward = Path{t.origin, t.origin, {}};
            a.backward = Path{t.origin, t.origin, {}};
        }
        s.assignments.push_back(std::move(a));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Constraint checking. Violations are data, not errors.
// ---------------------------------------------------------------------------

enum class ConstraintKind {
    SingleUnit,         // each task on exactly one valid computing unit
    ResourceExclusive,  // no (band, resource, slot) cell booked twice
    WiredLinkCapacity,  // wired link occupied by one transmission at a time
    ComputeCapacity,    // per-unit assigned cycles within the capacity window
};

inline const char* to_string(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::SingleUnit: return "single_unit";
        case ConstraintKind::ResourceExclusive: return "resource_exclusive";
        case ConstraintKind::WiredLinkCapacity: return "wired_link_capacity";
        case ConstraintKind::ComputeCapacity: return "compute_capacity";
    }
    return "?";
}

struct ConstraintViolation {
    ConstraintKind kind;
    std::string detail;
};

inline std::vector<ConstraintViolation> check_constraints(const Schedule& schedule,
                                                          const EvaluatedSchedule& ev,
                                                          const Topology& topo) {
    std::vector<ConstraintViolation> out;

    // Single-unit assignment, structurally valid paths.
    std::set<int> seen;
    for (const Assignment& a : schedule.assignments) {
        if (!a.unit.is_computing_unit()) {
            out.push_back({ConstraintKind::SingleUnit,
                           "task " + std::to_string(a.task_id) + " assigned to non-computing unit"});
            continue;
        }
        if (!seen.insert(a.task_id).second) {
            out.push_back({ConstraintKind::SingleUnit,
                           "task " + std::to_string(a.task_id) + " assigned more than once"});
        }
        if (!a.forward.links.empty() && a.forward.dst != a.unit) {
            out.push_back({ConstraintKind::SingleUnit,
                           "task " + std::to_string(a.task_id) + " path does not end at its unit"});
        }
    }

    // Wireless exclusivity: bookings on the same band must not overlap in
    // (resource, slot). Bookings span resource ranges, so two conflict when
    // both ranges intersect.
    std::vector<const ResourceBooking*> by_band[kBandCount];
    for (const ResourceBooking& b : ev.bookings) by_band[b.band.array_index()].push_back(&b);
    for (auto& list : by_band) {
        std::sort(list.begin(), list.end(), [](const ResourceBooking* x, const ResourceBooking* y) {
            return x->start_slot < y->start_slot;
        });
        for (std::size_t i = 0; i + 1 < list.size(); ++i) {
            for (std::size_t j = i + 1; j < list.size(); ++j) {
                const ResourceBooking& x = *list[i];
                const ResourceBooking& y = *list[j];
                if (y.start_slot >= x.start_slot + x.slot_count) break;
                bool res_overlap = x.first_resource < y.first_resource + y.resource_count &&
                                   y.first_resource < x.first_resource + x.resource_count;
                if (res_overlap) {
                    out.push_back({ConstraintKind::ResourceExclusive,
                                   "band " + x.band.to_string() + " slot overlap between tasks " +
                                       std::to_string(x.task_id) + " and " +
                                       std::to_string(y.task_id)});
                }
            }
        }
    }

    // Wired serialization: occupancies of one link must not overlap.
    std::map<int, std::vector<const WiredUse*>> by_link;
    for (const WiredUse& u : ev.wired_uses) by_link[u.link_id].push_back(&u);
    for (auto& [link_id, uses] : by_link) {
        std::sort(uses.begin(), uses.end(),
                  [](const WiredUse* x, const WiredUse* y) { return x->start_s < y->start_s; });
        for (std::size_t i = 0; i + 1 < uses.size(); ++i) {
            if (uses[i + 1]->start_s < uses[i]->end_s - 1e-12) {
                out.push_back({ConstraintKind::WiredLinkCapacity,
                               "link " + std::to_string(link_id) + " overlap between tasks " +
                                   std::to_string(uses[i]->task_id) + " and " +
                                   std::to_string(uses[i + 1]->task_id)});
            }
        }
    }

    // Processing capacity per unit over the window.
    for (std::size_t u = 0; u < topo.compute_specs.size(); ++u) {
        const ComputeSpec& spec = topo.compute_specs[u];
        if (u < ev.used_cycles.size() &&
            ev.used_cycles[u] > spec.max_capacity_cycles * (1.0 + 1e-12)) {
            out.push_back({ConstraintKind::ComputeCapacity,
                           spec.unit.to_string() + " over capacity: " +
                               std::to_string(ev.used_cycles[u]) + " > " +
                               std::to_string(spec.max_capacity_cycles)});
        }
    }

    return out;
}

}  // namespace ivnsim
