#include "aigc/edge_env.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

namespace aigc {

int AspState::in_flight_demand() const
{
    int sum = 0;
    for (const auto& t : in_flight) sum += t.task.demand;
    return sum;
}

StateVector encode_state(const Task& pending, std::span<const AspState> asps, int demand_max, double step_time)
{
    StateVector s;
    s.reserve(state_size(static_cast<int>(asps.size())));
    const double dmax = static_cast<double>(demand_max);
    s.push_back(pending.demand / dmax);
    s.push_back(pending.duration / (dmax * step_time));
    int max_total = 1;
    for (const auto& a : asps) max_total = std::max(max_total, a.spec.total_capacity);
    for (const auto& a : asps) {
        s.push_back(a.spec.total_capacity / static_cast<double>(max_total));
        s.push_back(a.available / static_cast<double>(max_total));
    }
    return s;
}

EdgeEnv::EdgeEnv(std::shared_ptr<const Workload> workload, PenaltyConfig penalties, bool record_events)
    : workload_(std::move(workload)), penalties_(penalties), record_events_(record_events)
{
    if (!workload_) throw std::invalid_argument("EdgeEnv: null workload");
    penalties_.validate();
}

const Task& EdgeEnv::pending() const
{
    if (done_) throw std::logic_error("EdgeEnv: no pending task");
    return workload_->tasks[next_task_];
}

StateVector EdgeEnv::reset()
{
    const auto& w = *workload_;
    if (w.tasks.empty() || w.asps.empty()) throw std::invalid_argument("EdgeEnv::reset: empty workload");
    if (w.demand_max < 1 || !(w.step_time > 0.0))
        throw std::invalid_argument("EdgeEnv::reset: workload lacks state normalizers");

    asps_.clear();
    asps_.reserve(w.asps.size());
    for (const auto& spec : w.asps) asps_.push_back(AspState{spec, spec.total_capacity, {}});
    log_.clear();
    summary_ = EpisodeSummary{};
    next_task_ = 0;
    done_ = false;
    started_ = true;
    clock_ = w.tasks.front().arrival_time;
    const Task& first = w.tasks.front();
    if (record_events_)
        log_.append(Event{.kind = EventKind::Arrival, .clock = clock_, .task = first.id, .demand = first.demand,
                          .duration = first.duration});
    refresh_observation();
    return observation_.features;
}

void EdgeEnv::refresh_observation()
{
    static const Task none{};
    const Task& p = done_ ? none : workload_->tasks[next_task_];
    observation_.features = encode_state(p, asps_, workload_->demand_max, workload_->step_time);
    observation_.demand = p.demand;
    observation_.available.resize(asps_.size());
    observation_.total.resize(asps_.size());
    for (std::size_t i = 0; i < asps_.size(); ++i) {
        observation_.available[i] = asps_[i].available;
        observation_.total[i] = asps_[i].spec.total_capacity;
    }
}

void EdgeEnv::release_until(double t, std::vector<FinishedTask>& finished)
{
    // (finish time, task id, asp) for every task done by t, released in time order.
    std::vector<std::tuple<double, int, int>> due;
    for (const auto& a : asps_)
        for (const auto& f : a.in_flight)
            if (f.finish_time <= t) due.emplace_back(f.finish_time, f.task.id, a.spec.id);
    std::sort(due.begin(), due.end());

    for (const auto& [finish, id, asp_id] : due) {
        auto& asp = asps_[static_cast<std::size_t>(asp_id)];
        auto it = std::find_if(asp.in_flight.begin(), asp.in_flight.end(),
                               [id = id](const InFlightTask& f) { return f.task.id == id; });
        const InFlightTask done_task = *it;
        asp.in_flight.erase(it);
        asp.available += done_task.task.demand;
        summary_.finished_tasks += 1;
        summary_.finished_quality += done_task.quality;
        finished.push_back({id, done_task.quality});
        clock_ = std::max(clock_, finish);
        if (record_events_)
            log_.append(Event{.kind = EventKind::Finish, .clock = finish, .task = id, .asp = asp_id,
                              .demand = done_task.task.demand, .available_after = asp.available});
    }
}

StepOutcome EdgeEnv::step(int action)
{
    if (!started_ || done_) throw std::logic_error("EdgeEnv::step: episode is done (call reset)");
    if (action < 0 || action >= n_asps())
        throw std::out_of_range("EdgeEnv::step: ASP index " + std::to_string(action) + " out of range [0, " +
                                std::to_string(n_asps()) + ")");

    const Task& task = workload_->tasks[next_task_];
    auto& asp = asps_[static_cast<std::size_t>(action)];
    StepOutcome out;

    if (task.demand <= asp.available) {
        const double q = asp.spec.quality.score(task.demand);
        const int before = asp.available;
        asp.available -= task.demand;
        asp.in_flight.push_back(InFlightTask{task, action, clock_, clock_ + task.duration, q});
        out.quality_component = q;
        summary_.quality_reward += q;
        if (record_events_)
            log_.append(Event{.kind = EventKind::Assign, .clock = clock_, .task = task.id, .asp = action,
                              .demand = task.demand, .duration = task.duration, .start = clock_,
                              .finish = clock_ + task.duration, .quality = q, .reward = q,
                              .available_before = before, .available_after = asp.available});
    } else {
        const int before = asp.available;
        double progress_sum = 0.0;
        std::vector<InterruptedTask> killed;
        if (penalties_.crash_mode == CrashMode::Restart) {
            for (const auto& f : asp.in_flight) {
                const double p = std::clamp((clock_ - f.start_time) / f.task.duration, 0.0, 1.0);
                progress_sum += p;
                killed.push_back({f.task.id, f.task.demand, f.start_time, f.task.duration, p});
            }
            asp.in_flight.clear();
            asp.available = asp.spec.total_capacity;
        }
        out.penalty_component = penalties_.fixed_penalty + penalties_.progress_weight * progress_sum;
        out.crashed_now = 1 + static_cast<int>(killed.size());
        summary_.penalty_total += out.penalty_component;
        summary_.crashed_tasks += out.crashed_now;
        if (record_events_)
            log_.append(Event{.kind = EventKind::Crash, .clock = clock_, .task = task.id, .asp = action,
                              .demand = task.demand, .duration = task.duration,
                              .penalty = out.penalty_component, .reward = -out.penalty_component,
                              .available_before = before, .available_after = asp.available,
                              .interrupted = std::move(killed)});
    }
    out.reward = out.quality_component - out.penalty_component;
    summary_.episodic_reward += out.reward;

    ++next_task_;
    if (next_task_ < workload_->tasks.size()) {
        const Task& next = workload_->tasks[next_task_];
        release_until(next.arrival_time, out.finished_since_last);
        clock_ = next.arrival_time;
        if (record_events_)
            log_.append(Event{.kind = EventKind::Arrival, .clock = clock_, .task = next.id, .demand = next.demand,
                              .duration = next.duration});
    } else {
        // Feasibly placed work still running at the end counts as finished.
        done_ = true;
        release_until(std::numeric_limits<double>::infinity(), out.finished_since_last);
    }
    refresh_observation();
    out.next_state = observation_.features;
    out.done = done_;
    return out;
}

EpisodeResult run_episode(EdgeEnv& env, const DecisionFn& policy)
{
    EpisodeResult result;
    env.reset();
    result.steps.reserve(env.workload().tasks.size());
    while (!env.done()) {
        const int task = env.pending().id;
        const int action = policy(env.observation());
        const StepOutcome o = env.step(action);
        result.steps.push_back({task, action, o.reward, o.crashed_now});
    }
    result.summary = env.summary();
    return result;
}

}  // namespace aigc
