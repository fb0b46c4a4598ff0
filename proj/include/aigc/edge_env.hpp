#pragma once

#include "aigc/event_log.hpp"
#include "aigc/workload.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace aigc {

using StateVector = std::vector<double>;

struct InFlightTask {
    Task task;
    int asp_id = 0;
    double start_time = 0.0;
    double finish_time = 0.0;
    double quality = 0.0;  // granted at admission
};

struct AspState {
    AspSpec spec;
    int available = 0;
    std::vector<InFlightTask> in_flight;

    int in_flight_demand() const;
};

/// Task features followed by (total, available) per ASP, all in [0,1].
/// Demand is scaled by demand_max, estimated completion time (the task's
/// duration) by demand_max * step_time, capacities by the largest total.
StateVector encode_state(const Task& pending, std::span<const AspState> asps, int demand_max, double step_time);

inline std::size_t state_size(int n_asps) { return 2 + 2 * static_cast<std::size_t>(n_asps); }

// What a policy sees at a decision: the feature vector plus the raw integer
// quantities it was built from. Latent ASP quality is deliberately absent.
struct Observation {
    StateVector features;
    int demand = 0;
    std::vector<int> available;
    std::vector<int> total;
};

struct FinishedTask {
    int task = 0;
    double quality = 0.0;
};

struct StepOutcome {
    double reward = 0.0;
    double quality_component = 0.0;
    double penalty_component = 0.0;
    int crashed_now = 0;
    std::vector<FinishedTask> finished_since_last;
    StateVector next_state;
    bool done = false;
};

struct StepRecord {
    int task = 0;
    int action = 0;
    double reward = 0.0;
    int crashed_now = 0;
};

class EdgeEnv {
public:
    EdgeEnv(std::shared_ptr<const Workload> workload, PenaltyConfig penalties, bool record_events = true);

    StateVector reset();
    StepOutcome step(int action);

    bool done() const { return done_; }
    double clock() const { return clock_; }
    int n_asps() const { return static_cast<int>(asps_.size()); }
    const Task& pending() const;
    const std::vector<AspState>& asps() const { return asps_; }
    const Observation& observation() const { return observation_; }
    const Workload& workload() const { return *workload_; }
    const PenaltyConfig& penalties() const { return penalties_; }
    const EventLog& log() const { return log_; }
    const EpisodeSummary& summary() const { return summary_; }

private:
    void release_until(double t, std::vector<FinishedTask>& finished);
    void refresh_observation();

    std::shared_ptr<const Workload> workload_;
    PenaltyConfig penalties_;
    bool record_events_;
    std::vector<AspState> asps_;
    std::size_t next_task_ = 0;
    double clock_ = 0.0;
    bool done_ = true;
    bool started_ = false;
    Observation observation_;
    EventLog log_;
    EpisodeSummary summary_;
};

struct EpisodeResult {
    EpisodeSummary summary;
    std::vector<StepRecord> steps;
};

using DecisionFn = std::function<int(const Observation&)>;

/// reset() then one decision per task until done.
EpisodeResult run_episode(EdgeEnv& env, const DecisionFn& policy);

}  // namespace aigc
