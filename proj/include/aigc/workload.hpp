#pragma once

#include "aigc/quality_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace aigc {

struct Task {
    int id = 0;
    double arrival_time = 0.0;  // hours
    int demand = 0;             // diffusion timesteps
    double duration = 0.0;      // hours, demand * step_time

    friend bool operator==(const Task&, const Task&) = default;
};

// Perceived quality an ASP delivers for a task needing `steps` timesteps is
// peak * eval_normalized(profile, steps). Profiles share a breakpoint layout;
// providers differ in the peak they can reach.
struct AspQuality {
    QualityProfile profile;
    double peak = 1.0;

    double score(int steps) const { return peak * eval_normalized(profile, steps); }

    friend bool operator==(const AspQuality&, const AspQuality&) = default;
};

struct AspSpec {
    int id = 0;
    int total_capacity = 0;  // concurrent diffusion timesteps
    AspQuality quality;

    friend bool operator==(const AspSpec&, const AspSpec&) = default;
};

struct QualityTemplate {
    int a_x = 50;
    double a_y = 0.0;
    int b_x = 250;
    double b_y = 1.0;
    MetricOrientation orientation = MetricOrientation::HigherIsBetter;
    double peak_min = 0.2;
    double peak_max = 1.0;
};

struct WorkloadConfig {
    int n_asps = 20;
    int n_tasks = 1000;
    double horizon = 288.0;            // hours
    double mean_interarrival = 0.288;  // hours between arrivals
    int demand_min = 100;
    int demand_max = 250;
    int capacity_min = 600;
    int capacity_max = 1500;
    double step_time = 0.08;  // hours per diffusion timestep
    std::uint64_t seed = 1;
    QualityTemplate quality;

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;
};

// Independent draw sequences derived from one seed.
enum class RngStream : std::uint64_t {
    Arrivals = 1,
    Demands = 2,
    Capacities = 3,
    Qualities = 4,
    Agent = 5,
    Policy = 6,
    EvalTasks = 7,
    TrainTasks = 8,
};

std::mt19937_64 make_rng(std::uint64_t seed, RngStream stream, std::uint64_t index = 0);

/// Poisson arrivals (exponential gaps) with uniform integer demands.
std::vector<Task> generate_tasks(const WorkloadConfig& config);

std::vector<AspSpec> generate_asps(const WorkloadConfig& config);

struct Workload {
    std::vector<AspSpec> asps;
    std::vector<Task> tasks;
    int demand_max = 0;   // state normalizer for demand
    double step_time = 0.0;
    int beyond_horizon = 0;  // arrivals later than the configured horizon

    int max_total_capacity() const;
};

Workload make_workload(const WorkloadConfig& config);

/// Same ASP population, task stream drawn from `task_seed` instead of config.seed.
Workload make_workload(const WorkloadConfig& config, std::uint64_t task_seed);

int count_beyond_horizon(const std::vector<Task>& tasks, double horizon);

// One JSON object per line: a header line, then ASP lines, then task lines.
void write_workload_jsonl(std::ostream& out, const Workload& workload);
Workload read_workload_jsonl(std::istream& in);

}  // namespace aigc
