#pragma once

#include "aigc/config.hpp"
#include "aigc/sac.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace aigc {

struct RunRecord {
    std::string policy;
    std::uint64_t seed = 0;
    double episodic_reward = 0.0;
    double avg_finished_task_reward = 0.0;
    int finished_tasks = 0;  // 0 flags an empty finished set
    int crashed_tasks = 0;
    double wall_time = 0.0;  // seconds
};

struct PolicySummary {
    std::string policy;
    int runs = 0;
    double episodic_reward_mean = 0.0;
    double episodic_reward_std = 0.0;
    double avg_finished_task_reward_mean = 0.0;
    double avg_finished_task_reward_std = 0.0;
    double crashed_tasks_mean = 0.0;
    double crashed_tasks_std = 0.0;
};

/// Experiment seeds are workload.seed, workload.seed + 1, ...
std::vector<std::uint64_t> sweep_seeds(const ExperimentConfig& config);

/// Task-stream seeds: the held-out evaluation stream and the per-episode
/// training streams never coincide for a given experiment seed.
std::uint64_t eval_task_seed(std::uint64_t seed);
std::uint64_t train_task_seed(std::uint64_t seed, int episode);

/// The frozen evaluation workload every policy faces for `seed`.
Workload frozen_workload(const WorkloadConfig& config, std::uint64_t seed);

struct SacRun {
    RunRecord record;  // greedy evaluation of the final checkpoint
    TrainingResult training;
    EdgeEnv eval_env;  // holds the evaluation event log
};

/// Trains on fresh task streams with the seed's ASP population, then
/// evaluates greedily on `eval_workload`.
SacRun train_and_evaluate_sac(const ExperimentConfig& config, std::uint64_t seed,
                              std::shared_ptr<const Workload> eval_workload);

/// Runs every (policy, seed) cell, writing under config.out_dir:
///   config.txt                        resolved configuration
///   runs.csv, summary.csv, timing.json
///   seed_<s>/workload.jsonl           frozen evaluation workload
///   seed_<s>/<policy>.events.jsonl    evaluation event log per policy
///   seed_<s>/sac/                     checkpoint, metadata.json, learning_curve.csv, eval_curve.csv
std::vector<RunRecord> run_suite(const ExperimentConfig& config, std::ostream* progress = nullptr);

/// Per-policy mean and sample standard deviation, in first-seen policy order.
std::vector<PolicySummary> summarize(const std::vector<RunRecord>& records);

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_runs_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<PolicySummary>& summary);

void write_learning_curve_csv(std::ostream& out, const std::vector<TrainingEpisode>& curve);
void write_eval_curve_csv(std::ostream& out, const std::vector<TrainingEpisode>& curve);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Recomputes summary.csv from runs.csv in `dir`; returns the summaries.
std::vector<PolicySummary> report(const std::filesystem::path& dir);

}  // namespace aigc
