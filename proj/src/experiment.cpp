#include "aigc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace aigc {

namespace fs = std::filesystem;

namespace {

// Shortest text that reads back to the same double.
std::string num(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunRecord record_from(const std::string& policy, std::uint64_t seed, const EpisodeSummary& s, double wall)
{
    return RunRecord{policy, seed, s.episodic_reward, s.avg_finished_task_reward(), s.finished_tasks,
                     s.crashed_tasks, wall};
}

std::string event_log_text(const EdgeEnv& env)
{
    std::ostringstream out;
    env.log().write_jsonl(out, env.workload().asps, env.penalties(), env.summary());
    return out.str();
}

}  // namespace

std::vector<std::uint64_t> sweep_seeds(const ExperimentConfig& config)
{
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < config.seeds; ++k) seeds.push_back(config.workload.seed + static_cast<std::uint64_t>(k));
    return seeds;
}

std::uint64_t eval_task_seed(std::uint64_t seed)
{
    return make_rng(seed, RngStream::EvalTasks)();
}

std::uint64_t train_task_seed(std::uint64_t seed, int episode)
{
    return make_rng(seed, RngStream::TrainTasks, static_cast<std::uint64_t>(episode))();
}

Workload frozen_workload(const WorkloadConfig& config, std::uint64_t seed)
{
    WorkloadConfig c = config;
    c.seed = seed;
    return make_workload(c, eval_task_seed(seed));
}

SacRun train_and_evaluate_sac(const ExperimentConfig& config, std::uint64_t seed,
                              std::shared_ptr<const Workload> eval_workload)
{
    const auto t0 = std::chrono::steady_clock::now();
    WorkloadConfig wc = config.workload;
    wc.seed = seed;
    SacConfig sc = config.sac;
    sc.seed = seed;
    WorkloadFactory factory = [wc, seed](int episode) {
        return std::make_shared<const Workload>(make_workload(wc, train_task_seed(seed, episode)));
    };
    TrainOptions options;
    options.eval_every = config.eval_every;
    TrainingResult training = train_sac(factory, eval_workload, config.penalties, sc, options);

    EdgeEnv env(eval_workload, config.penalties);
    SacPolicy greedy(*training.agent, ActMode::Greedy);
    const EpisodeResult result = run_episode(env, [&](const Observation& obs) { return greedy.select(obs); });
    RunRecord rec = record_from("sac", seed, result.summary, seconds_since(t0));
    return SacRun{rec, std::move(training), std::move(env)};
}

void write_file_atomic(const fs::path& path, const std::string& contents)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records)
{
    out << "policy,seed,episodic_reward,avg_finished_task_reward,finished_tasks,crashed_tasks\n";
    for (const auto& r : records)
        out << r.policy << ',' << r.seed << ',' << num(r.episodic_reward) << ',' << num(r.avg_finished_task_reward)
            << ',' << r.finished_tasks << ',' << r.crashed_tasks << '\n';
}

std::vector<RunRecord> read_runs_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("runs.csv: missing header");
    std::vector<RunRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) throw std::invalid_argument("runs.csv line " + std::to_string(line_no) + ": expected 6 columns");
        try {
            out.push_back(RunRecord{cells[0], std::stoull(cells[1]), std::stod(cells[2]), std::stod(cells[3]),
                                    std::stoi(cells[4]), std::stoi(cells[5]), 0.0});
        } catch (const std::exception&) {
            throw std::invalid_argument("runs.csv line " + std::to_string(line_no) + ": unparsable value");
        }
    }
    return out;
}

std::vector<PolicySummary> summarize(const std::vector<RunRecord>& records)
{
    std::vector<PolicySummary> out;
    auto stats = [](const std::vector<double>& xs, double& mean, double& sd) {
        mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    };
    std::vector<std::string> order;
    for (const auto& r : records)
        if (std::find(order.begin(), order.end(), r.policy) == order.end()) order.push_back(r.policy);
    for (const auto& name : order) {
        std::vector<double> ep, avg, crash;
        for (const auto& r : records) {
            if (r.policy != name) continue;
            ep.push_back(r.episodic_reward);
            avg.push_back(r.avg_finished_task_reward);
            crash.push_back(r.crashed_tasks);
        }
        PolicySummary s;
        s.policy = name;
        s.runs = static_cast<int>(ep.size());
        stats(ep, s.episodic_reward_mean, s.episodic_reward_std);
        stats(avg, s.avg_finished_task_reward_mean, s.avg_finished_task_reward_std);
        stats(crash, s.crashed_tasks_mean, s.crashed_tasks_std);
        out.push_back(s);
    }
    return out;
}

void write_summary_csv(std::ostream& out, const std::vector<PolicySummary>& summary)
{
    out << "policy,runs,episodic_reward_mean,episodic_reward_std,avg_finished_task_reward_mean,"
           "avg_finished_task_reward_std,crashed_tasks_mean,crashed_tasks_std\n";
    for (const auto& s : summary)
        out << s.policy << ',' << s.runs << ',' << num(s.episodic_reward_mean) << ',' << num(s.episodic_reward_std)
            << ',' << num(s.avg_finished_task_reward_mean) << ',' << num(s.avg_finished_task_reward_std) << ','
            << num(s.crashed_tasks_mean) << ',' << num(s.crashed_tasks_std) << '\n';
}

void write_learning_curve_csv(std::ostream& out, const std::vector<TrainingEpisode>& curve)
{
    out << "episode,episodic_reward,avg_task_reward,crashes,actor_loss,critic_loss,entropy\n";
    for (const auto& e : curve)
        out << e.episode << ',' << num(e.train.episodic_reward) << ',' << num(e.train.avg_finished_task_reward())
            << ',' << e.train.crashed_tasks << ',' << num(e.actor_loss) << ',' << num(e.critic_loss) << ','
            << num(e.entropy) << '\n';
}

void write_eval_curve_csv(std::ostream& out, const std::vector<TrainingEpisode>& curve)
{
    out << "episode,episodic_reward,avg_task_reward,crashes\n";
    for (const auto& e : curve)
        if (e.evaluated)
            out << e.episode << ',' << num(e.eval.episodic_reward) << ',' << num(e.eval.avg_finished_task_reward())
                << ',' << e.eval.crashed_tasks << '\n';
}

std::vector<RunRecord> run_suite(const ExperimentConfig& config, std::ostream* progress)
{
    config.validate();
    const fs::path root(config.out_dir);
    fs::create_directories(root);
    {
        std::ostringstream cfg;
        config.write(cfg);
        write_file_atomic(root / "config.txt", cfg.str());
    }

    const auto seeds = sweep_seeds(config);
    std::vector<std::vector<RunRecord>> per_seed(seeds.size());
    std::mutex progress_mutex;
    auto log = [&](const std::string& msg) {
        if (!progress) return;
        std::lock_guard lock(progress_mutex);
        *progress << msg << std::endl;
    };

    auto run_seed = [&](std::size_t k) {
        const std::uint64_t seed = seeds[k];
        const fs::path dir = root / ("seed_" + std::to_string(seed));
        auto workload = std::make_shared<const Workload>(frozen_workload(config.workload, seed));
        {
            std::ostringstream w;
            write_workload_jsonl(w, *workload);
            write_file_atomic(dir / "workload.jsonl", w.str());
        }
        for (PolicyKind kind : config.policies) {
            const std::string name(to_string(kind));
            RunRecord rec;
            if (kind == PolicyKind::Sac) {
                SacRun run = train_and_evaluate_sac(config, seed, workload);
                rec = run.record;
                write_file_atomic(dir / "sac.events.jsonl", event_log_text(run.eval_env));
                run.training.agent->save(dir / "sac");
                std::ostringstream lc, ec;
                write_learning_curve_csv(lc, run.training.curve);
                write_eval_curve_csv(ec, run.training.curve);
                write_file_atomic(dir / "sac" / "learning_curve.csv", lc.str());
                write_file_atomic(dir / "sac" / "eval_curve.csv", ec.str());
                std::ostringstream cfg;
                config.write(cfg);
                nlohmann::json meta{{"seed", seed},
                                    {"episodes", static_cast<int>(run.training.curve.size())},
                                    {"env_steps", run.training.env_steps},
                                    {"state_dim", run.training.agent->state_dim()},
                                    {"n_actions", run.training.agent->n_actions()},
                                    {"alpha", run.training.agent->alpha()},
                                    {"config", cfg.str()}};
                write_file_atomic(dir / "sac" / "metadata.json", meta.dump(2) + "\n");
            } else {
                const auto t0 = std::chrono::steady_clock::now();
                auto policy = make_baseline(kind, seed, workload->asps);
                EdgeEnv env(workload, config.penalties);
                const EpisodeResult result =
                    run_episode(env, [&](const Observation& obs) { return policy->select(obs); });
                rec = record_from(name, seed, result.summary, seconds_since(t0));
                write_file_atomic(dir / (name + ".events.jsonl"), event_log_text(env));
            }
            log("seed " + std::to_string(seed) + " " + name + ": episodic_reward=" + num(rec.episodic_reward) +
                " crashed=" + std::to_string(rec.crashed_tasks) + " avg_task=" + num(rec.avg_finished_task_reward));
            per_seed[k].push_back(rec);
        }
    };

    if (config.jobs <= 1 || seeds.size() <= 1) {
        for (std::size_t k = 0; k < seeds.size(); ++k) run_seed(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::jthread> workers;
        const auto n = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), seeds.size());
        for (std::size_t w = 0; w < n; ++w)
            workers.emplace_back([&] {
                for (std::size_t k = next++; k < seeds.size(); k = next++) {
                    try {
                        run_seed(k);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        workers.clear();
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<RunRecord> records;
    for (auto& v : per_seed) records.insert(records.end(), v.begin(), v.end());
    std::ostringstream runs, summary;
    write_runs_csv(runs, records);
    write_summary_csv(summary, summarize(records));
    write_file_atomic(root / "runs.csv", runs.str());
    write_file_atomic(root / "summary.csv", summary.str());
    nlohmann::json timing = nlohmann::json::array();
    for (const auto& r : records) timing.push_back({{"policy", r.policy}, {"seed", r.seed}, {"wall_time", r.wall_time}});
    write_file_atomic(root / "timing.json", timing.dump(2) + "\n");
    return records;
}

std::vector<PolicySummary> report(const fs::path& dir)
{
    std::ifstream in(dir / "runs.csv");
    if (!in) throw std::runtime_error("cannot read " + (dir / "runs.csv").string());
    const auto summary = summarize(read_runs_csv(in));
    std::ostringstream out;
    write_summary_csv(out, summary);
    write_file_atomic(dir / "summary.csv", out.str());
    return summary;
}

}  // namespace aigc
