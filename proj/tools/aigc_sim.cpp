// Command-line front end: generate | run | check | report.

#include "aigc/config.hpp"
#include "aigc/experiment.hpp"
#include "aigc/replay_check.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace aigc;

namespace {

struct CommonArgs {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> policies;
    std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_policy)
{
    cmd->add_option("--config", args.config_file, "flat key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "base seed (overrides the config's seed)");
    if (with_policy)
        cmd->add_option("--policy", args.policies,
                        "policy to run (random|round_robin|overload_avoid|greedy_oracle|sac); repeatable")
            ->delimiter(',');
    cmd->add_option("--out", args.out, "output path");
    cmd->allow_extras();
    cmd->footer("Any config key may be overridden as --key=value.");
}

ExperimentConfig resolve(const CLI::App* cmd, const CommonArgs& args)
{
    ExperimentConfig config;
    if (!args.config_file.empty()) {
        std::ifstream in(args.config_file);
        apply_config_file(config, in);
    }
    for (const auto& extra : cmd->remaining()) {
        if (extra.rfind("--", 0) != 0 || extra.find('=') == std::string::npos)
            throw std::invalid_argument("unrecognized argument '" + extra + "' (expected --key=value)");
        const auto eq = extra.find('=');
        config.set(extra.substr(2, eq - 2), extra.substr(eq + 1));
    }
    if (args.seed) config.workload.seed = *args.seed;
    if (!args.policies.empty()) {
        std::string joined;
        for (const auto& p : args.policies) joined += (joined.empty() ? "" : ",") + p;
        config.set("policies", joined);
    }
    config.validate();
    return config;
}

int check_paths(const std::vector<std::string>& paths)
{
    std::vector<fs::path> logs;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::recursive_directory_iterator(p))
                if (entry.is_regular_file() && entry.path().string().ends_with(".events.jsonl"))
                    logs.push_back(entry.path());
        } else {
            logs.emplace_back(p);
        }
    }
    std::sort(logs.begin(), logs.end());
    if (logs.empty()) {
        std::cerr << "check: no event logs found\n";
        return 2;
    }
    int bad = 0;
    for (const auto& log : logs) {
        const ReplayReport r = replay_check(log);
        if (r.ok) {
            std::cout << "ok    " << log.string() << " (" << r.events << " events, episodic_reward "
                      << r.episodic_reward << ", crashed " << r.crashed_tasks << ")\n";
        } else {
            ++bad;
            std::cout << "FAIL  " << log.string() << ":" << r.line << ": " << r.message << '\n';
        }
    }
    return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"AIGC service-provider selection simulator"};
    app.require_subcommand(1);

    CommonArgs gen_args, run_args;
    auto* generate = app.add_subcommand("generate", "freeze an evaluation workload to a JSON-lines file");
    add_common(generate, gen_args, false);

    auto* run = app.add_subcommand("run", "run the policy suite over the seed sweep");
    add_common(run, run_args, true);

    std::vector<std::string> check_inputs;
    auto* check = app.add_subcommand("check", "replay-verify event logs (files or directories)");
    check->add_option("logs", check_inputs, "event log files or result directories")->required();

    std::string report_dir;
    auto* report_cmd = app.add_subcommand("report", "recompute summary.csv from runs.csv");
    report_cmd->add_option("--out", report_dir, "results directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) {
            const ExperimentConfig config = resolve(generate, gen_args);
            const Workload w = frozen_workload(config.workload, config.workload.seed);
            std::ostringstream text;
            write_workload_jsonl(text, w);
            const fs::path out = gen_args.out.empty() ? fs::path("workload.jsonl") : fs::path(gen_args.out);
            write_file_atomic(out, text.str());
            std::cout << "wrote " << out.string() << ": " << w.asps.size() << " ASPs, " << w.tasks.size()
                      << " tasks, " << w.beyond_horizon << " arrivals beyond the horizon\n";
            return 0;
        }
        if (*run) {
            ExperimentConfig config = resolve(run, run_args);
            if (!run_args.out.empty()) config.out_dir = run_args.out;
            run_suite(config, &std::cerr);
            std::ifstream summary(fs::path(config.out_dir) / "summary.csv");
            std::cout << summary.rdbuf();
            return check_paths({config.out_dir});
        }
        if (*check) return check_paths(check_inputs);
        if (*report_cmd) {
            report(report_dir);
            std::ifstream summary(fs::path(report_dir) / "summary.csv");
            std::cout << summary.rdbuf();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
