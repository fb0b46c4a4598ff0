#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace aigc {

struct ReplayReport {
    bool ok = true;
    std::size_t line = 0;  // first offending line (1-based), 0 when clean
    std::string message;
    std::size_t events = 0;

    // Totals recomputed from the raw stream.
    double episodic_reward = 0.0;
    double penalty_total = 0.0;
    int finished_tasks = 0;
    double avg_finished_task_reward = 0.0;
    int crashed_tasks = 0;
};

/// Re-derives every ASP's occupancy, each reward and penalty, and the
/// episode totals from an event log, independently of the simulator.
/// Stops at the first violation. Malformed lines are reported as violations
/// carrying their line number.
ReplayReport replay_check(std::istream& log);
ReplayReport replay_check(const std::filesystem::path& log_file);

}  // namespace aigc
