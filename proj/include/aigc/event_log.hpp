#pragma once

#include "aigc/workload.hpp"

#include <iosfwd>
#include <string_view>
#include <vector>

namespace aigc {

enum class CrashMode {
    Restart,     // every in-flight task on the ASP dies and capacity resets
    RejectOnly,  // only the incoming task is refused
};

std::string_view to_string(CrashMode m);
CrashMode parse_crash_mode(std::string_view text);

struct PenaltyConfig {
    double fixed_penalty = 2.0;
    double progress_weight = 1.0;
    CrashMode crash_mode = CrashMode::Restart;

    void validate() const;
};

enum class EventKind { Arrival, Assign, Finish, Crash };

std::string_view to_string(EventKind k);

struct InterruptedTask {
    int task = 0;
    int demand = 0;
    double start = 0.0;
    double duration = 0.0;
    double progress = 0.0;
};

struct Event {
    EventKind kind = EventKind::Arrival;
    double clock = 0.0;
    int task = 0;
    int asp = -1;
    int demand = 0;
    double duration = 0.0;
    // Assign: admission window and granted quality.
    double start = 0.0;
    double finish = 0.0;
    double quality = 0.0;
    // Assign and Crash.
    double penalty = 0.0;
    double reward = 0.0;
    int available_before = 0;
    int available_after = 0;
    std::vector<InterruptedTask> interrupted;
};

struct EpisodeSummary {
    double episodic_reward = 0.0;
    double quality_reward = 0.0;  // sum over admitted tasks
    double penalty_total = 0.0;
    int finished_tasks = 0;
    double finished_quality = 0.0;
    int crashed_tasks = 0;

    // Mean quality over tasks that ran to completion; 0 when none did.
    double avg_finished_task_reward() const
    {
        return finished_tasks > 0 ? finished_quality / finished_tasks : 0.0;
    }
};

class EventLog {
public:
    void clear() { events_.clear(); }
    void append(Event e) { events_.push_back(std::move(e)); }
    const std::vector<Event>& events() const { return events_; }

    /// One JSON object per line: a header with the ASP table and penalty
    /// settings, every event in order, then an episode summary line.
    void write_jsonl(std::ostream& out, const std::vector<AspSpec>& asps, const PenaltyConfig& penalties,
                     const EpisodeSummary& summary) const;

private:
    std::vector<Event> events_;
};

}  // namespace aigc
