#include "aigc/event_log.hpp"

#include <cmath>
#include <json.hpp>
#include <ostream>
#include <stdexcept>

namespace aigc {

using nlohmann::json;

std::string_view to_string(CrashMode m)
{
    return m == CrashMode::Restart ? "restart" : "reject_only";
}

CrashMode parse_crash_mode(std::string_view text)
{
    if (text == "restart") return CrashMode::Restart;
    if (text == "reject_only") return CrashMode::RejectOnly;
    throw std::invalid_argument("unknown crash mode: " + std::string(text));
}

void PenaltyConfig::validate() const
{
    if (!std::isfinite(fixed_penalty) || fixed_penalty < 0.0)
        throw std::invalid_argument("invalid penalty config: fixed_penalty");
    if (!std::isfinite(progress_weight) || progress_weight < 0.0)
        throw std::invalid_argument("invalid penalty config: progress_weight");
}

std::string_view to_string(EventKind k)
{
    switch (k) {
    case EventKind::Arrival: return "arrival";
    case EventKind::Assign: return "assign";
    case EventKind::Finish: return "finish";
    case EventKind::Crash: return "crash";
    }
    return "unknown";
}

void EventLog::write_jsonl(std::ostream& out, const std::vector<AspSpec>& asps, const PenaltyConfig& penalties,
                           const EpisodeSummary& summary) const
{
    json table = json::array();
    for (const auto& a : asps) {
        const auto& p = a.quality.profile;
        table.push_back({{"id", a.id},
                         {"total_capacity", a.total_capacity},
                         {"a_x", p.a_x()},
                         {"a_y", p.a_y()},
                         {"b_x", p.b_x()},
                         {"b_y", p.b_y()},
                         {"orientation", to_string(p.orientation())},
                         {"peak", a.quality.peak}});
    }
    out << json{{"event", "header"},
                {"asps", table},
                {"fixed_penalty", penalties.fixed_penalty},
                {"progress_weight", penalties.progress_weight},
                {"crash_mode", to_string(penalties.crash_mode)}}
               .dump()
        << '\n';

    for (const auto& e : events_) {
        json j{{"event", to_string(e.kind)}, {"clock", e.clock}, {"task", e.task}, {"demand", e.demand}};
        switch (e.kind) {
        case EventKind::Arrival:
            j["duration"] = e.duration;
            break;
        case EventKind::Assign:
            j["asp"] = e.asp;
            j["start"] = e.start;
            j["finish"] = e.finish;
            j["quality"] = e.quality;
            j["reward"] = e.reward;
            j["available_before"] = e.available_before;
            j["available_after"] = e.available_after;
            break;
        case EventKind::Finish:
            j["asp"] = e.asp;
            j["available_after"] = e.available_after;
            break;
        case EventKind::Crash: {
            j["asp"] = e.asp;
            j["penalty"] = e.penalty;
            j["reward"] = e.reward;
            j["available_before"] = e.available_before;
            j["available_after"] = e.available_after;
            json killed = json::array();
            for (const auto& k : e.interrupted)
                killed.push_back({{"task", k.task},
                                  {"demand", k.demand},
                                  {"start", k.start},
                                  {"duration", k.duration},
                                  {"progress", k.progress}});
            j["interrupted"] = std::move(killed);
            break;
        }
        }
        out << j.dump() << '\n';
    }

    out << json{{"event", "summary"},
                {"episodic_reward", summary.episodic_reward},
                {"quality_reward", summary.quality_reward},
                {"penalty_total", summary.penalty_total},
                {"finished_tasks", summary.finished_tasks},
                {"avg_finished_task_reward", summary.avg_finished_task_reward()},
                {"crashed_tasks", summary.crashed_tasks}}
               .dump()
        << '\n';
}

}  // namespace aigc
