#include "aigc/replay_check.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <vector>

namespace aigc {

using nlohmann::json;

namespace {

constexpr double kTol = 1e-9;

bool close(double a, double b)
{
    return std::abs(a - b) <= kTol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

struct Running {
    int demand;
    double start;
    double duration;
    double finish;
};

struct Provider {
    int total = 0;
    int a_x = 0;
    double a_y = 0.0;
    int b_x = 0;
    double b_y = 0.0;
    bool higher_is_better = true;
    double peak = 0.0;
    std::map<int, Running> running;  // by task id

    int occupied() const
    {
        int s = 0;
        for (const auto& [id, r] : running) s += r.demand;
        return s;
    }

    // Written out longhand rather than through the quality model.
    double quality(int steps) const
    {
        double raw;
        if (steps <= a_x)
            raw = a_y;
        else if (steps >= b_x)
            raw = b_y;
        else
            raw = a_y + (b_y - a_y) * double(steps - a_x) / double(b_x - a_x);
        const double norm = higher_is_better ? (raw - a_y) / (b_y - a_y) : (a_y - raw) / (a_y - b_y);
        return peak * std::clamp(norm, 0.0, 1.0);
    }
};

class Violation : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what)
{
    if (!cond) throw Violation(what);
}

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

}  // namespace

ReplayReport replay_check(std::istream& log)
{
    ReplayReport report;
    std::vector<Provider> asps;
    bool restart = true;
    double fixed_penalty = 0.0;
    double progress_weight = 0.0;
    bool have_header = false;
    bool have_summary = false;
    double last_clock = -std::numeric_limits<double>::infinity();
    std::map<int, double> arrival_duration;  // pending tasks: id -> duration
    double quality_sum = 0.0;
    double finished_quality = 0.0;
    std::map<int, double> granted;  // task id -> quality granted at admission

    std::string line;
    std::size_t line_no = 0;
    try {
        while (std::getline(log, line)) {
            ++line_no;
            if (line.empty()) continue;
            json j;
            try {
                j = json::parse(line);
            } catch (const json::exception&) {
                throw Violation("malformed JSON");
            }
            try {
                const std::string kind = j.at("event").get<std::string>();
                if (kind == "header") {
                    require(!have_header, "duplicate header");
                    for (const auto& a : j.at("asps")) {
                        Provider p;
                        p.total = a.at("total_capacity").get<int>();
                        p.a_x = a.at("a_x").get<int>();
                        p.a_y = a.at("a_y").get<double>();
                        p.b_x = a.at("b_x").get<int>();
                        p.b_y = a.at("b_y").get<double>();
                        p.higher_is_better = a.at("orientation").get<std::string>() == "higher_is_better";
                        p.peak = a.at("peak").get<double>();
                        require(a.at("id").get<int>() == static_cast<int>(asps.size()), "ASP ids out of order");
                        asps.push_back(p);
                    }
                    fixed_penalty = j.at("fixed_penalty").get<double>();
                    progress_weight = j.at("progress_weight").get<double>();
                    restart = j.at("crash_mode").get<std::string>() == "restart";
                    have_header = true;
                    continue;
                }
                require(have_header, "event before header");
                require(!have_summary, "event after summary");

                if (kind == "summary") {
                    have_summary = true;
                    for (std::size_t i = 0; i < asps.size(); ++i)
                        require(asps[i].running.empty(),
                                "ASP " + std::to_string(i) + " still holds tasks at episode end");
                    require(close(j.at("episodic_reward").get<double>(), report.episodic_reward),
                            "summary episodic_reward " + fmt(j.at("episodic_reward").get<double>()) +
                                " != recomputed " + fmt(report.episodic_reward));
                    require(close(j.at("quality_reward").get<double>(), quality_sum), "summary quality_reward mismatch");
                    require(close(j.at("penalty_total").get<double>(), report.penalty_total),
                            "summary penalty_total mismatch");
                    require(close(report.episodic_reward, quality_sum - report.penalty_total),
                            "reward decomposition: episodic != quality - penalties");
                    require(j.at("finished_tasks").get<int>() == report.finished_tasks, "summary finished_tasks mismatch");
                    require(j.at("crashed_tasks").get<int>() == report.crashed_tasks, "summary crashed_tasks mismatch");
                    report.avg_finished_task_reward =
                        report.finished_tasks > 0 ? finished_quality / report.finished_tasks : 0.0;
                    require(close(j.at("avg_finished_task_reward").get<double>(), report.avg_finished_task_reward),
                            "summary avg_finished_task_reward mismatch");
                    continue;
                }

                ++report.events;
                const double clock = j.at("clock").get<double>();
                require(clock >= last_clock, "clock went backwards (" + fmt(clock) + " < " + fmt(last_clock) + ")");
                last_clock = clock;
                const int task = j.at("task").get<int>();
                const int demand = j.at("demand").get<int>();

                if (kind == "arrival") {
                    arrival_duration[task] = j.at("duration").get<double>();
                    continue;
                }

                const int id = j.at("asp").get<int>();
                require(id >= 0 && id < static_cast<int>(asps.size()), "ASP index out of range");
                Provider& asp = asps[static_cast<std::size_t>(id)];
                const int free_before = asp.total - asp.occupied();

                if (kind == "assign") {
                    require(arrival_duration.count(task) == 1, "assign without a pending arrival");
                    const double duration = arrival_duration[task];
                    arrival_duration.erase(task);
                    require(j.at("available_before").get<int>() == free_before,
                            "conservation: ASP " + std::to_string(id) + " reports " +
                                std::to_string(j.at("available_before").get<int>()) + " available, replay has " +
                                std::to_string(free_before));
                    require(demand <= free_before, "assignment exceeds available capacity");
                    require(close(j.at("start").get<double>(), clock), "start time != decision clock");
                    require(close(j.at("finish").get<double>(), clock + duration), "finish != start + duration");
                    require(duration > 0.0, "task with non-positive duration");
                    const double q = asp.quality(demand);
                    require(close(j.at("quality").get<double>(), q), "quality " + fmt(j.at("quality").get<double>()) +
                                                                         " != model value " + fmt(q));
                    const double reward = j.at("reward").get<double>();
                    require(close(reward, q), "assign reward " + fmt(reward) + " != quality " + fmt(q));
                    asp.running[task] = Running{demand, clock, duration, clock + duration};
                    granted[task] = q;
                    quality_sum += q;
                    report.episodic_reward += reward;
                } else if (kind == "finish") {
                    auto it = asp.running.find(task);
                    require(it != asp.running.end(),
                            "finish for task " + std::to_string(task) + " not running on ASP " + std::to_string(id));
                    require(close(it->second.finish, clock), "finish event clock != scheduled finish");
                    require(it->second.demand == demand, "finish demand mismatch");
                    asp.running.erase(it);
                    ++report.finished_tasks;
                    finished_quality += granted[task];
                } else if (kind == "crash") {
                    require(arrival_duration.count(task) == 1, "crash without a pending arrival");
                    arrival_duration.erase(task);
                    require(j.at("available_before").get<int>() == free_before,
                            "conservation: ASP " + std::to_string(id) + " reports " +
                                std::to_string(j.at("available_before").get<int>()) + " available, replay has " +
                                std::to_string(free_before));
                    require(demand > free_before, "crash recorded for a feasible assignment");
                    const auto& killed = j.at("interrupted");
                    double penalty = fixed_penalty;
                    if (restart) {
                        require(killed.size() == asp.running.size(), "interrupted set differs from running set");
                        for (const auto& [tid, r] : asp.running) {
                            const double p = std::clamp((clock - r.start) / r.duration, 0.0, 1.0);
                            penalty += progress_weight * p;
                        }
                        for (const auto& k : killed)
                            require(asp.running.count(k.at("task").get<int>()) == 1,
                                    "interrupted task not running on this ASP");
                        report.crashed_tasks += 1 + static_cast<int>(asp.running.size());
                        asp.running.clear();
                    } else {
                        require(killed.empty(), "reject-only crash interrupted tasks");
                        report.crashed_tasks += 1;
                    }
                    require(close(j.at("penalty").get<double>(), penalty),
                            "crash penalty " + fmt(j.at("penalty").get<double>()) + " != recomputed " + fmt(penalty));
                    const double reward = j.at("reward").get<double>();
                    require(close(reward, -penalty), "crash reward " + fmt(reward) + " != -penalty " + fmt(-penalty));
                    report.penalty_total += penalty;
                    report.episodic_reward += reward;
                } else {
                    throw Violation("unknown event kind '" + kind + "'");
                }

                const int free_after = asp.total - asp.occupied();
                require(free_after >= 0, "negative availability on ASP " + std::to_string(id));
                require(j.at("available_after").get<int>() == free_after,
                        "conservation: ASP " + std::to_string(id) + " reports " +
                            std::to_string(j.at("available_after").get<int>()) + " available after " + kind +
                            ", replay has " + std::to_string(free_after));
            } catch (const json::exception& e) {
                throw Violation(std::string("malformed event: ") + e.what());
            }
        }
        require(have_header, "missing header");
        if (!have_summary) {
            ++line_no;
            throw Violation("missing summary line");
        }
    } catch (const Violation& v) {
        report.ok = false;
        report.line = line_no;
        report.message = v.what();
    }
    return report;
}

ReplayReport replay_check(const std::filesystem::path& log_file)
{
    std::ifstream in(log_file);
    if (!in) {
        ReplayReport r;
        r.ok = false;
        r.message = "cannot open " + log_file.string();
        return r;
    }
    return replay_check(in);
}

}  // namespace aigc
