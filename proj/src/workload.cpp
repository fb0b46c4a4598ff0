#include "aigc/workload.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <stdexcept>

namespace aigc {

using nlohmann::json;

void WorkloadConfig::validate() const
{
    auto fail = [](const std::string& field) {
        throw std::invalid_argument("invalid workload config: " + field);
    };
    if (n_asps < 1) fail("n_asps");
    if (n_tasks < 1) fail("n_tasks");
    if (!(horizon > 0.0)) fail("horizon");
    if (!(mean_interarrival > 0.0)) fail("mean_interarrival");
    if (demand_min < 1 || demand_min > demand_max) fail("demand_min/demand_max");
    if (capacity_min < 1 || capacity_min > capacity_max) fail("capacity_min/capacity_max");
    if (!(step_time > 0.0)) fail("step_time");
    if (!(quality.peak_min >= 0.0) || quality.peak_min > quality.peak_max) fail("peak_min/peak_max");
    // Throws if the shared layout is not a valid profile.
    QualityProfile(quality.a_x, quality.a_y, quality.b_x, quality.b_y, quality.orientation);
}

std::mt19937_64 make_rng(std::uint64_t seed, RngStream stream, std::uint64_t index)
{
    const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    const auto s = static_cast<std::uint64_t>(stream);
    std::seed_seq seq{lo(seed), hi(seed), lo(s), hi(s), lo(index), hi(index)};
    return std::mt19937_64(seq);
}

std::vector<Task> generate_tasks(const WorkloadConfig& config)
{
    config.validate();
    auto arrivals = make_rng(config.seed, RngStream::Arrivals);
    auto demands = make_rng(config.seed, RngStream::Demands);
    std::exponential_distribution<double> gap(1.0 / config.mean_interarrival);
    std::uniform_int_distribution<int> demand(config.demand_min, config.demand_max);

    std::vector<Task> tasks;
    tasks.reserve(static_cast<std::size_t>(config.n_tasks));
    double clock = 0.0;
    for (int i = 0; i < config.n_tasks; ++i) {
        double g = gap(arrivals);
        // Keep arrival times strictly increasing even for a zero draw.
        while (!(g > 0.0)) g = gap(arrivals);
        clock += g;
        const int d = demand(demands);
        tasks.push_back(Task{i, clock, d, d * config.step_time});
    }
    return tasks;
}

std::vector<AspSpec> generate_asps(const WorkloadConfig& config)
{
    config.validate();
    auto capacities = make_rng(config.seed, RngStream::Capacities);
    auto qualities = make_rng(config.seed, RngStream::Qualities);
    std::uniform_int_distribution<int> capacity(config.capacity_min, config.capacity_max);
    std::uniform_real_distribution<double> peak(config.quality.peak_min, config.quality.peak_max);
    const auto& q = config.quality;
    const QualityProfile layout(q.a_x, q.a_y, q.b_x, q.b_y, q.orientation);

    std::vector<AspSpec> asps;
    asps.reserve(static_cast<std::size_t>(config.n_asps));
    for (int i = 0; i < config.n_asps; ++i) {
        const int cap = capacity(capacities);
        const double p = q.peak_min == q.peak_max ? q.peak_min : peak(qualities);
        asps.push_back(AspSpec{i, cap, AspQuality{layout, p}});
    }
    return asps;
}

int Workload::max_total_capacity() const
{
    int m = 0;
    for (const auto& a : asps) m = std::max(m, a.total_capacity);
    return m;
}

int count_beyond_horizon(const std::vector<Task>& tasks, double horizon)
{
    return static_cast<int>(std::count_if(tasks.begin(), tasks.end(),
                                          [horizon](const Task& t) { return t.arrival_time > horizon; }));
}

Workload make_workload(const WorkloadConfig& config)
{
    return make_workload(config, config.seed);
}

Workload make_workload(const WorkloadConfig& config, std::uint64_t task_seed)
{
    WorkloadConfig task_config = config;
    task_config.seed = task_seed;
    Workload w;
    w.asps = generate_asps(config);
    w.tasks = generate_tasks(task_config);
    w.demand_max = config.demand_max;
    w.step_time = config.step_time;
    w.beyond_horizon = count_beyond_horizon(w.tasks, config.horizon);
    return w;
}

void write_workload_jsonl(std::ostream& out, const Workload& workload)
{
    out << json{{"type", "header"},
                {"demand_max", workload.demand_max},
                {"step_time", workload.step_time},
                {"beyond_horizon", workload.beyond_horizon},
                {"n_asps", workload.asps.size()},
                {"n_tasks", workload.tasks.size()}}
               .dump()
        << '\n';
    for (const auto& a : workload.asps) {
        const auto& p = a.quality.profile;
        out << json{{"type", "asp"},
                    {"id", a.id},
                    {"total_capacity", a.total_capacity},
                    {"a_x", p.a_x()},
                    {"a_y", p.a_y()},
                    {"b_x", p.b_x()},
                    {"b_y", p.b_y()},
                    {"orientation", to_string(p.orientation())},
                    {"peak", a.quality.peak}}
                   .dump()
            << '\n';
    }
    for (const auto& t : workload.tasks) {
        out << json{{"type", "task"},
                    {"id", t.id},
                    {"arrival_time", t.arrival_time},
                    {"demand", t.demand},
                    {"duration", t.duration}}
                   .dump()
            << '\n';
    }
}

Workload read_workload_jsonl(std::istream& in)
{
    Workload w;
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const std::string type = j.at("type").get<std::string>();
            if (type == "header") {
                w.demand_max = j.at("demand_max").get<int>();
                w.step_time = j.at("step_time").get<double>();
                w.beyond_horizon = j.value("beyond_horizon", 0);
                have_header = true;
            } else if (type == "asp") {
                QualityProfile profile(j.at("a_x").get<int>(), j.at("a_y").get<double>(), j.at("b_x").get<int>(),
                                       j.at("b_y").get<double>(),
                                       parse_orientation(j.at("orientation").get<std::string>()));
                w.asps.push_back(AspSpec{j.at("id").get<int>(), j.at("total_capacity").get<int>(),
                                         AspQuality{profile, j.at("peak").get<double>()}});
            } else if (type == "task") {
                w.tasks.push_back(Task{j.at("id").get<int>(), j.at("arrival_time").get<double>(),
                                       j.at("demand").get<int>(), j.at("duration").get<double>()});
            } else {
                throw std::invalid_argument("unknown record type '" + type + "'");
            }
        } catch (const std::exception& e) {
            throw std::invalid_argument("workload file line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_header) throw std::invalid_argument("workload file: missing header line");
    for (std::size_t i = 0; i < w.asps.size(); ++i)
        if (w.asps[i].id != static_cast<int>(i))
            throw std::invalid_argument("workload file: ASP ids must be 0..N-1 in order");
    return w;
}

}  // namespace aigc
