#include "aigc/config.hpp"

#include <charconv>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace aigc {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value)
{
    throw std::invalid_argument("config key '" + std::string(key) + "': invalid value '" + std::string(value) + "'");
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value)
{
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) bad_value(key, value);
    return out;
}

bool parse_bool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    bad_value(key, value);
}

template <typename T>
std::string format_number(T v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<std::string_view> split_list(std::string_view value)
{
    std::vector<std::string_view> parts;
    while (!value.empty()) {
        const auto comma = value.find(',');
        parts.push_back(trim(value.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        value.remove_prefix(comma + 1);
    }
    return parts;
}

struct Field {
    std::string_view key;
    std::function<void(ExperimentConfig&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define AIGC_NUM_FIELD(name, member)                                                                       \
    Field                                                                                                  \
    {                                                                                                      \
        name,                                                                                              \
            [](ExperimentConfig& c, std::string_view v) {                                                  \
                c.member = parse_number<std::decay_t<decltype(c.member)>>(name, v);                        \
            },                                                                                             \
            [](const ExperimentConfig& c) { return format_number(c.member); }                              \
    }

const std::vector<Field>& fields()
{
    static const std::vector<Field> table{
        AIGC_NUM_FIELD("n_asps", workload.n_asps),
        AIGC_NUM_FIELD("n_tasks", workload.n_tasks),
        AIGC_NUM_FIELD("horizon", workload.horizon),
        AIGC_NUM_FIELD("mean_interarrival", workload.mean_interarrival),
        AIGC_NUM_FIELD("demand_min", workload.demand_min),
        AIGC_NUM_FIELD("demand_max", workload.demand_max),
        AIGC_NUM_FIELD("capacity_min", workload.capacity_min),
        AIGC_NUM_FIELD("capacity_max", workload.capacity_max),
        AIGC_NUM_FIELD("step_time", workload.step_time),
        AIGC_NUM_FIELD("seed", workload.seed),
        AIGC_NUM_FIELD("quality_a_x", workload.quality.a_x),
        AIGC_NUM_FIELD("quality_a_y", workload.quality.a_y),
        AIGC_NUM_FIELD("quality_b_x", workload.quality.b_x),
        AIGC_NUM_FIELD("quality_b_y", workload.quality.b_y),
        Field{"quality_orientation",
              [](ExperimentConfig& c, std::string_view v) {
                  try {
                      c.workload.quality.orientation = parse_orientation(v);
                  } catch (const std::invalid_argument&) {
                      bad_value("quality_orientation", v);
                  }
              },
              [](const ExperimentConfig& c) { return std::string(to_string(c.workload.quality.orientation)); }},
        AIGC_NUM_FIELD("peak_min", workload.quality.peak_min),
        AIGC_NUM_FIELD("peak_max", workload.quality.peak_max),
        AIGC_NUM_FIELD("fixed_penalty", penalties.fixed_penalty),
        AIGC_NUM_FIELD("progress_weight", penalties.progress_weight),
        Field{"crash_mode",
              [](ExperimentConfig& c, std::string_view v) {
                  try {
                      c.penalties.crash_mode = parse_crash_mode(v);
                  } catch (const std::invalid_argument&) {
                      bad_value("crash_mode", v);
                  }
              },
              [](const ExperimentConfig& c) { return std::string(to_string(c.penalties.crash_mode)); }},
        AIGC_NUM_FIELD("gamma", sac.gamma),
        AIGC_NUM_FIELD("tau", sac.tau),
        AIGC_NUM_FIELD("alpha", sac.alpha),
        Field{"auto_alpha",
              [](ExperimentConfig& c, std::string_view v) { c.sac.auto_alpha = parse_bool("auto_alpha", v); },
              [](const ExperimentConfig& c) { return std::string(c.sac.auto_alpha ? "true" : "false"); }},
        AIGC_NUM_FIELD("target_entropy_ratio", sac.target_entropy_ratio),
        AIGC_NUM_FIELD("batch_size", sac.batch_size),
        AIGC_NUM_FIELD("buffer_capacity", sac.buffer_capacity),
        AIGC_NUM_FIELD("actor_lr", sac.actor_lr),
        AIGC_NUM_FIELD("critic_lr", sac.critic_lr),
        AIGC_NUM_FIELD("alpha_lr", sac.alpha_lr),
        AIGC_NUM_FIELD("lr_final_ratio", sac.lr_final_ratio),
        AIGC_NUM_FIELD("update_every", sac.update_every),
        AIGC_NUM_FIELD("warmup_steps", sac.warmup_steps),
        AIGC_NUM_FIELD("episodes", sac.episodes),
        Field{"hidden",
              [](ExperimentConfig& c, std::string_view v) {
                  std::vector<int> sizes;
                  for (auto part : split_list(v)) sizes.push_back(parse_number<int>("hidden", part));
                  if (sizes.empty()) bad_value("hidden", v);
                  c.sac.hidden = sizes;
              },
              [](const ExperimentConfig& c) {
                  std::string s;
                  for (std::size_t i = 0; i < c.sac.hidden.size(); ++i)
                      s += (i ? "," : "") + std::to_string(c.sac.hidden[i]);
                  return s;
              }},
        AIGC_NUM_FIELD("grad_clip", sac.grad_clip),
        Field{"policies",
              [](ExperimentConfig& c, std::string_view v) {
                  std::vector<PolicyKind> kinds;
                  for (auto part : split_list(v)) {
                      try {
                          kinds.push_back(parse_policy_kind(part));
                      } catch (const std::invalid_argument&) {
                          bad_value("policies", v);
                      }
                  }
                  c.policies = kinds;
              },
              [](const ExperimentConfig& c) {
                  std::string s;
                  for (std::size_t i = 0; i < c.policies.size(); ++i)
                      s += (i ? "," : "") + std::string(to_string(c.policies[i]));
                  return s;
              }},
        AIGC_NUM_FIELD("seeds", seeds),
        Field{"out_dir", [](ExperimentConfig& c, std::string_view v) { c.out_dir = std::string(v); },
              [](const ExperimentConfig& c) { return c.out_dir; }},
        AIGC_NUM_FIELD("jobs", jobs),
        AIGC_NUM_FIELD("eval_every", eval_every),
    };
    return table;
}

#undef AIGC_NUM_FIELD

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value)
{
    for (const auto& f : fields()) {
        if (f.key == key) {
            f.set(*this, trim(value));
            return;
        }
    }
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

void ExperimentConfig::validate() const
{
    workload.validate();
    penalties.validate();
    sac.validate();
    if (policies.empty()) throw std::invalid_argument("invalid experiment config: policies (need at least one)");
    if (seeds < 1) throw std::invalid_argument("invalid experiment config: seeds");
    if (jobs < 1) throw std::invalid_argument("invalid experiment config: jobs");
    if (eval_every < 0) throw std::invalid_argument("invalid experiment config: eval_every");
    if (out_dir.empty()) throw std::invalid_argument("invalid experiment config: out_dir");
}

void ExperimentConfig::write(std::ostream& out) const
{
    for (const auto& f : fields()) out << f.key << " = " << f.get(*this) << '\n';
}

std::vector<std::string> ExperimentConfig::keys()
{
    std::vector<std::string> k;
    for (const auto& f : fields()) k.emplace_back(f.key);
    return k;
}

void apply_config_file(ExperimentConfig& config, std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        try {
            config.set(trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

}  // namespace aigc
