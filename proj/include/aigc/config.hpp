#pragma once

#include "aigc/event_log.hpp"
#include "aigc/policies.hpp"
#include "aigc/sac.hpp"
#include "aigc/workload.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace aigc {

struct ExperimentConfig {
    WorkloadConfig workload;
    PenaltyConfig penalties;
    SacConfig sac;
    std::vector<PolicyKind> policies{PolicyKind::Random, PolicyKind::RoundRobin, PolicyKind::OverloadAvoid,
                                     PolicyKind::GreedyOracle, PolicyKind::Sac};
    int seeds = 5;
    std::string out_dir = "results";
    int jobs = 1;
    int eval_every = 1;

    /// Sets one key from its textual value. Throws std::invalid_argument
    /// naming the key when it is unknown or the value does not parse.
    void set(std::string_view key, std::string_view value);

    /// Throws std::invalid_argument on the first invalid field.
    void validate() const;

    /// All keys in a fixed order, one `key = value` per line.
    void write(std::ostream& out) const;

    static std::vector<std::string> keys();
};

/// Flat `key = value` file; blank lines and `#` comments ignored.
/// Errors carry the line number and key.
void apply_config_file(ExperimentConfig& config, std::istream& in);

}  // namespace aigc
