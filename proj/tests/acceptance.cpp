// Acceptance gate: runs the default experiment and every headline check,
// printing one PASS/FAIL line per criterion. Exit status is the failure count.
//
// usage: acceptance <out_dir> [--reuse]
//   --reuse skips the experiment when <out_dir>/runs.csv already exists.

#include "aigc/experiment.hpp"
#include "aigc/nn.hpp"
#include "aigc/policies.hpp"
#include "aigc/quality_model.hpp"
#include "aigc/replay_check.hpp"
#include "aigc/sac.hpp"
#include "aigc/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace aigc;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void verdict(const std::string& name, bool pass, const std::string& detail)
{
    std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

struct Stats {
    double mean = 0.0;
    double sd = 0.0;
    int n = 0;
};

Stats stats_of(const std::vector<double>& xs)
{
    Stats s;
    s.n = static_cast<int>(xs.size());
    for (double x : xs) s.mean += x;
    s.mean /= s.n;
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = s.n > 1 ? std::sqrt(ss / (s.n - 1)) : 0.0;
    return s;
}

double pooled_sd(const Stats& a, const Stats& b)
{
    return std::sqrt(((a.n - 1) * a.sd * a.sd + (b.n - 1) * b.sd * b.sd) / (a.n + b.n - 2));
}

std::vector<std::vector<double>> read_csv_numbers(const fs::path& p)
{
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

// ---- experiment-level criteria ------------------------------------------------

void check_experiment(const fs::path& out, const ExperimentConfig& config)
{
    std::ifstream runs_in(out / "runs.csv");
    const auto records = read_runs_csv(runs_in);
    std::map<std::string, std::vector<const RunRecord*>> by_policy;
    for (const auto& r : records) by_policy[r.policy].push_back(&r);
    for (const char* p : {"random", "round_robin", "overload_avoid", "greedy_oracle", "sac"})
        if (by_policy[p].size() != static_cast<std::size_t>(config.seeds))
            throw std::runtime_error(std::string("runs.csv lacks a full sweep for ") + p);

    auto reward_stats = [&](const std::string& p) {
        std::vector<double> xs;
        for (const auto* r : by_policy[p]) xs.push_back(r->episodic_reward);
        return stats_of(xs);
    };
    const Stats rnd = reward_stats("random"), rr = reward_stats("round_robin"), oa = reward_stats("overload_avoid"),
                gr = reward_stats("greedy_oracle"), sac = reward_stats("sac");

    {
        std::ostringstream d;
        d.precision(4);
        d << "means greedy " << gr.mean << ", sac " << sac.mean << ", overload " << oa.mean << ", rr " << rr.mean
          << ", random " << rnd.mean << "; sac/greedy " << sac.mean / gr.mean;
        const bool order = gr.mean >= sac.mean && sac.mean > oa.mean && oa.mean > rr.mean && rr.mean > rnd.mean;
        const bool within = sac.mean >= 0.85 * gr.mean;
        const double g1 = sac.mean - oa.mean, p1 = pooled_sd(sac, oa);
        const double g2 = oa.mean - rr.mean, p2 = pooled_sd(oa, rr);
        const double g3 = rr.mean - rnd.mean, p3 = pooled_sd(rr, rnd);
        d << "; gaps/pooled sd " << g1 << "/" << p1 << ", " << g2 << "/" << p2 << ", " << g3 << "/" << p3;
        verdict("policy ordering", order && within && g1 > p1 && g2 > p2 && g3 > p3, d.str());
    }

    {
        const double limit = 0.01 * config.workload.n_tasks;
        bool ok = true;
        std::ostringstream d;
        d << "sac crashes per seed [";
        for (const auto* r : by_policy["sac"]) {
            d << ' ' << r->crashed_tasks;
            ok = ok && r->crashed_tasks <= limit;
        }
        d << " ] (limit " << limit << ")";
        for (const char* p : {"random", "round_robin"}) {
            d << "; " << p << " [";
            for (const auto* r : by_policy[p]) {
                d << ' ' << r->crashed_tasks;
                ok = ok && r->crashed_tasks >= 0.05 * config.workload.n_tasks;
            }
            d << " ]";
        }
        verdict("crash elimination", ok, d.str());
    }

    {
        bool ok = true;
        std::ostringstream d;
        d.precision(4);
        d << "sac vs overload avg finished-task reward per seed:";
        for (std::size_t k = 0; k < by_policy["sac"].size(); ++k) {
            const auto* s = by_policy["sac"][k];
            const auto* o = by_policy["overload_avoid"][k];
            d << ' ' << s->avg_finished_task_reward << '/' << o->avg_finished_task_reward;
            ok = ok && s->seed == o->seed && s->finished_tasks > 0 &&
                 s->avg_finished_task_reward > o->avg_finished_task_reward;
        }
        verdict("quality learning", ok, d.str());
    }

    {
        // Seed-averaged training curve, trailing moving average over 10 episodes.
        std::vector<double> mean_curve;
        for (auto seed : sweep_seeds(config)) {
            const auto rows = read_csv_numbers(out / ("seed_" + std::to_string(seed)) / "sac" / "learning_curve.csv");
            if (mean_curve.empty()) mean_curve.assign(rows.size(), 0.0);
            if (rows.size() != mean_curve.size()) throw std::runtime_error("learning curves differ in length");
            for (std::size_t i = 0; i < rows.size(); ++i) mean_curve[i] += rows[i][1] / config.seeds;
        }
        const std::size_t window = 10;
        std::vector<double> smooth(mean_curve.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < mean_curve.size(); ++i) {
            acc += mean_curve[i];
            if (i >= window) acc -= mean_curve[i - window];
            smooth[i] = acc / static_cast<double>(std::min(i + 1, window));
        }
        auto first_cross = [&](double level) {
            for (std::size_t i = 0; i < smooth.size(); ++i)
                if (smooth[i] > level) return static_cast<long>(i);
            return -1L;
        };
        const long c_rr = first_cross(rr.mean), c_oa = first_cross(oa.mean);
        std::ostringstream d;
        d << "smoothed curve starts at " << fmt("%.1f", smooth.front()) << ", ends at " << fmt("%.1f", smooth.back())
          << "; crosses round_robin mean at episode " << c_rr << ", overload_avoid mean at episode " << c_oa << " of "
          << smooth.size();
        verdict("learning-curve shape", c_rr >= 0 && c_oa >= 0 && c_rr < c_oa, d.str());
    }

    {
        std::size_t logs = 0, bad = 0;
        std::string first_problem;
        for (const auto& entry : fs::recursive_directory_iterator(out)) {
            if (!entry.is_regular_file() || !entry.path().string().ends_with(".events.jsonl")) continue;
            ++logs;
            const ReplayReport r = replay_check(entry.path());
            if (!r.ok) {
                if (bad++ == 0) first_problem = entry.path().string() + ":" + std::to_string(r.line) + ": " + r.message;
            }
        }
        const std::size_t expected = static_cast<std::size_t>(config.seeds) * config.policies.size();
        std::ostringstream d;
        d << logs << " event logs replayed, " << bad << " with violations";
        if (bad) d << " (first: " << first_problem << ")";
        verdict("simulator invariants", logs == expected && bad == 0, d.str());
    }
}

// ---- component-level criteria -------------------------------------------------

double rel_err(double a, double b)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

void check_gradients()
{
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> width(1, 8), depth(1, 3);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double h = 1e-5;
    int nets = 0, checked = 0;
    double worst = 0.0;
    for (; nets < 100; ++nets) {
        std::vector<int> sizes{width(rng)};
        for (int l = depth(rng); l > 0; --l) sizes.push_back(width(rng));
        nn::Mlp net(sizes, rng);
        nn::Matrix x(sizes.front(), 3), up(sizes.back(), 3);
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
        for (Eigen::Index i = 0; i < up.size(); ++i) up(i) = normal(rng);
        auto loss = [&] { return (net.forward(x).array() * up.array()).sum(); };
        nn::ForwardCache cache;
        net.forward(x, cache);
        const nn::ParamSet g = net.backward(cache, up);
        for (std::size_t l = 0; l < net.n_layers(); ++l) {
            auto probe = [&](auto& t, const auto& grad) {
                for (Eigen::Index i = 0; i < t.size(); ++i) {
                    const double saved = t(i);
                    t(i) = saved + h;
                    const double plus = loss();
                    t(i) = saved - h;
                    const double minus = loss();
                    t(i) = saved;
                    worst = std::max(worst, rel_err(grad(i), (plus - minus) / (2 * h)));
                    ++checked;
                }
            };
            probe(net.params().weights[l], g.weights[l]);
            probe(net.params().biases[l], g.biases[l]);
        }
    }

    // Actor loss on a 3-action toy, differentiated through a small actor network.
    nn::Mlp actor({4, 6, 3}, rng);
    nn::Matrix states(4, 5), q1(3, 5), q2(3, 5);
    for (Eigen::Index i = 0; i < states.size(); ++i) states(i) = normal(rng);
    for (Eigen::Index i = 0; i < q1.size(); ++i) {
        q1(i) = normal(rng);
        q2(i) = normal(rng);
    }
    const double alpha = 0.2;
    nn::ForwardCache cache;
    const ActorObjective obj = actor_objective(actor.forward(states, cache), q1, q2, alpha);
    const nn::ParamSet g = actor.backward(cache, obj.logits_grad);
    auto actor_loss = [&] {
        // Written out per state: sum_a pi (alpha log pi - min q), averaged.
        const nn::Matrix z = actor.forward(states);
        double total = 0.0;
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
            const double m = z.col(c).maxCoeff();
            double norm = 0.0;
            for (Eigen::Index a = 0; a < 3; ++a) norm += std::exp(z(a, c) - m);
            for (Eigen::Index a = 0; a < 3; ++a) {
                const double logp = z(a, c) - m - std::log(norm);
                total += std::exp(logp) * (alpha * logp - std::min(q1(a, c), q2(a, c)));
            }
        }
        return total / static_cast<double>(z.cols());
    };
    double actor_worst = 0.0;
    for (std::size_t l = 0; l < actor.n_layers(); ++l) {
        auto& w = actor.params().weights[l];
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            const double saved = w(i);
            w(i) = saved + h;
            const double plus = actor_loss();
            w(i) = saved - h;
            const double minus = actor_loss();
            w(i) = saved;
            actor_worst = std::max(actor_worst, rel_err(g.weights[l](i), (plus - minus) / (2 * h)));
        }
    }
    std::ostringstream d;
    d << nets << " networks, " << checked << " parameters, worst relative error " << fmt("%.2e", worst)
      << "; actor loss worst " << fmt("%.2e", actor_worst);
    verdict("gradient correctness", nets >= 100 && worst < 1e-4 && actor_worst < 1e-4, d.str());
}

void check_oracles()
{
    std::mt19937_64 rng(77);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        const int dim = 3;
        nn::Mlp actor({dim, 4, 3}, rng), t1({dim, 4, 3}, rng), t2({dim, 4, 3}, rng);
        std::vector<Transition> items(8);
        std::vector<const Transition*> ptrs;
        for (auto& t : items) {
            for (int i = 0; i < dim; ++i) {
                t.state.push_back(normal(rng));
                t.next_state.push_back(normal(rng));
            }
            t.action = inst % 3;
            t.reward = normal(rng);
            t.done = normal(rng) > 1.0;
            ptrs.push_back(&t);
        }
        const double alpha = 0.1 + 0.01 * inst, gamma = 0.9;
        const nn::Vector y = critic_targets(Batch::from(ptrs), t1, t2, actor, alpha, gamma);
        for (std::size_t i = 0; i < items.size(); ++i) {
            const nn::Vector s = Eigen::Map<const nn::Vector>(items[i].next_state.data(), dim);
            const nn::Vector z = actor.forward(s), a1 = t1.forward(s), a2 = t2.forward(s);
            const double norm = std::exp(z(0)) + std::exp(z(1)) + std::exp(z(2));
            double v = 0.0;
            for (int a = 0; a < 3; ++a) {
                const double p = std::exp(z(a)) / norm;
                v += p * (std::min(a1(a), a2(a)) - alpha * std::log(p));
            }
            const double expect = items[i].reward + (items[i].done ? 0.0 : gamma * v);
            worst = std::max(worst, std::abs(y(static_cast<Eigen::Index>(i)) - expect));
        }
    }

    const QualityProfile layout(50, 0.0, 250, 1.0, MetricOrientation::HigherIsBetter);
    std::uniform_int_distribution<int> cap(0, 1500), dem(100, 250), lvl(0, 5);
    std::uniform_real_distribution<double> peak(0.2, 1.0);
    int mismatches = 0;
    const int states = 10000;
    for (int k = 0; k < states; ++k) {
        const int n = 20;
        std::vector<int> avail(n);
        std::vector<AspQuality> q;
        for (auto& a : avail) a = k % 2 ? cap(rng) : 300 * lvl(rng);
        for (int i = 0; i < n; ++i) q.push_back({layout, k % 4 == 0 ? 0.2 * (1 + lvl(rng) % 4) : peak(rng)});
        const int d = dem(rng);
        int oa = 0;
        for (int i = 1; i < n; ++i)
            if (avail[i] > avail[oa]) oa = i;
        int g = -1;
        double gq = -1.0;
        for (int i = 0; i < n; ++i)
            if (avail[i] >= d && q[i].peak * (d - 50) / 200.0 > gq) {
                g = i;
                gq = q[i].peak * (d - 50) / 200.0;
            }
        if (g < 0) g = oa;
        if (overload_avoid_select(avail) != oa) ++mismatches;
        if (greedy_upper_bound_select(avail, q, d) != g) ++mismatches;
    }
    std::ostringstream d;
    d << "critic targets max abs error " << fmt("%.2e", worst) << " over 800 transitions; " << mismatches
      << " selection mismatches over " << states << " states";
    verdict("oracle equivalence", worst <= 1e-10 && mismatches == 0, d.str());
}

void check_quality_model()
{
    std::mt19937_64 rng(31);
    // Noiseless recovery on grid-aligned breakpoints.
    std::vector<int> grid;
    for (int s = 10; s <= 400; s += 10) grid.push_back(s);
    std::uniform_int_distribution<int> idx(1, 30);
    std::uniform_real_distribution<double> val(0.0, 50.0);
    int exact = 0, trials = 0;
    for (; trials < 100; ++trials) {
        int i = idx(rng), j = idx(rng);
        while (j == i) j = idx(rng);
        if (i > j) std::swap(i, j);
        const bool higher = trials % 2 == 0;
        const double lo = val(rng), hi = lo + 1.0 + val(rng);
        const QualityProfile truth(grid[i], higher ? lo : hi, grid[j], higher ? hi : lo,
                                   higher ? MetricOrientation::HigherIsBetter : MetricOrientation::LowerIsBetter);
        std::vector<CurveSample> samples;
        for (int s : grid) samples.push_back({s, eval_raw(truth, s)});
        const QualityProfile fit = fit_profile(samples, truth.orientation());
        if (fit.a_x() == truth.a_x() && fit.b_x() == truth.b_x() && std::abs(fit.a_y() - truth.a_y()) < 1e-9 &&
            std::abs(fit.b_y() - truth.b_y()) < 1e-9)
            ++exact;
    }
    // Noisy recovery.
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    const QualityProfile tv(50, 80.0, 200, 20.0, MetricOrientation::LowerIsBetter);
    double worst_rel = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<CurveSample> samples;
        for (int s : grid) samples.push_back({s, eval_raw(tv, s) + noise(rng)});
        const QualityProfile f = fit_profile(samples, MetricOrientation::LowerIsBetter);
        worst_rel = std::max({worst_rel, std::abs(f.a_x() - 50) / 50.0, std::abs(f.b_x() - 200) / 200.0,
                              std::abs(f.a_y() - 80.0) / 80.0, std::abs(f.b_y() - 20.0) / 20.0});
    }
    // Monotonicity of the normalized curve.
    std::uniform_int_distribution<int> ax(1, 300), wd(1, 300), st(1, 800);
    std::uniform_real_distribution<double> y(-100.0, 100.0);
    int violations = 0;
    for (int k = 0; k < 10000; ++k) {
        const int a = ax(rng), b = a + wd(rng);
        double lo = y(rng), hi = y(rng);
        if (lo == hi) hi += 1.0;
        if (lo > hi) std::swap(lo, hi);
        const bool higher = k % 2 == 0;
        const QualityProfile p(a, higher ? lo : hi, b, higher ? hi : lo,
                               higher ? MetricOrientation::HigherIsBetter : MetricOrientation::LowerIsBetter);
        int s1 = st(rng), s2 = st(rng);
        if (s1 > s2) std::swap(s1, s2);
        const double n1 = eval_normalized(p, s1), n2 = eval_normalized(p, s2);
        if (n1 > n2 || n1 < 0.0 || n2 > 1.0) ++violations;
    }
    std::ostringstream d;
    d << exact << "/" << trials << " noiseless fits exact; noisy worst relative error " << fmt("%.3f", worst_rel)
      << "; " << violations << " monotonicity violations over 10000 profiles";
    verdict("quality-model recovery", exact == trials && worst_rel < 0.10 && violations == 0, d.str());
}

void check_workload_statistics()
{
    WorkloadConfig config;
    double gap_sum = 0.0;
    long n = 0;
    bool bounds = true;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        config.seed = seed;
        const Workload w = make_workload(config);
        double prev = 0.0;
        for (const auto& t : w.tasks) {
            gap_sum += t.arrival_time - prev;
            prev = t.arrival_time;
            ++n;
            bounds = bounds && t.demand >= 100 && t.demand <= 250;
        }
        for (const auto& a : w.asps) bounds = bounds && a.total_capacity >= 600 && a.total_capacity <= 1500;
    }
    const double mean = gap_sum / n;
    const double se = 0.288 / std::sqrt(static_cast<double>(n));
    std::ostringstream d;
    d << "mean inter-arrival " << fmt("%.5f", mean) << " h over " << n << " gaps, " << fmt("%.2f", std::abs(mean - 0.288) / se)
      << " standard errors from 0.288; demand and capacity bounds " << (bounds ? "hold" : "violated");
    verdict("workload statistics", std::abs(mean - 0.288) <= 3 * se && bounds, d.str());
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::cerr << "usage: acceptance <out_dir> [--reuse]\n";
        return 2;
    }
    const fs::path out = argv[1];
    const bool reuse = argc > 2 && std::string(argv[2]) == "--reuse";

    try {
        check_gradients();
        check_oracles();
        check_quality_model();
        check_workload_statistics();

        ExperimentConfig config;
        config.out_dir = out.string();
        if (!(reuse && fs::exists(out / "runs.csv"))) {
            fs::remove_all(out);
            std::cout << "running the default experiment into " << out.string() << " ..." << std::endl;
            run_suite(config, &std::cout);
        }
        check_experiment(out, config);
    } catch (const std::exception& e) {
        std::cout << "FAIL acceptance harness: " << e.what() << std::endl;
        ++failures;
    }
    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures;
}
