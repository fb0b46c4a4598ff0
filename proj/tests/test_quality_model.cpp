#include "aigc/quality_model.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace aigc;

namespace {

const QualityProfile kTvLike(50, 80.0, 200, 20.0, MetricOrientation::LowerIsBetter);
const QualityProfile kVifLike(100, 0.2, 400, 0.9, MetricOrientation::HigherIsBetter);

// Dense tabulation of the curve by walking one step at a time from the low
// anchor, accumulating the per-step slope.
std::vector<double> tabulate(int a_x, double a_y, int b_x, double b_y, int up_to)
{
    std::vector<double> table(static_cast<std::size_t>(up_to) + 1, a_y);
    const double per_step = (b_y - a_y) / (b_x - a_x);
    double v = a_y;
    for (int s = 1; s <= up_to; ++s) {
        if (s > a_x && s <= b_x) v = a_y + per_step * (s - a_x);
        if (s > b_x) v = b_y;
        table[static_cast<std::size_t>(s)] = v;
    }
    return table;
}

std::vector<CurveSample> synthesize(const QualityProfile& p, const std::vector<int>& steps)
{
    std::vector<CurveSample> out;
    for (int s : steps) out.push_back({s, eval_raw(p, s)});
    return out;
}

}  // namespace

TEST(QualityModel, EvalRawPlateausAndMidpoint)
{
    EXPECT_DOUBLE_EQ(eval_raw(kTvLike, 50), 80.0);
    EXPECT_DOUBLE_EQ(eval_raw(kTvLike, 125), 50.0);
    EXPECT_DOUBLE_EQ(eval_raw(kTvLike, 1), 80.0);
    EXPECT_DOUBLE_EQ(eval_raw(kTvLike, 200), 20.0);
    EXPECT_DOUBLE_EQ(eval_raw(kTvLike, 5000), 20.0);
}

TEST(QualityModel, EvalRawMatchesDenseTabulation)
{
    // 0.2 + 0.7 * 75 / 300 = 0.375
    EXPECT_NEAR(eval_raw(kVifLike, 175), 0.375, 1e-12);
    const auto table = tabulate(100, 0.2, 400, 0.9, 600);
    EXPECT_NEAR(table[175], 0.375, 1e-12);
    for (int s = 1; s <= 600; ++s) EXPECT_NEAR(eval_raw(kVifLike, s), table[static_cast<std::size_t>(s)], 1e-12) << s;
}

TEST(QualityModel, RejectsNonPositiveSteps)
{
    EXPECT_THROW(eval_raw(kTvLike, 0), std::domain_error);
    EXPECT_THROW(eval_normalized(kTvLike, -3), std::domain_error);
}

TEST(QualityModel, NormalizedAnchors)
{
    for (const auto& p : {kTvLike, kVifLike}) {
        EXPECT_DOUBLE_EQ(eval_normalized(p, p.a_x()), 0.0);
        EXPECT_DOUBLE_EQ(eval_normalized(p, p.b_x()), 1.0);
        EXPECT_DOUBLE_EQ(eval_normalized(p, p.b_x() + 77), 1.0);
    }
    EXPECT_DOUBLE_EQ(eval_normalized(kTvLike, 125), 0.5);
}

TEST(QualityModel, ConstructionValidates)
{
    EXPECT_THROW(QualityProfile(50, 1.0, 200, 1.0, MetricOrientation::HigherIsBetter), std::invalid_argument);
    EXPECT_THROW(QualityProfile(200, 0.0, 200, 1.0, MetricOrientation::HigherIsBetter), std::invalid_argument);
    EXPECT_THROW(QualityProfile(300, 0.0, 200, 1.0, MetricOrientation::HigherIsBetter), std::invalid_argument);
    EXPECT_THROW(QualityProfile(0, 0.0, 200, 1.0, MetricOrientation::HigherIsBetter), std::invalid_argument);
    EXPECT_THROW(QualityProfile(50, 1.0, 200, 0.0, MetricOrientation::HigherIsBetter), std::invalid_argument);
    EXPECT_THROW(QualityProfile(50, 0.0, 200, 1.0, MetricOrientation::LowerIsBetter), std::invalid_argument);
}

TEST(QualityModel, MonotoneSaturatingAndCoherentOnRandomProfiles)
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> ax(1, 300);
    std::uniform_int_distribution<int> width(1, 300);
    std::uniform_real_distribution<double> val(-100.0, 100.0);
    std::uniform_int_distribution<int> steps(1, 800);
    for (int i = 0; i < 10000; ++i) {
        const int a_x = ax(rng);
        const int b_x = a_x + width(rng);
        double lo = val(rng), hi = val(rng);
        if (lo == hi) hi += 1.0;
        if (lo > hi) std::swap(lo, hi);
        const bool higher = (i % 2) == 0;
        const QualityProfile p(a_x, higher ? lo : hi, b_x, higher ? hi : lo,
                               higher ? MetricOrientation::HigherIsBetter : MetricOrientation::LowerIsBetter);
        int s1 = steps(rng), s2 = steps(rng);
        if (s1 > s2) std::swap(s1, s2);
        const double n1 = eval_normalized(p, s1), n2 = eval_normalized(p, s2);
        ASSERT_LE(n1, n2 + 1e-15);
        ASSERT_GE(n1, 0.0);
        ASSERT_LE(n2, 1.0);
        const double r1 = eval_raw(p, s1), r2 = eval_raw(p, s2);
        if (higher)
            ASSERT_LE(r1, r2 + 1e-12);
        else
            ASSERT_GE(r1 + 1e-12, r2);
        if (s1 <= a_x && s2 <= a_x) ASSERT_EQ(n1, n2);
        if (s1 >= b_x && s2 >= b_x) ASSERT_EQ(n1, n2);
    }
}

TEST(QualityFit, RecoversNoiselessParameters)
{
    const auto samples = synthesize(kTvLike, {10, 50, 125, 200, 250});
    const QualityProfile fit = fit_profile(samples, MetricOrientation::LowerIsBetter);
    EXPECT_EQ(fit.a_x(), 50);
    EXPECT_EQ(fit.b_x(), 200);
    EXPECT_NEAR(fit.a_y(), 80.0, 1e-9);
    EXPECT_NEAR(fit.b_y(), 20.0, 1e-9);
    EXPECT_EQ(fit.orientation(), MetricOrientation::LowerIsBetter);
}

TEST(QualityFit, NoisySamplesWithinTenPercent)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    std::vector<CurveSample> samples;
    for (int s = 10; s <= 400; s += 10) samples.push_back({s, eval_raw(kTvLike, s) + noise(rng)});
    ASSERT_EQ(samples.size(), 40u);
    const QualityProfile fit = fit_profile(samples, MetricOrientation::LowerIsBetter);
    auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
    EXPECT_LT(rel(fit.a_x(), 50), 0.10);
    EXPECT_LT(rel(fit.b_x(), 200), 0.10);
    EXPECT_LT(rel(fit.a_y(), 80.0), 0.10);
    EXPECT_LT(rel(fit.b_y(), 20.0), 0.10);
}

TEST(QualityFit, IdempotentOnRandomNoiselessProfiles)
{
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> grid_index(1, 30);
    std::uniform_real_distribution<double> val(0.0, 10.0);
    std::vector<int> grid;
    for (int s = 10; s <= 400; s += 10) grid.push_back(s);
    for (int trial = 0; trial < 200; ++trial) {
        int i = grid_index(rng), j = grid_index(rng);
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        // a_x, b_x on the grid with samples strictly below a_x and beyond b_x.
        const int a_x = grid[static_cast<std::size_t>(i)];
        const int b_x = grid[static_cast<std::size_t>(j)];
        const double lo = val(rng), hi = lo + 0.5 + val(rng);
        const QualityProfile truth(a_x, lo, b_x, hi, MetricOrientation::HigherIsBetter);
        const QualityProfile fit = fit_profile(synthesize(truth, grid), MetricOrientation::HigherIsBetter);
        ASSERT_EQ(fit.a_x(), a_x);
        ASSERT_EQ(fit.b_x(), b_x);
        ASSERT_NEAR(fit.a_y(), lo, 1e-9);
        ASSERT_NEAR(fit.b_y(), hi, 1e-9);
    }
}

TEST(QualityFit, MatchesBruteForceLeastSquares)
{
    // Oracle: every breakpoint pair solved with a QR least-squares fit, then
    // the lexicographically smallest pair among the minimum-SSE ones.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> noise(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<CurveSample> samples;
        for (int s = 20; s <= 300; s += 20) samples.push_back({s, eval_raw(kTvLike, s) + noise(rng)});
        double best = std::numeric_limits<double>::infinity();
        int best_a = 0, best_b = 0;
        for (std::size_t i = 0; i < samples.size(); ++i)
            for (std::size_t j = i + 1; j < samples.size(); ++j) {
                const int a = samples[i].steps, b = samples[j].steps;
                Eigen::MatrixXd design(static_cast<Eigen::Index>(samples.size()), 2);
                Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
                for (std::size_t k = 0; k < samples.size(); ++k) {
                    const double t = std::clamp(double(samples[k].steps - a) / double(b - a), 0.0, 1.0);
                    design(static_cast<Eigen::Index>(k), 0) = 1.0 - t;
                    design(static_cast<Eigen::Index>(k), 1) = t;
                    y(static_cast<Eigen::Index>(k)) = samples[k].value;
                }
                const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(y);
                const double sse = (design * coef - y).squaredNorm();
                if (sse < best - 1e-9) {
                    best = sse;
                    best_a = a;
                    best_b = b;
                }
            }
        const QualityProfile fit = fit_profile(samples, MetricOrientation::LowerIsBetter);
        EXPECT_EQ(fit.a_x(), best_a);
        EXPECT_EQ(fit.b_x(), best_b);
    }
}

TEST(QualityFit, RejectsBadInput)
{
    const auto three = synthesize(kTvLike, {10, 100, 250});
    try {
        fit_profile(three, MetricOrientation::LowerIsBetter);
        FAIL() << "expected too-few-samples error";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("too few samples"), std::string::npos);
    }
    const std::vector<CurveSample> one_step{{100, 1.0}, {100, 2.0}, {100, 3.0}, {100, 4.0}};
    EXPECT_THROW(fit_profile(one_step, MetricOrientation::HigherIsBetter), std::invalid_argument);
    const std::vector<CurveSample> two_steps{{100, 1.0}, {100, 2.0}, {200, 3.0}, {200, 4.0}};
    EXPECT_THROW(fit_profile(two_steps, MetricOrientation::HigherIsBetter), std::invalid_argument);
}

TEST(QualityFit, OrientationViolationCarriesBestFit)
{
    // Rising data fitted as lower-is-better.
    const auto samples = synthesize(kVifLike, {50, 100, 200, 300, 400, 500});
    try {
        fit_profile(samples, MetricOrientation::LowerIsBetter);
        FAIL() << "expected FitError";
    } catch (const FitError& e) {
        EXPECT_EQ(e.best().a_x, 100);
        EXPECT_EQ(e.best().b_x, 400);
        EXPECT_NEAR(e.best().a_y, 0.2, 1e-9);
        EXPECT_NEAR(e.best().b_y, 0.9, 1e-9);
    }
}

TEST(QualityFit, ReadsCsvWithHeader)
{
    std::istringstream in("steps,value\n10,80\n50,80\r\n\n125,50.5\n");
    const auto samples = read_samples_csv(in);
    ASSERT_EQ(samples.size(), 3u);
    EXPECT_EQ(samples[2].steps, 125);
    EXPECT_DOUBLE_EQ(samples[2].value, 50.5);

    std::istringstream empty("");
    EXPECT_THROW(read_samples_csv(empty), std::invalid_argument);
    std::istringstream bad("steps,value\n10;80\n");
    EXPECT_THROW(read_samples_csv(bad), std::invalid_argument);
}
