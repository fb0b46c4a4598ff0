#include "aigc/quality_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace aigc {

std::string_view to_string(MetricOrientation o)
{
    return o == MetricOrientation::HigherIsBetter ? "higher_is_better" : "lower_is_better";
}

MetricOrientation parse_orientation(std::string_view text)
{
    if (text == "higher_is_better") return MetricOrientation::HigherIsBetter;
    if (text == "lower_is_better") return MetricOrientation::LowerIsBetter;
    throw std::invalid_argument("unknown metric orientation: " + std::string(text));
}

QualityProfile::QualityProfile(int a_x, double a_y, int b_x, double b_y, MetricOrientation orientation)
    : a_x_(a_x), a_y_(a_y), b_x_(b_x), b_y_(b_y), orientation_(orientation)
{
    if (a_x < 1) throw std::invalid_argument("quality profile: a_x must be >= 1");
    if (a_x >= b_x) throw std::invalid_argument("quality profile: a_x must be < b_x");
    if (!std::isfinite(a_y) || !std::isfinite(b_y))
        throw std::invalid_argument("quality profile: non-finite anchor value");
    if (a_y == b_y) throw std::invalid_argument("quality profile: degenerate (a_y == b_y)");
    if (orientation == MetricOrientation::HigherIsBetter && a_y > b_y)
        throw std::invalid_argument("quality profile: higher-is-better requires a_y <= b_y");
    if (orientation == MetricOrientation::LowerIsBetter && a_y < b_y)
        throw std::invalid_argument("quality profile: lower-is-better requires a_y >= b_y");
}

namespace {

// Position of `steps` along the ramp, clamped to [0,1].
double ramp_fraction(int a_x, int b_x, double steps)
{
    if (steps <= a_x) return 0.0;
    if (steps >= b_x) return 1.0;
    return (steps - a_x) / static_cast<double>(b_x - a_x);
}

}  // namespace

double eval_raw(const QualityProfile& profile, int steps)
{
    if (steps < 1) throw std::domain_error("eval_raw: steps must be >= 1");
    if (steps <= profile.a_x()) return profile.a_y();
    if (steps >= profile.b_x()) return profile.b_y();
    return profile.a_y() + (profile.b_y() - profile.a_y()) * (steps - profile.a_x()) /
                               static_cast<double>(profile.b_x() - profile.a_x());
}

double eval_normalized(const QualityProfile& profile, int steps)
{
    const double r = eval_raw(profile, steps);
    const double a = profile.a_y();
    const double b = profile.b_y();
    const double q = profile.orientation() == MetricOrientation::HigherIsBetter ? (r - a) / (b - a)
                                                                                : (a - r) / (a - b);
    return std::clamp(q, 0.0, 1.0);
}

QualityProfile fit_profile(std::span<const CurveSample> samples, MetricOrientation orientation)
{
    if (samples.size() < 4) throw std::invalid_argument("fit_profile: too few samples (need >= 4)");
    std::set<int> distinct;
    double value_scale = 0.0;
    for (const auto& s : samples) {
        if (s.steps < 1) throw std::invalid_argument("fit_profile: sample with steps < 1");
        distinct.insert(s.steps);
        value_scale += s.value * s.value;
    }
    if (distinct.size() < 3)
        throw std::invalid_argument("fit_profile: samples must span at least 3 distinct step values");

    const std::vector<int> grid(distinct.begin(), distinct.end());
    const double tie_tol = 1e-12 * std::max(1.0, value_scale);

    FitParameters best{0, 0.0, 0, 0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            const int a_x = grid[i];
            const int b_x = grid[j];
            // Normal equations for v ~ a_y * (1 - t) + b_y * t.
            double s00 = 0, s01 = 0, s11 = 0, r0 = 0, r1 = 0;
            for (const auto& s : samples) {
                const double t = ramp_fraction(a_x, b_x, s.steps);
                const double u = 1.0 - t;
                s00 += u * u;
                s01 += u * t;
                s11 += t * t;
                r0 += u * s.value;
                r1 += t * s.value;
            }
            const double det = s00 * s11 - s01 * s01;
            if (std::abs(det) <= 1e-12 * std::max(1.0, s00 * s11)) continue;
            const double a_y = (r0 * s11 - r1 * s01) / det;
            const double b_y = (s00 * r1 - s01 * r0) / det;
            double sse = 0.0;
            for (const auto& s : samples) {
                const double t = ramp_fraction(a_x, b_x, s.steps);
                const double e = a_y * (1.0 - t) + b_y * t - s.value;
                sse += e * e;
            }
            // Strict improvement beyond the tolerance; grid order gives the tie-break.
            if (sse < best.sse - tie_tol) best = FitParameters{a_x, a_y, b_x, b_y, sse};
        }
    }
    if (!std::isfinite(best.sse)) throw FitError("fit_profile: no identifiable breakpoint pair", best);

    const bool ok = orientation == MetricOrientation::HigherIsBetter ? best.a_y < best.b_y
                                                                     : best.a_y > best.b_y;
    if (!ok) {
        std::ostringstream msg;
        msg << "fit_profile: best fit (a_x=" << best.a_x << ", a_y=" << best.a_y << ", b_x=" << best.b_x
            << ", b_y=" << best.b_y << ") violates orientation " << to_string(orientation);
        throw FitError(msg.str(), best);
    }
    return QualityProfile(best.a_x, best.a_y, best.b_x, best.b_y, orientation);
}

std::vector<CurveSample> read_samples_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("samples csv: missing header row");
    std::vector<CurveSample> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("samples csv: line " + std::to_string(line_no) + ": expected steps,value");
        try {
            std::size_t used = 0;
            const std::string steps_text = line.substr(0, comma);
            const int steps = std::stoi(steps_text, &used);
            if (used != steps_text.size()) throw std::invalid_argument("trailing characters");
            const double value = std::stod(line.substr(comma + 1));
            out.push_back({steps, value});
        } catch (const std::exception&) {
            throw std::invalid_argument("samples csv: line " + std::to_string(line_no) + ": unparsable row");
        }
    }
    return out;
}

}  // namespace aigc
