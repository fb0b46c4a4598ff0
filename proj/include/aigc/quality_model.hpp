#pragma once

#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aigc {

enum class MetricOrientation { HigherIsBetter, LowerIsBetter };

std::string_view to_string(MetricOrientation o);
MetricOrientation parse_orientation(std::string_view text);

// Four-parameter perceived-quality curve: flat at a_y up to a_x inference
// steps, linear between the anchors, flat at b_y from b_x onwards.
class QualityProfile {
public:
    // Throws std::invalid_argument unless a_x < b_x, a_x >= 1, a_y != b_y and
    // the anchors agree with the orientation.
    QualityProfile(int a_x, double a_y, int b_x, double b_y, MetricOrientation orientation);

    int a_x() const { return a_x_; }
    double a_y() const { return a_y_; }
    int b_x() const { return b_x_; }
    double b_y() const { return b_y_; }
    MetricOrientation orientation() const { return orientation_; }

    friend bool operator==(const QualityProfile&, const QualityProfile&) = default;

private:
    int a_x_;
    double a_y_;
    int b_x_;
    double b_y_;
    MetricOrientation orientation_;
};

struct CurveSample {
    int steps;
    double value;
};

/// Raw metric value after `steps` inference steps. Throws std::domain_error for steps < 1.
double eval_raw(const QualityProfile& profile, int steps);

/// Quality score in [0,1]: 0 on the low plateau, 1 on the saturated plateau,
/// independent of the metric's orientation and scale.
double eval_normalized(const QualityProfile& profile, int steps);

// Raw anchors of a fit whose result could not be turned into a valid profile.
struct FitParameters {
    int a_x;
    double a_y;
    int b_x;
    double b_y;
    double sse;
};

class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, FitParameters best)
        : std::runtime_error(what), best_(best) {}
    const FitParameters& best() const { return best_; }

private:
    FitParameters best_;
};

/// Least-squares fit of the two-plateau piecewise-linear curve.
///
/// Breakpoints are searched exhaustively over pairs of observed step values;
/// for each pair the plateau heights have a closed-form 2x2 least-squares
/// solution. Equal-SSE pairs resolve to the smallest a_x, then smallest b_x.
/// Throws std::invalid_argument on fewer than 4 samples or fewer than 3
/// distinct step values, and FitError when the best fit contradicts the
/// requested orientation.
QualityProfile fit_profile(std::span<const CurveSample> samples, MetricOrientation orientation);

/// Reads `steps,value` rows after a mandatory header line.
std::vector<CurveSample> read_samples_csv(std::istream& in);

}  // namespace aigc
