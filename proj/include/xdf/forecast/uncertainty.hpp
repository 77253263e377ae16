#pragma once

#include "xdf/forecast/features.hpp"
#include "xdf/forecast/svr.hpp"

#include <span>
#include <string>
#include <vector>

namespace xdf::forecast {

struct Prediction {
    std::string material;
    Month target;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> residual_pool;
};

/// Nearest-rank empirical quantile: for sorted values v[0..n-1] and
/// q in [0, 1], returns v[max(1, ceil(q * n)) - 1].
double nearest_rank_quantile(std::span<const double> sorted_values, double q);

/// Interval from the model output plus empirical residual quantiles, then
/// clamped so 0 <= lower <= value <= upper (demand is non-negative; a
/// negative raw output is lifted to the clamped lower bound).
Prediction predict_with_uncertainty(const ForecastModel& model, const FeatureVector& instance,
                                    std::span<const double> residual_pool, double q_low, double q_high);

} // namespace xdf::forecast
