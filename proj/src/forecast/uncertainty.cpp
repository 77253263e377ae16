#include "xdf/forecast/uncertainty.hpp"

#include "xdf/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace xdf::forecast {

double nearest_rank_quantile(std::span<const double> sorted_values, double q) {
    if (sorted_values.empty()) {
        raise(Errc::empty_residual_pool, "quantile of empty pool");
    }
    const auto n = static_cast<double>(sorted_values.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted_values.size());
    return sorted_values[rank - 1];
}

Prediction predict_with_uncertainty(const ForecastModel& model, const FeatureVector& instance,
                                    std::span<const double> residual_pool, double q_low, double q_high) {
    if (residual_pool.empty()) {
        raise(Errc::empty_residual_pool, "no residuals for " + instance.material);
    }
    if (!(0.0 <= q_low && q_low < q_high && q_high <= 1.0)) {
        raise(Errc::config_error, "quantiles must satisfy 0 <= q_low < q_high <= 1");
    }
    std::vector<double> sorted(residual_pool.begin(), residual_pool.end());
    std::sort(sorted.begin(), sorted.end());

    const double raw = model.predict(instance.numeric());
    double lower = raw + nearest_rank_quantile(sorted, q_low);
    double upper = raw + nearest_rank_quantile(sorted, q_high);
    lower = std::max(0.0, std::min(lower, raw));
    const double value = std::max(raw, lower);
    upper = std::max(upper, value);

    Prediction prediction;
    prediction.material = instance.material;
    prediction.target = instance.target;
    prediction.value = value;
    prediction.lower = lower;
    prediction.upper = upper;
    prediction.residual_pool = std::move(sorted);
    return prediction;
}

} // namespace xdf::forecast
