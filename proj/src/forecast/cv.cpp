#include "xdf/forecast/cv.hpp"

#include "xdf/core/error.hpp"

#include <cmath>

namespace xdf::forecast {

namespace {

ForecastModel train_prefix(std::span<const DataRow> rows, std::size_t count, SvrParams params,
                           const TrainSchedule& schedule) {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    X.reserve(count);
    y.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        X.push_back(rows[i].x);
        y.push_back(rows[i].y);
    }
    return train_svr(X, y, params, schedule);
}

} // namespace

std::vector<CvFold> nested_cv(std::span<const DataRow> rows, std::span<const SvrParams> grid,
                              const CvConfig& config) {
    if (grid.empty()) {
        raise(Errc::config_error, "empty hyperparameter grid");
    }
    if (config.min_train < 2) {
        raise(Errc::config_error, "min_train must be at least 2");
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[i - 1].month < rows[i].month)) {
            raise(Errc::config_error, "rows must be strictly month-ordered");
        }
    }
    const int n = static_cast<int>(rows.size());
    if (config.outer_months < 1 || n - config.outer_months < config.min_train) {
        raise(Errc::insufficient_history,
              "need at least min_train + outer_months rows, have " + std::to_string(n));
    }

    std::vector<CvFold> folds;
    for (int outer = n - config.outer_months; outer < n; ++outer) {
        const std::size_t train_count = static_cast<std::size_t>(outer);
        const int v = std::min(config.inner_months, static_cast<int>(train_count) - config.min_train);

        SvrParams selected = grid[0];
        if (v >= 1 && grid.size() > 1) {
            double best_score = 0.0;
            bool have_best = false;
            for (const auto& candidate : grid) {
                double total = 0.0;
                for (int k = 0; k < v; ++k) {
                    const std::size_t inner_test = train_count - static_cast<std::size_t>(v) + k;
                    ForecastModel model = train_prefix(rows, inner_test, candidate, config.schedule);
                    total += std::abs(rows[inner_test].y - model.predict(rows[inner_test].x));
                }
                const double score = total / v;
                if (!have_best || score < best_score) {
                    best_score = score;
                    selected = candidate;
                    have_best = true;
                }
            }
        }

        ForecastModel model = train_prefix(rows, train_count, selected, config.schedule);
        CvFold fold;
        fold.month = rows[outer].month;
        fold.selected = selected;
        fold.prediction = model.predict(rows[outer].x);
        fold.actual = rows[outer].y;
        fold.abs_error = std::abs(fold.actual - fold.prediction);
        fold.residual = fold.actual - fold.prediction;
        fold.last_training_month = rows[train_count - 1].month;
        folds.push_back(fold);
    }
    return folds;
}

} // namespace xdf::forecast
