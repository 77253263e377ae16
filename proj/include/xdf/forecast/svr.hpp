#pragma once

#include <span>
#include <string>
#include <vector>

namespace xdf::forecast {

struct SvrParams {
    double C = 10.0;
    double epsilon = 0.1;

    bool operator==(const SvrParams&) const = default;
};

struct TrainSchedule {
    int iterations = 800;
    double learning_rate = 0.1;
};

struct FeatureScaling {
    std::vector<double> mean;
    std::vector<double> scale; // population std; 1 where the column is constant
};

/**
 * Linear epsilon-insensitive support vector regressor.
 *
 * Objective: 1/2 ||w||^2 + C * sum_i max(0, |y_i - w.x_i - b| - epsilon),
 * minimized by deterministic full-batch subgradient descent on the
 * equivalent per-sample form lambda/2 ||w||^2 + mean_i hinge_i with
 * lambda = 1 / (C * n). Descent starts from the mean predictor (w = 0,
 * b = mean(y)) with steps eta_t = learning_rate * std(y) / sqrt(t + 1);
 * iterates from the second half of the schedule are averaged. The returned
 * coefficients are whichever of {tail average, best iterate seen} has the
 * lower epsilon-insensitive training loss; the zero model is candidate 0,
 * so the result never does worse than it. Features are standardized
 * internally; no randomness anywhere, so identical inputs and schedule give
 * bitwise-identical models.
 */
class ForecastModel {
public:
    ForecastModel() = default;
    ForecastModel(std::vector<double> weights, double bias, SvrParams params, FeatureScaling scaling);

    double predict(std::span<const double> x) const;

    /// Total epsilon-insensitive loss, sum_i max(0, |y_i - f(x_i)| - epsilon).
    double epsilon_loss(const std::vector<std::vector<double>>& X, std::span<const double> y) const;

    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }
    const SvrParams& params() const { return params_; }
    const FeatureScaling& scaling() const { return scaling_; }

private:
    std::vector<double> weights_; // in standardized feature space
    double bias_ = 0.0;
    SvrParams params_;
    FeatureScaling scaling_;
};

FeatureScaling fit_scaling(const std::vector<std::vector<double>>& X);
std::vector<double> apply_scaling(const FeatureScaling& scaling, std::span<const double> x);

/// Throws DegenerateInput for fewer than 2 rows or any non-finite entry.
ForecastModel train_svr(const std::vector<std::vector<double>>& X, std::span<const double> y,
                        SvrParams params, TrainSchedule schedule);

} // namespace xdf::forecast
