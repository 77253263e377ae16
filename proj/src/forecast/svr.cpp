#include "xdf/forecast/svr.hpp"

#include "xdf/core/error.hpp"

#include <cmath>

namespace xdf::forecast {

namespace {

double epsilon_loss_standardized(const std::vector<std::vector<double>>& Z, std::span<const double> y,
                                 const std::vector<double>& w, double b, double epsilon) {
    double loss = 0.0;
    for (std::size_t i = 0; i < Z.size(); ++i) {
        double pred = b;
        for (std::size_t f = 0; f < w.size(); ++f) {
            pred += w[f] * Z[i][f];
        }
        loss += std::max(0.0, std::abs(y[i] - pred) - epsilon);
    }
    return loss;
}

} // namespace

ForecastModel::ForecastModel(std::vector<double> weights, double bias, SvrParams params,
                             FeatureScaling scaling)
    : weights_(std::move(weights)), bias_(bias), params_(params), scaling_(std::move(scaling)) {}

double ForecastModel::predict(std::span<const double> x) const {
    double out = bias_;
    for (std::size_t f = 0; f < weights_.size(); ++f) {
        out += weights_[f] * (x[f] - scaling_.mean[f]) / scaling_.scale[f];
    }
    return out;
}

double ForecastModel::epsilon_loss(const std::vector<std::vector<double>>& X,
                                   std::span<const double> y) const {
    double loss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        loss += std::max(0.0, std::abs(y[i] - predict(X[i])) - params_.epsilon);
    }
    return loss;
}

FeatureScaling fit_scaling(const std::vector<std::vector<double>>& X) {
    const std::size_t d = X.empty() ? 0 : X.front().size();
    FeatureScaling scaling;
    scaling.mean.assign(d, 0.0);
    scaling.scale.assign(d, 1.0);
    if (X.empty()) {
        return scaling;
    }
    for (std::size_t f = 0; f < d; ++f) {
        double sum = 0.0;
        for (const auto& row : X) {
            sum += row[f];
        }
        scaling.mean[f] = sum / static_cast<double>(X.size());
        double sq = 0.0;
        for (const auto& row : X) {
            const double c = row[f] - scaling.mean[f];
            sq += c * c;
        }
        const double std_dev = std::sqrt(sq / static_cast<double>(X.size()));
        scaling.scale[f] = std_dev > 1e-12 ? std_dev : 1.0;
    }
    return scaling;
}

std::vector<double> apply_scaling(const FeatureScaling& scaling, std::span<const double> x) {
    std::vector<double> z(x.size());
    for (std::size_t f = 0; f < x.size(); ++f) {
        z[f] = (x[f] - scaling.mean[f]) / scaling.scale[f];
    }
    return z;
}

ForecastModel train_svr(const std::vector<std::vector<double>>& X, std::span<const double> y,
                        SvrParams params, TrainSchedule schedule) {
    const std::size_t n = X.size();
    if (n < 2 || y.size() != n) {
        raise(Errc::degenerate_input, "need at least 2 training rows");
    }
    const std::size_t d = X.front().size();
    for (const auto& row : X) {
        if (row.size() != d) {
            raise(Errc::degenerate_input, "ragged feature matrix");
        }
        for (double v : row) {
            if (!std::isfinite(v)) {
                raise(Errc::degenerate_input, "non-finite feature value");
            }
        }
    }
    for (double v : y) {
        if (!std::isfinite(v)) {
            raise(Errc::degenerate_input, "non-finite target value");
        }
    }
    if (params.C <= 0 || params.epsilon < 0) {
        raise(Errc::degenerate_input, "C must be positive and epsilon non-negative");
    }

    FeatureScaling scaling = fit_scaling(X);
    std::vector<std::vector<double>> Z(n);
    for (std::size_t i = 0; i < n; ++i) {
        Z[i] = apply_scaling(scaling, X[i]);
    }

    const double lambda = 1.0 / (params.C * static_cast<double>(n));

    // step sizes are scaled by the target spread so training is equivariant
    // under rescaling of y
    double y_mean = 0.0;
    for (double v : y) {
        y_mean += v;
    }
    y_mean /= static_cast<double>(n);
    double y_var = 0.0;
    for (double v : y) {
        y_var += (v - y_mean) * (v - y_mean);
    }
    const double y_std = std::sqrt(y_var / static_cast<double>(n));
    const double step_scale = y_std > 1e-12 ? y_std : (std::abs(y_mean) > 1e-12 ? std::abs(y_mean) : 1.0);

    std::vector<double> w(d, 0.0);
    double b = 0.0;

    // the zero model is candidate 0, so the result can never lose to it
    std::vector<double> best_w = w;
    double best_b = b;
    double best_loss = epsilon_loss_standardized(Z, y, w, b, params.epsilon);

    // descend from the mean predictor
    b = y_mean;

    const int avg_start = schedule.iterations / 2;
    std::vector<double> avg_w(d, 0.0);
    double avg_b = 0.0;
    int avg_count = 0;

    std::vector<double> grad(d, 0.0);
    for (int t = 0; t < schedule.iterations; ++t) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double pred = b;
            for (std::size_t f = 0; f < d; ++f) {
                pred += w[f] * Z[i][f];
            }
            const double residual = y[i] - pred;
            loss += std::max(0.0, std::abs(residual) - params.epsilon);
            if (std::abs(residual) > params.epsilon) {
                const double sign = residual > 0 ? 1.0 : -1.0;
                for (std::size_t f = 0; f < d; ++f) {
                    grad[f] -= sign * Z[i][f];
                }
                grad_b -= sign;
            }
        }
        if (loss < best_loss) {
            best_loss = loss;
            best_w = w;
            best_b = b;
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        const double eta =
            schedule.learning_rate * step_scale / std::sqrt(static_cast<double>(t) + 1.0);
        for (std::size_t f = 0; f < d; ++f) {
            w[f] -= eta * (lambda * w[f] + grad[f] * inv_n);
        }
        b -= eta * grad_b * inv_n;
        if (t >= avg_start) {
            for (std::size_t f = 0; f < d; ++f) {
                avg_w[f] += w[f];
            }
            avg_b += b;
            ++avg_count;
        }
    }
    if (avg_count > 0) {
        for (double& v : avg_w) {
            v /= avg_count;
        }
        avg_b /= avg_count;
        const double avg_loss = epsilon_loss_standardized(Z, y, avg_w, avg_b, params.epsilon);
        if (avg_loss <= best_loss) {
            best_loss = avg_loss;
            best_w = std::move(avg_w);
            best_b = avg_b;
        }
    }
    return ForecastModel(std::move(best_w), best_b, params, std::move(scaling));
}

} // namespace xdf::forecast
