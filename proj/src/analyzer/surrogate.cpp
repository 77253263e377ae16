#include "xdf/analyzer/surrogate.hpp"

#include "xdf/core/error.hpp"
#include "xdf/core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace xdf::analyzer {

namespace {

constexpr std::size_t kBlockRows = 256;

/// Cholesky solve of the symmetric positive-definite system A x = rhs.
std::vector<double> cholesky_solve(std::vector<double> A, std::vector<double> rhs, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double diag = A[j * n + j];
        for (std::size_t k = 0; k < j; ++k) {
            diag -= A[j * n + k] * A[j * n + k];
        }
        if (diag <= 0.0 || !std::isfinite(diag)) {
            raise(Errc::singular_system, "weighted normal equations not positive definite");
        }
        A[j * n + j] = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double value = A[i * n + j];
            for (std::size_t k = 0; k < j; ++k) {
                value -= A[i * n + k] * A[j * n + k];
            }
            A[i * n + j] = value / A[j * n + j];
        }
    }
    // forward then backward substitution
    for (std::size_t i = 0; i < n; ++i) {
        double value = rhs[i];
        for (std::size_t k = 0; k < i; ++k) {
            value -= A[i * n + k] * rhs[k];
        }
        rhs[i] = value / A[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double value = rhs[i];
        for (std::size_t k = i + 1; k < n; ++k) {
            value -= A[k * n + i] * rhs[k];
        }
        rhs[i] = value / A[i * n + i];
    }
    return rhs;
}

std::vector<double> proximity_weights(const std::vector<std::vector<double>>& samples,
                                      std::span<const double> instance, double sigma) {
    std::vector<double> weights(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double sq = 0.0;
        for (std::size_t f = 0; f < instance.size(); ++f) {
            const double diff = samples[i][f] - instance[f];
            sq += diff * diff;
        }
        weights[i] = std::exp(-sq / (sigma * sigma));
    }
    return weights;
}

/// Columns = selected features plus a trailing intercept column of ones.
std::vector<std::vector<double>> select_columns(const std::vector<std::vector<double>>& samples,
                                                std::span<const std::size_t> selected) {
    std::vector<std::vector<double>> X(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        X[i].reserve(selected.size() + 1);
        for (std::size_t f : selected) {
            X[i].push_back(samples[i][f]);
        }
        X[i].push_back(1.0);
    }
    return X;
}

double weighted_r_squared(const std::vector<std::vector<double>>& X, std::span<const double> y,
                          std::span<const double> weights, std::span<const double> beta) {
    double weight_sum = 0.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        weight_sum += weights[i];
        mean += weights[i] * y[i];
    }
    mean /= weight_sum;
    double ss_res = 0.0;
    double ss_tot = 0.0;
    double energy = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double fitted = 0.0;
        for (std::size_t c = 0; c < beta.size(); ++c) {
            fitted += beta[c] * X[i][c];
        }
        const double res = y[i] - fitted;
        const double centered = y[i] - mean;
        ss_res += weights[i] * res * res;
        ss_tot += weights[i] * centered * centered;
        energy += weights[i] * y[i] * y[i];
    }
    // constant target up to rounding: a flat fit is perfect
    const double floor = 1e-15 * std::max(1.0, energy);
    if (ss_tot < floor) {
        return ss_res < floor ? 1.0 : 0.0;
    }
    return 1.0 - ss_res / ss_tot;
}

bool magnitude_order(double lhs_abs, const std::string& lhs_id, double rhs_abs, const std::string& rhs_id) {
    if (lhs_abs != rhs_abs) {
        return lhs_abs > rhs_abs;
    }
    return lhs_id < rhs_id;
}

} // namespace

std::vector<std::vector<double>> sample_perturbations(std::span<const double> instance, int n,
                                                      std::span<const double> scale, std::uint64_t seed) {
    for (double v : instance) {
        if (!std::isfinite(v)) {
            raise(Errc::non_finite_instance, "instance has a non-finite value");
        }
    }
    for (double s : scale) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            raise(Errc::config_error, "perturbation scale must be finite and positive");
        }
    }
    if (n < 1) {
        raise(Errc::config_error, "need at least one sample");
    }
    const std::size_t d = instance.size();
    std::vector<std::vector<double>> samples(static_cast<std::size_t>(n));
    samples[0].assign(instance.begin(), instance.end());
    for (std::size_t i = 1; i < samples.size(); ++i) {
        samples[i].resize(d);
        for (std::size_t f = 0; f < d; ++f) {
            samples[i][f] = instance[f] + scale[f] * keyed_gaussian(seed, i * d + f);
        }
    }
    return samples;
}

std::vector<double> eval_black_box(const BlackBox& box, const std::vector<std::vector<double>>& samples,
                                   ExecPolicy policy) {
    std::vector<double> outputs(samples.size());
    for_each_index(samples.size(), policy, [&](std::size_t i) { outputs[i] = box(samples[i]); });
    return outputs;
}

std::vector<double> weighted_ridge_fit(const std::vector<std::vector<double>>& X,
                                       std::span<const double> y, std::span<const double> weights,
                                       double lambda, ExecPolicy policy) {
    const std::size_t n = X.size();
    const std::size_t p = X.front().size(); // includes the intercept column
    const std::size_t n_blocks = (n + kBlockRows - 1) / kBlockRows;

    // per-block partial Gram matrices and right-hand sides
    std::vector<std::vector<double>> partial_A(n_blocks, std::vector<double>(p * p, 0.0));
    std::vector<std::vector<double>> partial_rhs(n_blocks, std::vector<double>(p, 0.0));
    for_each_block(n, kBlockRows, policy, [&](std::size_t b, std::size_t begin, std::size_t end) {
        auto& A = partial_A[b];
        auto& rhs = partial_rhs[b];
        for (std::size_t i = begin; i < end; ++i) {
            const double w = weights[i];
            for (std::size_t r = 0; r < p; ++r) {
                const double wr = w * X[i][r];
                for (std::size_t c = 0; c <= r; ++c) {
                    A[r * p + c] += wr * X[i][c];
                }
                rhs[r] += wr * y[i];
            }
        }
    });

    std::vector<double> A(p * p, 0.0);
    std::vector<double> rhs(p, 0.0);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        for (std::size_t k = 0; k < p * p; ++k) {
            A[k] += partial_A[b][k];
        }
        for (std::size_t k = 0; k < p; ++k) {
            rhs[k] += partial_rhs[b][k];
        }
    }
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = r + 1; c < p; ++c) {
            A[r * p + c] = A[c * p + r];
        }
    }
    // ridge on every coefficient except the trailing intercept
    for (std::size_t r = 0; r + 1 < p; ++r) {
        A[r * p + r] += lambda;
    }
    return cholesky_solve(std::move(A), std::move(rhs), p);
}

SurrogateExplanation fit_surrogate(const std::vector<std::vector<double>>& samples,
                                   std::span<const double> outputs, std::span<const double> instance,
                                   std::span<const std::string> feature_ids, double sigma, int top_k,
                                   double lambda, ExecPolicy policy) {
    const std::size_t d = instance.size();
    if (samples.empty() || outputs.size() != samples.size()) {
        raise(Errc::config_error, "samples and outputs must align");
    }
    for (double v : outputs) {
        if (!std::isfinite(v)) {
            raise(Errc::config_error, "black box produced a non-finite output");
        }
    }
    if (!(sigma > 0.0)) {
        raise(Errc::config_error, "kernel width must be positive");
    }
    if (top_k < 1 || static_cast<std::size_t>(top_k) > d) {
        raise(Errc::config_error, "top_k must be in [1, feature count]");
    }

    const std::vector<double> weights = proximity_weights(samples, instance, sigma);

    // full fit over all features to pick the top_k by |coefficient|
    std::vector<std::size_t> all(d);
    std::iota(all.begin(), all.end(), 0);
    auto X_full = select_columns(samples, all);
    auto beta_full = weighted_ridge_fit(X_full, outputs, weights, lambda, policy);

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return magnitude_order(std::abs(beta_full[a]), feature_ids[a], std::abs(beta_full[b]),
                               feature_ids[b]);
    });
    std::vector<std::size_t> selected(order.begin(), order.begin() + top_k);
    std::sort(selected.begin(), selected.end()); // column order stays stable

    auto X_sel = select_columns(samples, selected);
    auto beta_sel = weighted_ridge_fit(X_sel, outputs, weights, lambda, policy);

    SurrogateExplanation explanation;
    explanation.feature_ids.assign(feature_ids.begin(), feature_ids.end());
    explanation.coefficients.assign(d, 0.0);
    for (std::size_t c = 0; c < selected.size(); ++c) {
        explanation.coefficients[selected[c]] = beta_sel[c];
    }
    explanation.intercept = beta_sel.back();
    explanation.fidelity = weighted_r_squared(X_sel, outputs, weights, beta_sel);

    std::vector<std::size_t> rank_order = selected;
    std::sort(rank_order.begin(), rank_order.end(), [&](std::size_t a, std::size_t b) {
        return magnitude_order(std::abs(explanation.coefficients[a]), feature_ids[a],
                               std::abs(explanation.coefficients[b]), feature_ids[b]);
    });
    for (std::size_t f : rank_order) {
        explanation.ranking.push_back(feature_ids[f]);
    }
    return explanation;
}

std::vector<std::pair<std::string, double>> rank_features(const SurrogateExplanation& explanation) {
    std::vector<std::size_t> order(explanation.feature_ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return magnitude_order(std::abs(explanation.coefficients[a]), explanation.feature_ids[a],
                               std::abs(explanation.coefficients[b]), explanation.feature_ids[b]);
    });
    std::vector<std::pair<std::string, double>> ranked;
    ranked.reserve(order.size());
    for (std::size_t f : order) {
        ranked.emplace_back(explanation.feature_ids[f], explanation.coefficients[f]);
    }
    return ranked;
}

SurrogateExplanation analyze(const BlackBox& box, std::span<const double> instance,
                             std::span<const std::string> feature_ids, const AnalyzerConfig& config,
                             ExecPolicy policy) {
    if (config.n_samples < 10) {
        raise(Errc::config_error, "analyzer needs at least 10 samples");
    }
    std::vector<double> scale = config.scale;
    if (scale.empty()) {
        scale.assign(instance.size(), 1.0);
    }
    const double sigma =
        config.sigma > 0.0 ? config.sigma : 0.75 * std::sqrt(static_cast<double>(instance.size()));
    auto samples = sample_perturbations(instance, config.n_samples, scale, config.seed);
    auto outputs = eval_black_box(box, samples, policy);
    return fit_surrogate(samples, outputs, instance, feature_ids, sigma, config.top_k, config.lambda,
                         policy);
}

} // namespace xdf::analyzer
