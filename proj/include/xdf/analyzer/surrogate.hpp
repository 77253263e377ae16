#pragma once

#include "xdf/core/parallel.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace xdf::analyzer {

struct AnalyzerConfig {
    int n_samples = 512;
    double sigma = 0.0; // kernel width; 0 selects the default 0.75 * sqrt(d)
    int top_k = 4;
    std::uint64_t seed = 0;
    double lambda = 1e-6;        // ridge damping of the weighted fits
    std::vector<double> scale;   // per-feature perturbation std; empty = 1s
};

/**
 * Local surrogate of a black box around one instance: the box is evaluated
 * on Gaussian perturbations, samples are weighted by proximity
 * w_i = exp(-||x - z_i||^2 / sigma^2), and a ridge-damped weighted
 * least-squares line is fit. Feature selection keeps the top_k coefficients
 * of a full fit by absolute value, then refits on the selected subset.
 */
struct SurrogateExplanation {
    std::vector<std::string> feature_ids;
    std::vector<double> coefficients; // per feature; zero outside the selected subset
    double intercept = 0.0;
    double fidelity = 0.0;            // weighted R^2 of the final fit, in (-inf, 1]
    std::vector<std::string> ranking; // selected ids by |coefficient| desc, ties by id
};

using BlackBox = std::function<double(std::span<const double>)>;

/// n rows: row 0 is the instance itself, rows 1..n-1 add per-feature
/// Gaussian noise. Each entry is keyed by (seed, row, column), so the matrix
/// is identical under any evaluation order. Throws NonFiniteInstance.
std::vector<std::vector<double>> sample_perturbations(std::span<const double> instance, int n,
                                                      std::span<const double> scale, std::uint64_t seed);

/// Black-box outputs per sample row; rows are independent, so the parallel
/// policy yields bitwise-identical results.
std::vector<double> eval_black_box(const BlackBox& box, const std::vector<std::vector<double>>& samples,
                                   ExecPolicy policy = ExecPolicy::serial);

SurrogateExplanation fit_surrogate(const std::vector<std::vector<double>>& samples,
                                   std::span<const double> outputs, std::span<const double> instance,
                                   std::span<const std::string> feature_ids, double sigma, int top_k,
                                   double lambda, ExecPolicy policy = ExecPolicy::serial);

/// All features of the explanation ordered by |coefficient| descending with
/// deterministic lexicographic tie-break; signs preserved.
std::vector<std::pair<std::string, double>> rank_features(const SurrogateExplanation& explanation);

/// Full pipeline step: sample, evaluate, fit.
SurrogateExplanation analyze(const BlackBox& box, std::span<const double> instance,
                             std::span<const std::string> feature_ids, const AnalyzerConfig& config,
                             ExecPolicy policy = ExecPolicy::serial);

/// Exposed for the oracle tests: solves (X^T W X + lambda I') beta = X^T W y
/// with an unpenalized trailing intercept column, accumulating the normal
/// equations over fixed 256-row blocks (combined in block order, so serial
/// and parallel agree bitwise). Throws SingularSystem if the damped system
/// still fails to factor.
std::vector<double> weighted_ridge_fit(const std::vector<std::vector<double>>& X,
                                       std::span<const double> y, std::span<const double> weights,
                                       double lambda, ExecPolicy policy = ExecPolicy::serial);

} // namespace xdf::analyzer
