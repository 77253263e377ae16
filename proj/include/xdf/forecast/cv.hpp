#pragma once

#include "xdf/core/time.hpp"
#include "xdf/forecast/svr.hpp"

#include <span>
#include <vector>

namespace xdf::forecast {

struct DataRow {
    Month month;
    std::vector<double> x;
    double y = 0.0;
};

struct CvFold {
    Month month;
    SvrParams selected;
    double prediction = 0.0;
    double actual = 0.0;
    double abs_error = 0.0;
    double residual = 0.0; // actual - prediction
    Month last_training_month;
};

struct CvConfig {
    int outer_months = 8;
    int min_train = 4;
    int inner_months = 3;
    TrainSchedule schedule;
};

/**
 * Time-ordered nested cross-validation.
 *
 * The outer folds are the last `outer_months` rows, evaluated oldest first.
 * For outer test month t, only rows with month < t are visible. Inner
 * selection scores each grid candidate by rolling one-step-ahead absolute
 * error over the last v = min(inner_months, |train| - min_train) training
 * months (each inner month is predicted by a model trained on the rows
 * before it); the candidate with the lowest mean error wins, ties resolved
 * by grid order. When v < 1 the first grid entry is used. The winner is
 * retrained on all rows before t and scored by absolute error on t.
 *
 * Throws InsufficientHistory when rows are too few for the requested folds.
 */
std::vector<CvFold> nested_cv(std::span<const DataRow> rows, std::span<const SvrParams> grid,
                              const CvConfig& config);

} // namespace xdf::forecast
