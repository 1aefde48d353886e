#pragma once

#include <vector>

#include "mcd/field.hpp"

namespace mcd {

struct Metrics {
    double sensitivity = 0.0;
    double specificity = 0.0;
};

/// sensitivity = |detected ∩ truth| / |truth|,
/// specificity = |¬detected ∩ ¬truth| / |¬truth|.
/// Throws UndefinedMetric when truth or its complement is empty.
Metrics sensitivity_specificity(const Mask& detected, const Mask& truth);

struct RocPoint {
    double threshold = 0.0;
    double false_positive_rate = 0.0;  // 1 - specificity
    double true_positive_rate = 0.0;   // sensitivity
};

/// Detection {T >= t} evaluated at `points` thresholds evenly spaced from
/// max T down to min T, preceded by the (0, 0) corner. Sensitivity is
/// nondecreasing along the list.
std::vector<RocPoint> roc_curve(const Field<double>& stat, const Mask& truth, int points);

/// Exact area under the empirical ROC curve (Mann-Whitney, ties count 1/2).
double roc_auc(const Field<double>& stat, const Mask& truth);

/// |a ∩ b| / |a ∪ b|; 1 when both are empty.
double jaccard(const Mask& a, const Mask& b);

}  // namespace mcd
