#include "mcd/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace mcd {

namespace {

struct TruthCounts {
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

TruthCounts count_truth(const Mask& truth) {
    TruthCounts t;
    for (auto v : truth.values()) (v ? t.positives : t.negatives)++;
    if (t.positives == 0) throw UndefinedMetric("truth mask is empty; sensitivity is undefined");
    if (t.negatives == 0) throw UndefinedMetric("truth mask covers the grid; specificity is undefined");
    return t;
}

}  // namespace

Metrics sensitivity_specificity(const Mask& detected, const Mask& truth) {
    require_same_shape(detected, truth, "sensitivity_specificity");
    const auto totals = count_truth(truth);
    std::size_t tp = 0, tn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] && detected[i]) ++tp;
        if (!truth[i] && !detected[i]) ++tn;
    }
    return {static_cast<double>(tp) / static_cast<double>(totals.positives),
            static_cast<double>(tn) / static_cast<double>(totals.negatives)};
}

std::vector<RocPoint> roc_curve(const Field<double>& stat, const Mask& truth, int points) {
    require_same_shape(stat, truth, "roc_curve");
    if (points < 2) throw ConfigError("an ROC curve needs at least 2 points");
    const auto totals = count_truth(truth);
    const auto [lo, hi] = std::minmax_element(stat.values().begin(), stat.values().end());
    const double t_min = *lo, t_max = *hi;

    // Sort once, then sweep thresholds downward.
    std::vector<std::size_t> order(stat.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return stat[a] > stat[b]; });

    std::vector<RocPoint> curve;
    curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t idx = 0, tp = 0, fp = 0;
    for (int k = 0; k < points; ++k) {
        const double t = k == points - 1 ? t_min : t_max - (t_max - t_min) * k / (points - 1);
        while (idx < order.size() && stat[order[idx]] >= t) {
            (truth[order[idx]] ? tp : fp)++;
            ++idx;
        }
        curve.push_back({t, static_cast<double>(fp) / static_cast<double>(totals.negatives),
                         static_cast<double>(tp) / static_cast<double>(totals.positives)});
    }
    return curve;
}

double roc_auc(const Field<double>& stat, const Mask& truth) {
    require_same_shape(stat, truth, "roc_auc");
    const auto totals = count_truth(truth);
    std::vector<std::size_t> order(stat.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return stat[a] < stat[b]; });
    // Sum of midranks of the positives.
    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && stat[order[j]] == stat[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            if (truth[order[k]]) rank_sum += midrank;
        i = j;
    }
    const double np = static_cast<double>(totals.positives), nn = static_cast<double>(totals.negatives);
    return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double jaccard(const Mask& a, const Mask& b) {
    require_same_shape(a, b, "jaccard");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        inter += a[i] && b[i];
        uni += a[i] || b[i];
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace mcd
