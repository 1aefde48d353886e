#include "mcd/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcd/parallel.hpp"

namespace mcd {

VarField neighborhood_variability(const Field<double>& values) {
    if (values.rows() < 2 || values.cols() < 2)
        throw InvalidInput("neighborhood variability needs a grid of at least 2x2");
    VarField out(values.rows(), values.cols());
    constexpr int dr[] = {0, -1, 1, 0, 0};
    constexpr int dc[] = {0, 0, 0, -1, 1};
    parallel_for(values.size(), [&](std::size_t p) {
        const int r = static_cast<int>(p / values.cols());
        const int c = static_cast<int>(p % values.cols());
        double buf[5];
        int n = 0;
        double sum = 0.0;
        for (int k = 0; k < 5; ++k) {
            if (!values.contains(r + dr[k], c + dc[k])) continue;
            buf[n] = values(r + dr[k], c + dc[k]);
            sum += buf[n++];
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (int k = 0; k < n; ++k) ss += (buf[k] - mean) * (buf[k] - mean);
        out[p] = ss / (n - 1);
    });
    return out;
}

VarField neighborhood_variability(const Grid& grid, const ModelSpec& model) {
    model.validate(grid);
    if (model.family == Family::Binomial)
        return neighborhood_variability(adjusted_proportions(grid, *model.trials));
    // The Poisson continuity offset is a constant shift and leaves V unchanged.
    return neighborhood_variability(grid);
}

ThresholdScan scan_thresholds(const Field<double>& stat, const VarField& var, int threshold_count,
                              std::int64_t min_belt_count) {
    require_same_shape(stat, var, "scan_thresholds");
    if (threshold_count < 3) throw ConfigError("threshold_count must be at least 3");
    if (min_belt_count < 1) throw ConfigError("min_belt_count must be at least 1");
    const auto [lo_it, hi_it] = std::minmax_element(stat.values().begin(), stat.values().end());
    const double t_min = *lo_it, t_max = *hi_it;
    if (!std::isfinite(t_min) || !std::isfinite(t_max))
        throw InvalidInput("statistic field contains non-finite values");
    if (!(t_max > t_min)) throw NoSignal("statistic field is constant; nothing to threshold");

    ThresholdScan scan;
    const int k = threshold_count;
    scan.thresholds.resize(k);
    const double step = (t_max - t_min) / (k - 1);
    for (int i = 0; i < k; ++i) scan.thresholds[i] = t_min + step * i;
    scan.thresholds.back() = t_max;

    std::vector<double> sums(k - 1, 0.0);
    scan.belt_counts.assign(k - 1, 0);
    double total_v = 0.0;
    for (std::size_t p = 0; p < stat.size(); ++p) {
        total_v += var[p];
        const double t = stat[p];
        if (!(t > scan.thresholds.front())) continue;
        // first threshold >= t; the belt ends there
        const auto it = std::lower_bound(scan.thresholds.begin(), scan.thresholds.end(), t);
        const auto belt = static_cast<std::size_t>(it - scan.thresholds.begin()) - 1;
        sums[belt] += var[p];
        ++scan.belt_counts[belt];
    }

    scan.belt_means.assign(k - 1, std::numeric_limits<double>::quiet_NaN());
    for (int b = 0; b < k - 1; ++b)
        if (scan.belt_counts[b] > 0) scan.belt_means[b] = sums[b] / static_cast<double>(scan.belt_counts[b]);
    auto argmax = [&](std::int64_t floor) {
        int best = -1;
        for (int b = 0; b < k - 1; ++b) {
            if (scan.belt_counts[b] < floor) continue;
            if (best < 0 || scan.belt_means[b] > scan.belt_means[best]) best = b;
        }
        return best;
    };
    int best = argmax(min_belt_count);
    if (best < 0) best = argmax(1);
    if (best < 0) throw InternalError("threshold scan found no populated belt");
    scan.chosen_belt = best;
    scan.t_star = 0.5 * (scan.thresholds[best] + scan.thresholds[best + 1]);
    const double global_mean = total_v / static_cast<double>(stat.size());
    scan.variability_ratio = global_mean > 0.0 ? scan.belt_means[best] / global_mean
                                               : std::numeric_limits<double>::infinity();
    return scan;
}

Mask detect(const Field<double>& stat, double t_star) {
    Mask mask(stat.rows(), stat.cols());
    for (std::size_t p = 0; p < stat.size(); ++p) mask[p] = stat[p] > t_star ? 1 : 0;
    return mask;
}

DetectionResult select_and_detect(const Field<double>& stat, const VarField& var, int threshold_count,
                                  std::int64_t min_belt_count) {
    DetectionResult result;
    result.scan = scan_thresholds(stat, var, threshold_count, min_belt_count);
    result.t_star = result.scan.t_star;
    result.mask = detect(stat, result.t_star);
    return result;
}

}  // namespace mcd
