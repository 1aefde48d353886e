#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mcd/field.hpp"
#include "mcd/model.hpp"
#include "mcd/statistic.hpp"

namespace mcd {

/// Neighborhood variability V(s).
using VarField = Field<double>;

inline constexpr int kDefaultThresholdCount = 100;

/// Arithmetic threshold ladder over [min T, max T] and the variability
/// "belts" between consecutive thresholds. Belt k (0-based) holds the pixels
/// with thresholds[k] < T <= thresholds[k+1].
struct ThresholdScan {
    std::vector<double> thresholds;
    std::vector<double> belt_means;  // NaN for empty belts
    std::vector<std::int64_t> belt_counts;
    int chosen_belt = 0;
    double t_star = 0.0;
    // max belt mean / mean V over the whole grid; how strongly the chosen
    // belt stands out. Close to 1 suggests there is no boundary to find.
    double variability_ratio = 0.0;

    int threshold_count() const noexcept { return static_cast<int>(thresholds.size()); }
};

struct DetectionResult {
    Mask mask;
    double t_star = 0.0;
    ThresholdScan scan;
};

/// Sample variance (n - 1 denominator) of each pixel and its in-grid
/// 4-neighbours. Binomial grids use adjusted proportions.
VarField neighborhood_variability(const Grid& grid, const ModelSpec& model);
/// Same, over an already-prepared value field.
VarField neighborhood_variability(const Field<double>& values);

/// Throws NoSignal when the statistic is constant. Belts holding fewer than
/// `min_belt_count` pixels are left out of the argmax; if that leaves none,
/// every non-empty belt is eligible. The default 1 admits every non-empty belt.
ThresholdScan scan_thresholds(const Field<double>& stat, const VarField& var,
                              int threshold_count = kDefaultThresholdCount, std::int64_t min_belt_count = 1);

/// {s : T(s) > t_star}
Mask detect(const Field<double>& stat, double t_star);

/// Steps 2 and 3 of the procedure: scan, choose t*, threshold.
DetectionResult select_and_detect(const Field<double>& stat, const VarField& var,
                                  int threshold_count = kDefaultThresholdCount, std::int64_t min_belt_count = 1);

}  // namespace mcd
