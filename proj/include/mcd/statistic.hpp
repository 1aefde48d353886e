#pragma once

#include <optional>
#include <vector>

#include "mcd/field.hpp"
#include "mcd/model.hpp"
#include "mcd/window.hpp"

namespace mcd {

/// Per-pixel multi-scale likelihood-ratio statistic T(s) = -2 log Lambda.
struct StatField {
    Field<double> values;
    Family family = Family::Normal;
    ScaleLadder ladder = ScaleLadder::single_scale();
    double null_estimate = 0.0;
    std::optional<double> sigma;  // Normal only: the sigma actually used

    /// Degrees of freedom of the asymptotic chi-square law. Informational only;
    /// it is never used to pick a threshold.
    int reference_df() const { return ladder.scale_count(); }
};

/// Null estimate and the clipped per-annulus estimates at one pixel.
struct EstimateSet {
    double null_estimate = 0.0;
    std::vector<double> scale_estimates;
    std::optional<double> sigma_used;
};

/// Binomial: median of (Y+1)/(N+2); Poisson and Normal: median of Y (plus the
/// continuity offset when enabled).
double estimate_null(const Grid& grid, const ModelSpec& model);

/// Clipped annulus estimates at `pixel`: Binomial takes the median of the
/// adjusted proportions over D_r \ D_{r-1}; Poisson and Normal take the pooled
/// annulus mean. Every estimate is clipped below at `null_estimate`.
std::vector<double> estimate_scales(const Grid& grid, const ModelSpec& model, const ScaleLadder& ladder,
                                    double null_estimate, Cell pixel);

EstimateSet estimate_set(const Grid& grid, const ModelSpec& model, const ScaleLadder& ladder, Cell pixel);

/// Robust sigma used by the Normal model when none is supplied.
double robust_sigma(const Grid& grid);

StatField stat_binomial(const Grid& grid, const TrialsMap& trials, const ScaleLadder& ladder);
StatField stat_poisson(const Grid& grid, const ScaleLadder& ladder, bool continuity_offset = false);
StatField stat_normal(const Grid& grid, const ScaleLadder& ladder, std::optional<double> sigma = {});

/// Dispatches on model.family after validating the model against the grid.
StatField compute_statistic(const Grid& grid, const ModelSpec& model, const ScaleLadder& ladder);

}  // namespace mcd
