#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mcd/field.hpp"
#include "mcd/window.hpp"

namespace mcd {

/// Per-pixel aggregation vectors over a scale ladder: window sums x_r,
/// clipped cardinalities m_r and, for Binomial data, trial totals N_r.
/// Stored pixel-major: entry (pixel, r) lives at pixel * scales + r.
struct ScaleAggregates {
    int rows = 0;
    int cols = 0;
    int scales = 0;
    std::vector<double> sums;
    std::vector<std::int64_t> counts;
    std::vector<std::int64_t> trials;  // empty unless trials were supplied

    std::span<const double> sums_at(std::size_t pixel) const {
        return std::span(sums).subspan(pixel * scales, scales);
    }
    std::span<const std::int64_t> counts_at(std::size_t pixel) const {
        return std::span(counts).subspan(pixel * scales, scales);
    }
    std::span<const std::int64_t> trials_at(std::size_t pixel) const {
        return std::span(trials).subspan(pixel * scales, scales);
    }
    bool has_trials() const noexcept { return !trials.empty(); }
};

/// True when every value is a finite integer small enough to be summed
/// exactly in 64-bit integers.
bool is_integral_grid(const Grid& grid);

/// Throws InvalidInput when the ladder is too large for the grid, i.e. some
/// pixel would see an empty annulus after clipping.
ScaleAggregates aggregate_scales(const Grid& grid, const ScaleLadder& ladder,
                                 const TrialsMap* trials = nullptr);

}  // namespace mcd
