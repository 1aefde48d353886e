#include "mcd/aggregate.hpp"

#include <cmath>

#include "mcd/parallel.hpp"
#include "mcd/sat.hpp"

namespace mcd {

bool is_integral_grid(const Grid& grid) {
    constexpr double limit = 9007199254740992.0 / 65536.0;  // headroom for 2^16 cells per window
    for (double v : grid.values()) {
        if (!std::isfinite(v) || std::floor(v) != v || std::abs(v) > limit) return false;
    }
    return true;
}

namespace {

template <typename T>
void fill_sums(const Grid& grid, const ScaleLadder& ladder, ScaleAggregates& out) {
    const SummedAreaTable<T> sat(grid);
    const int m = ladder.scale_count();
    parallel_for(grid.size(), [&](std::size_t p) {
        const Cell c{static_cast<int>(p / grid.cols()), static_cast<int>(p % grid.cols())};
        for (int r = 0; r < m; ++r) {
            const auto ws = window_sum(sat, c, ladder[r]);
            out.sums[p * m + r] = static_cast<double>(ws.sum);
            out.counts[p * m + r] = ws.count;
        }
    });
}

}  // namespace

ScaleAggregates aggregate_scales(const Grid& grid, const ScaleLadder& ladder, const TrialsMap* trials) {
    if (grid.empty()) throw InvalidInput("cannot aggregate an empty grid");
    if (trials) require_same_shape(grid, *trials, "aggregate_scales");

    ScaleAggregates out;
    out.rows = grid.rows();
    out.cols = grid.cols();
    out.scales = ladder.scale_count();
    const std::size_t total = grid.size() * static_cast<std::size_t>(out.scales);
    out.sums.resize(total);
    out.counts.resize(total);

    if (is_integral_grid(grid))
        fill_sums<std::int64_t>(grid, ladder, out);
    else
        fill_sums<double>(grid, ladder, out);

    if (trials) {
        out.trials.resize(total);
        const SummedAreaTable<std::int64_t> sat(*trials);
        parallel_for(grid.size(), [&](std::size_t p) {
            const Cell c{static_cast<int>(p / grid.cols()), static_cast<int>(p % grid.cols())};
            for (int r = 0; r < out.scales; ++r)
                out.trials[p * out.scales + r] = window_sum(sat, c, ladder[r]).sum;
        });
    }

    for (std::size_t p = 0; p < grid.size(); ++p) {
        for (int r = 1; r < out.scales; ++r) {
            if (out.counts[p * out.scales + r] <= out.counts[p * out.scales + r - 1])
                throw InvalidInput("scale ladder " + ladder.to_string() + " does not fit a " +
                                   std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()) +
                                   " grid: window " + to_string(ladder[r]) +
                                   " adds no cells at pixel (" + std::to_string(p / grid.cols()) +
                                   "," + std::to_string(p % grid.cols()) + ")");
        }
    }
    return out;
}

}  // namespace mcd
