#include "mcd/statistic.hpp"

#include <cmath>
#include <utility>

#include "mcd/aggregate.hpp"
#include "mcd/parallel.hpp"
#include "mcd/robust.hpp"
#include "mcd/sat.hpp"

namespace mcd {

namespace {

using Offsets = std::vector<std::pair<int, int>>;

bool in_window(const WindowSpec& w, int di, int dj) {
    const int hw = w.half_width(di);
    return hw >= 0 && std::abs(dj) <= hw;
}

// Unclipped offsets of D_r \ D_{r-1} for every scale (D_0 = empty).
std::vector<Offsets> annulus_offsets(const ScaleLadder& ladder) {
    std::vector<Offsets> out(ladder.scale_count());
    for (int r = 0; r < ladder.scale_count(); ++r) {
        const auto& w = ladder[r];
        for (int di = -w.radius; di <= w.radius; ++di) {
            const int hw = w.half_width(di);
            for (int dj = -hw; dj <= hw; ++dj) {
                if (r > 0 && in_window(ladder[r - 1], di, dj)) continue;
                out[r].emplace_back(di, dj);
            }
        }
    }
    return out;
}

void annulus_medians(const Field<double>& props, const std::vector<Offsets>& annuli, Cell pixel,
                     double null_estimate, std::vector<double>& scratch, std::span<double> out) {
    for (std::size_t r = 0; r < annuli.size(); ++r) {
        scratch.clear();
        for (auto [di, dj] : annuli[r]) {
            const int row = pixel.row + di, col = pixel.col + dj;
            if (props.contains(row, col)) scratch.push_back(props(row, col));
        }
        if (scratch.empty())
            throw InternalError("empty annulus at scale " + std::to_string(r + 1) + ", pixel (" +
                                std::to_string(pixel.row) + "," + std::to_string(pixel.col) + ")");
        out[r] = std::max(median_inplace(scratch), null_estimate);
    }
}

Grid offset_grid(const Grid& grid, double offset) {
    Grid out = grid;
    for (auto& v : out.values()) v += offset;
    return out;
}

void require_pixel(const Grid& grid, Cell pixel) {
    if (!grid.contains(pixel))
        throw InvalidInput("pixel (" + std::to_string(pixel.row) + "," + std::to_string(pixel.col) +
                           ") is outside the grid");
}

double binomial_term(double dx, double dn, double p0, double pr) {
    return dx * (std::log(p0) - std::log(pr)) + (dn - dx) * (std::log1p(-p0) - std::log1p(-pr));
}

void check_open_unit(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0))
        throw InternalError(std::string(what) + " estimate " + std::to_string(p) + " outside (0,1)");
}

}  // namespace

double robust_sigma(const Grid& grid) { return mad_sigma(grid.values()); }

double estimate_null(const Grid& grid, const ModelSpec& model) {
    if (grid.empty()) throw InvalidInput("cannot estimate a null parameter from an empty grid");
    if (model.family == Family::Binomial) {
        if (!model.trials) throw ConfigError("the binomial model requires a trials map");
        auto props = adjusted_proportions(grid, *model.trials);
        return median_inplace(props.values());
    }
    std::vector<double> values(grid.values().begin(), grid.values().end());
    const double offset = model.family == Family::Poisson && model.poisson_offset ? 0.5 : 0.0;
    return median_inplace(values) + offset;
}

std::vector<double> estimate_scales(const Grid& grid, const ModelSpec& model, const ScaleLadder& ladder,
                                    double null_estimate, Cell pixel) {
    require_pixel(grid, pixel);
    const auto annuli = annulus_offsets(ladder);
    std::vector<double> out(ladder.scale_count());
    if (model.family == Family::Binomial) {
        if (!model.trials) throw ConfigError("the binomial model requires a trials map");
        const auto props = adjusted_proportions(grid, *model.trials);
        std::vector<double> scratch;
        annulus_medians(props, annuli, pixel, null_estimate, scratch, out);
        return out;
    }
    const double offset = model.family == Family::Poisson && model.poisson_offset ? 0.5 : 0.0;
    for (std::size_t r = 0; r < annuli.size(); ++r) {
        double sum = 0.0;
        std::int64_t count = 0;
        for (auto [di, dj] : annuli[r]) {
            const int row = pixel.row + di, col = pixel.col + dj;
            if (!grid.contains(row, col)) continue;
            sum += grid(row, col) + offset;
            ++count;
        }
        if (count == 0)
            throw InternalError("empty annulus at scale " + std::to_string(r + 1));
        out[r] = std::max(sum / static_cast<double>(count), null_estimate);
    }
    return out;
}

EstimateSet estimate_set(const Grid& grid, const ModelSpec& model, const ScaleLadder& ladder, Cell pixel) {
    model.validate(grid);
    EstimateSet set;
    set.null_estimate = estimate_null(grid, model);
    set.scale_estimates = estimate_scales(grid, model, ladder, set.null_estimate, pixel);
    if (model.family == Family::Normal) set.sigma_used = model.sigma ? *model.sigma : robust_sigma(grid);
    return set;
}

StatField stat_binomial(const Grid& grid, const TrialsMap& trials, const ScaleLadder& ladder) {
    const ModelSpec model = ModelSpec::binomial(trials);
    model.validate(grid);
    const auto agg = aggregate_scales(grid, ladder, &trials);
    const auto props = adjusted_proportions(grid, trials);
    std::vector<double> all(props.values().begin(), props.values().end());
    const double p0 = median_inplace(all);
    check_open_unit(p0, "null proportion");

    const auto annuli = annulus_offsets(ladder);
    const int m = ladder.scale_count();
    StatField field{Field<double>(grid.rows(), grid.cols()), Family::Binomial, ladder, p0, {}};

    // Chunked so each worker reuses its scratch buffers.
    const std::size_t n = grid.size();
    const std::size_t chunk = 256;
    parallel_for((n + chunk - 1) / chunk, [&](std::size_t block) {
        std::vector<double> scratch, estimates(m);
        const std::size_t end = std::min(n, (block + 1) * chunk);
        for (std::size_t p = block * chunk; p < end; ++p) {
            const Cell c{static_cast<int>(p / grid.cols()), static_cast<int>(p % grid.cols())};
            annulus_medians(props, annuli, c, p0, scratch, estimates);
            const auto x = agg.sums_at(p);
            const auto nt = agg.trials_at(p);
            double acc = 0.0;
            for (int r = 0; r < m; ++r) {
                check_open_unit(estimates[r], "annulus proportion");
                const double dx = x[r] - (r ? x[r - 1] : 0.0);
                const double dn = static_cast<double>(nt[r] - (r ? nt[r - 1] : 0));
                acc += binomial_term(dx, dn, p0, estimates[r]);
            }
            field.values[p] = -2.0 * acc;
        }
    });
    return field;
}

StatField stat_poisson(const Grid& grid, const ScaleLadder& ladder, bool continuity_offset) {
    const ModelSpec model = ModelSpec::poisson(continuity_offset);
    model.validate(grid);
    const Grid data = continuity_offset ? offset_grid(grid, 0.5) : grid;
    std::vector<double> all(data.values().begin(), data.values().end());
    const double lambda0 = median_inplace(all);
    if (!(lambda0 > 0.0))
        throw DegenerateInput(
            "poisson null rate estimate is 0 (the median count is zero); the log-likelihood ratio is "
            "undefined. Re-run with the +0.5 continuity offset enabled (--poisson-offset) to proceed.");

    const auto agg = aggregate_scales(data, ladder);
    const int m = ladder.scale_count();
    StatField field{Field<double>(grid.rows(), grid.cols()), Family::Poisson, ladder, lambda0, {}};
    const double log_l0 = std::log(lambda0);
    parallel_for(grid.size(), [&](std::size_t p) {
        const auto x = agg.sums_at(p);
        const auto cnt = agg.counts_at(p);
        double acc = 0.0;
        for (int r = 0; r < m; ++r) {
            const double dx = x[r] - (r ? x[r - 1] : 0.0);
            const double dm = static_cast<double>(cnt[r] - (r ? cnt[r - 1] : 0));
            const double lr = std::max(dx / dm, lambda0);
            acc += dx * (log_l0 - std::log(lr)) + dm * (lr - lambda0);
        }
        field.values[p] = -2.0 * acc;
    });
    return field;
}

StatField stat_normal(const Grid& grid, const ScaleLadder& ladder, std::optional<double> sigma) {
    const ModelSpec model = ModelSpec::normal(sigma);
    model.validate(grid);
    const double s = sigma ? *sigma : robust_sigma(grid);
    if (!(s > 0.0))
        throw DegenerateInput(
            "robust sigma estimate is 0 (more than half the grid shares one value); supply --sigma "
            "explicitly");
    std::vector<double> all(grid.values().begin(), grid.values().end());
    const double mu0 = median_inplace(all);

    const auto agg = aggregate_scales(grid, ladder);
    const int m = ladder.scale_count();
    const double inv_var = 1.0 / (s * s);
    StatField field{Field<double>(grid.rows(), grid.cols()), Family::Normal, ladder, mu0, s};
    parallel_for(grid.size(), [&](std::size_t p) {
        const auto x = agg.sums_at(p);
        const auto cnt = agg.counts_at(p);
        double acc = 0.0;
        for (int r = 0; r < m; ++r) {
            const double dx = x[r] - (r ? x[r - 1] : 0.0);
            const double dm = static_cast<double>(cnt[r] - (r ? cnt[r - 1] : 0));
            const double mr = std::max(dx / dm, mu0);
            acc += 2.0 * dx * (mr - mu0) + dm * (mu0 * mu0 - mr * mr);
        }
        field.values[p] = acc * inv_var;
    });
    return field;
}

StatField compute_statistic(const Grid& grid, const ModelSpec& model, const ScaleLadder& ladder) {
    model.validate(grid);
    switch (model.family) {
        case Family::Binomial: return stat_binomial(grid, *model.trials, ladder);
        case Family::Poisson: return stat_poisson(grid, ladder, model.poisson_offset);
        case Family::Normal: return stat_normal(grid, ladder, model.sigma);
    }
    throw InternalError("unknown model family");
}

}  // namespace mcd
