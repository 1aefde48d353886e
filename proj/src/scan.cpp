#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcd/baselines.hpp"
#include "mcd/parallel.hpp"
#include "mcd/rng.hpp"
#include "mcd/statistic.hpp"
#include "mcd/window.hpp"

namespace mcd {

namespace {

double xlogx_ratio(double x, double ratio) { return x > 0.0 ? x * std::log(ratio) : 0.0; }

// Row-wise prefix sums; a one-row segment sum is two lookups.
class RowPrefix {
public:
    RowPrefix(int rows, int cols) : cols_(cols), table_(static_cast<std::size_t>(rows) * (cols + 1), 0.0) {}

    template <typename Values>
    void assign(const Values& values, int rows) {
        for (int r = 0; r < rows; ++r) {
            double* row = &table_[static_cast<std::size_t>(r) * (cols_ + 1)];
            double acc = 0.0;
            row[0] = 0.0;
            for (int c = 0; c < cols_; ++c) {
                acc += values[static_cast<std::size_t>(r) * cols_ + c];
                row[c + 1] = acc;
            }
        }
    }

    double segment(int row, int c0, int c1) const {
        const double* p = &table_[static_cast<std::size_t>(row) * (cols_ + 1)];
        return p[c1 + 1] - p[c0];
    }

private:
    int cols_;
    std::vector<double> table_;
};

struct Zone {
    int center = 0;  // linear pixel index
    int radius_index = 0;
    double exposure = 0.0;
    int group = 0;   // zones sharing an exposure value
};

// Geometry of the circle family: clipped per-row column spans.
struct CircleGeometry {
    std::vector<int> radii;
    std::vector<std::vector<int>> half_widths;  // [radius index][di + radius]

    explicit CircleGeometry(std::vector<int> rs) : radii(std::move(rs)) {
        for (int r : radii) {
            const WindowSpec w{WindowShape::Circle, r};
            std::vector<int> hw;
            for (int di = -r; di <= r; ++di) hw.push_back(w.half_width(di));
            half_widths.push_back(std::move(hw));
        }
    }

    template <typename F>
    void for_each_span(int rows, int cols, int center, int ri, F&& f) const {
        const int r = radii[ri];
        const int cr = center / cols, cc = center % cols;
        const int lo = std::max(-r, -cr), hi = std::min(r, rows - 1 - cr);
        for (int di = lo; di <= hi; ++di) {
            const int w = half_widths[ri][di + r];
            f(cr + di, std::max(0, cc - w), std::min(cols - 1, cc + w));
        }
    }
};

class ZoneLlr {
public:
    ZoneLlr(Family family, double total_c, double total_n, double sigma)
        : family_(family), total_c_(total_c), total_n_(total_n), sigma_(sigma) {}

    double operator()(double c, double n) const {
        switch (family_) {
            case Family::Binomial: return bernoulli_llr(c, n, total_c_, total_n_);
            case Family::Poisson: return poisson_llr(c, total_c_ * n / total_n_, total_c_);
            case Family::Normal: return normal_llr(c, n, total_c_, total_n_, sigma_);
        }
        return 0.0;
    }

    double expected(double n) const { return total_c_ * n / total_n_; }

private:
    Family family_;
    double total_c_, total_n_, sigma_;
};

}  // namespace

double bernoulli_llr(double c, double n, double total_c, double total_n) {
    const double out_n = total_n - n;
    if (n <= 0.0 || out_n <= 0.0) return 0.0;
    const double p_in = c / n;
    const double p_out = (total_c - c) / out_n;
    if (!(p_in > p_out)) return 0.0;
    const double p_all = total_c / total_n;
    const double ll1 = xlogx_ratio(c, p_in) + xlogx_ratio(n - c, 1.0 - p_in) +
                       xlogx_ratio(total_c - c, p_out) + xlogx_ratio(out_n - (total_c - c), 1.0 - p_out);
    const double ll0 = xlogx_ratio(total_c, p_all) + xlogx_ratio(total_n - total_c, 1.0 - p_all);
    return std::max(0.0, ll1 - ll0);
}

double poisson_llr(double c, double expected, double total_c) {
    if (!(c > expected) || expected <= 0.0) return 0.0;
    const double rest = total_c - c;
    return std::max(0.0, c * std::log(c / expected) + xlogx_ratio(rest, rest / (total_c - expected)));
}

double normal_llr(double s, double n, double total_s, double total_n, double sigma) {
    const double out_n = total_n - n;
    if (n <= 0.0 || out_n <= 0.0) return 0.0;
    const double mean_in = s / n, mean_out = (total_s - s) / out_n, mean_all = total_s / total_n;
    if (!(mean_in > mean_out)) return 0.0;
    const double a = mean_in - mean_all, b = mean_out - mean_all;
    return (n * a * a + out_n * b * b) / (2.0 * sigma * sigma);
}

ScanResult circular_scan(const Grid& grid, const ModelSpec& model, const ScanOptions& options) {
    model.validate(grid);
    if (options.mc_reps < 19)
        throw ConfigError("mc_reps must be at least 19 (got " + std::to_string(options.mc_reps) +
                          "); the Monte Carlo p-value would be too coarse");
    if (options.radii.empty()) throw ConfigError("scan needs at least one radius");
    if (!(options.cluster_alpha > 0.0 && options.cluster_alpha < 1.0))
        throw ConfigError("cluster_alpha must lie in (0,1)");
    if (!(options.max_exposure_fraction > 0.0 && options.max_exposure_fraction <= 1.0))
        throw ConfigError("max_exposure_fraction must lie in (0,1]");
    std::vector<int> radii = options.radii;
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    if (radii.front() < 0) throw ConfigError("scan radii must be nonnegative");

    const int rows = grid.rows(), cols = grid.cols();
    const std::size_t cells = grid.size();

    // Exposure per cell and the fitted null.
    std::vector<double> exposure(cells, 1.0);
    if (model.family == Family::Binomial)
        for (std::size_t i = 0; i < cells; ++i) exposure[i] = static_cast<double>((*model.trials)[i]);
    const double total_n = std::accumulate(exposure.begin(), exposure.end(), 0.0);
    const double total_c = std::accumulate(grid.values().begin(), grid.values().end(), 0.0);
    double sigma = 1.0;
    if (model.family == Family::Normal) {
        sigma = model.sigma ? *model.sigma : robust_sigma(grid);
        if (!(sigma > 0.0)) throw DegenerateInput("robust sigma estimate is 0; supply --sigma explicitly");
    }
    if (model.family != Family::Normal && !(total_c > 0.0))
        throw DegenerateInput("scan needs at least one nonzero count");
    const double null_rate = total_c / total_n;

    // Zones: every center x radius whose exposure stays within the cap.
    const CircleGeometry geometry(radii);
    RowPrefix exposure_prefix(rows, cols);
    exposure_prefix.assign(exposure, rows);
    const double cap = options.max_exposure_fraction * total_n;
    std::vector<Zone> zones;
    for (int p = 0; p < static_cast<int>(cells); ++p) {
        for (int ri = 0; ri < static_cast<int>(radii.size()); ++ri) {
            double e = 0.0;
            geometry.for_each_span(rows, cols, p, ri, [&](int r, int c0, int c1) {
                e += exposure_prefix.segment(r, c0, c1);
            });
            if (e > cap) break;  // larger radii only grow
            zones.push_back({p, ri, e, 0});
        }
    }
    if (zones.empty()) throw ConfigError("no scan zone fits within the exposure cap");

    // Group zones by exposure: for a fixed exposure the LLR is nondecreasing in
    // the zone count above expectation, so each replicate needs only the
    // largest count per group.
    std::vector<double> group_exposure;
    {
        std::vector<double> distinct;
        for (const auto& z : zones) distinct.push_back(z.exposure);
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        group_exposure = distinct;
        for (auto& z : zones)
            z.group = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), z.exposure) -
                                       distinct.begin());
    }

    auto zone_counts = [&](const RowPrefix& prefix, std::vector<double>& out) {
        out.resize(zones.size());
        for (std::size_t z = 0; z < zones.size(); ++z) {
            double s = 0.0;
            geometry.for_each_span(rows, cols, zones[z].center, zones[z].radius_index,
                                   [&](int r, int c0, int c1) { s += prefix.segment(r, c0, c1); });
            out[z] = s;
        }
    };

    ScanResult result;
    result.zone_count = static_cast<std::int64_t>(zones.size());

    // Observed data.
    std::vector<double> observed;
    {
        RowPrefix prefix(rows, cols);
        prefix.assign(grid.values(), rows);
        zone_counts(prefix, observed);
    }
    const ZoneLlr llr(model.family, total_c, total_n, sigma);
    std::vector<double> zone_llr(zones.size());
    for (std::size_t z = 0; z < zones.size(); ++z) zone_llr[z] = llr(observed[z], zones[z].exposure);

    // Monte Carlo replicates under the fitted null, one stream per replicate.
    result.replicate_max_llr.assign(options.mc_reps, 0.0);
    const double mu = total_c / static_cast<double>(cells);
    parallel_for(static_cast<std::size_t>(options.mc_reps), [&](std::size_t rep) {
        Engine engine = make_engine(options.seed, {stream::scan_monte_carlo, rep});
        std::vector<double> sim(cells);
        for (std::size_t i = 0; i < cells; ++i) {
            switch (model.family) {
                case Family::Binomial:
                    sim[i] = draw_binomial(engine, static_cast<int>(exposure[i]), null_rate);
                    break;
                case Family::Poisson: sim[i] = draw_poisson(engine, null_rate); break;
                case Family::Normal: sim[i] = draw_normal(engine, mu, sigma); break;
            }
        }
        const double sim_total = std::accumulate(sim.begin(), sim.end(), 0.0);
        RowPrefix prefix(rows, cols);
        prefix.assign(sim, rows);
        std::vector<double> counts;
        zone_counts(prefix, counts);
        std::vector<double> best(group_exposure.size(), -std::numeric_limits<double>::infinity());
        for (std::size_t z = 0; z < zones.size(); ++z)
            best[zones[z].group] = std::max(best[zones[z].group], counts[z]);
        const ZoneLlr sim_llr(model.family, sim_total, total_n, sigma);
        double max_llr = 0.0;
        for (std::size_t g = 0; g < best.size(); ++g)
            max_llr = std::max(max_llr, sim_llr(best[g], group_exposure[g]));
        result.replicate_max_llr[rep] = max_llr;
    });

    std::vector<double> sorted_max = result.replicate_max_llr;
    std::sort(sorted_max.begin(), sorted_max.end());
    auto p_value = [&](double value) {
        const auto ge = sorted_max.end() - std::lower_bound(sorted_max.begin(), sorted_max.end(), value);
        return (1.0 + static_cast<double>(ge)) / (options.mc_reps + 1.0);
    };

    // Rank zones and report disjoint clusters greedily.
    std::vector<std::size_t> order(zones.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return zone_llr[a] > zone_llr[b]; });
    result.mask = Mask(rows, cols);
    Mask taken(rows, cols);
    for (std::size_t z : order) {
        if (!(zone_llr[z] > 0.0) && !result.clusters.empty()) break;
        const double p = p_value(zone_llr[z]);
        if (p > options.cluster_alpha && !result.clusters.empty()) break;
        std::vector<Cell> zone_cells;
        bool overlaps = false;
        geometry.for_each_span(rows, cols, zones[z].center, zones[z].radius_index, [&](int r, int c0, int c1) {
            for (int c = c0; c <= c1; ++c) {
                overlaps = overlaps || taken(r, c);
                zone_cells.push_back({r, c});
            }
        });
        if (overlaps) continue;
        ScanCluster cluster;
        cluster.center = {zones[z].center / cols, zones[z].center % cols};
        cluster.radius = radii[zones[z].radius_index];
        cluster.observed = observed[z];
        cluster.exposure = zones[z].exposure;
        cluster.expected = llr.expected(zones[z].exposure);
        cluster.llr = zone_llr[z];
        cluster.p_value = p;
        for (const auto& cell : zone_cells) {
            taken(cell.row, cell.col) = 1;
            if (p <= options.cluster_alpha) result.mask(cell.row, cell.col) = 1;
        }
        cluster.cells = std::move(zone_cells);
        result.clusters.push_back(std::move(cluster));
        if (p > options.cluster_alpha) break;  // only the most likely cluster is kept when not significant
    }
    return result;
}

}  // namespace mcd
