#include "mcd/theorems.hpp"

#include <cmath>

#include "mcd/parallel.hpp"
#include "mcd/rng.hpp"
#include "mcd/robust.hpp"
#include "mcd/statistic.hpp"
#include "mcd/threshold.hpp"

namespace mcd {

namespace {

constexpr int kCross[5][2] = {{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}};

double noncentrality(int k, double delta) {
    return k * delta * delta - k * k * delta * delta / 5.0;
}

struct ReplicateStats {
    double t[3] = {0, 0, 0};
    double v_boundary = 0.0;
    double v_rest = 0.0;
    double vtilde_sum = 0.0;
};

}  // namespace

Field<PixelClass> classify_pixels(const Mask& truth) {
    Field<PixelClass> out(truth.rows(), truth.cols(), PixelClass::Noise);
    for (int r = 0; r < truth.rows(); ++r) {
        for (int c = 0; c < truth.cols(); ++c) {
            bool any_signal = false, any_noise = false;
            for (const auto& d : kCross) {
                const int rr = r + d[0], cc = c + d[1];
                if (!truth.contains(rr, cc)) continue;
                (truth(rr, cc) ? any_signal : any_noise) = true;
            }
            out(r, c) = any_signal && any_noise ? PixelClass::Boundary
                        : any_signal            ? PixelClass::Signal
                                                : PixelClass::Noise;
        }
    }
    return out;
}

TheoremReport theorem_check(const TheoremSetting& setting) {
    if (!(setting.delta >= 0.0)) throw ConfigError("delta must be nonnegative");
    if (setting.replicates < 2) throw ConfigError("replicates must be at least 2");

    const Mask truth = gen_shape(setting.shape, setting.rows, setting.cols);
    const auto classes = classify_pixels(truth);

    TheoremReport report;
    report.delta = setting.delta;
    report.replicates = setting.replicates;
    for (auto c : classes.values()) {
        if (c == PixelClass::Noise) ++report.n_noise;
        else if (c == PixelClass::Boundary) ++report.n_boundary;
        else ++report.n_signal;
    }
    if (report.n_boundary == 0) throw ConfigError("the shape has no boundary cells");
    if (report.n_noise == 0 || report.n_signal == 0)
        throw ConfigError("the partition needs noise-interior and signal-interior cells");
    report.p_boundary = static_cast<double>(report.n_boundary) / static_cast<double>(truth.size());

    // Boundary cells whose cross lies inside the grid, with their k.
    std::vector<std::size_t> interior;
    double c_sum = 0.0;
    for (int r = 1; r + 1 < truth.rows(); ++r)
        for (int c = 1; c + 1 < truth.cols(); ++c) {
            if (classes(r, c) != PixelClass::Boundary) continue;
            int k = 0;
            for (const auto& d : kCross) k += truth(r + d[0], c + d[1]) != 0;
            interior.push_back(truth.index(r, c));
            c_sum += noncentrality(k, setting.delta);
        }
    report.interior_boundary_cells = static_cast<std::int64_t>(interior.size());
    report.boundary_vtilde_expected = interior.empty() ? 0.0 : 4.0 + c_sum / static_cast<double>(interior.size());

    const ScaleLadder ladder({{WindowShape::Square, 0}, {WindowShape::Circle, 1}});
    const auto reps = static_cast<std::size_t>(setting.replicates);
    std::vector<ReplicateStats> stats(reps);
    parallel_for(reps, [&](std::size_t rep) {
        Engine engine = make_engine(setting.seed, {stream::theorem, rep});
        Grid grid(setting.rows, setting.cols);
        for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = draw_normal(engine, truth[i] ? setting.delta : 0.0, 1.0);
        const auto stat = stat_normal(grid, ladder, 1.0);
        const auto var = neighborhood_variability(grid);

        ReplicateStats s;
        double v_rest = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto cls = static_cast<int>(classes[i]);
            s.t[cls] += stat.values[i];
            if (classes[i] == PixelClass::Boundary) s.v_boundary += var[i];
            else v_rest += var[i];
        }
        s.t[0] /= static_cast<double>(report.n_noise);
        s.t[1] /= static_cast<double>(report.n_boundary);
        s.t[2] /= static_cast<double>(report.n_signal);
        s.v_boundary /= static_cast<double>(report.n_boundary);
        s.v_rest = v_rest / static_cast<double>(report.n_noise + report.n_signal);
        for (auto i : interior) s.vtilde_sum += 4.0 * var[i];
        stats[rep] = s;
    });

    std::vector<double> diffs;
    double vtilde_total = 0.0;
    int ok1 = 0, ok2 = 0;
    for (const auto& s : stats) {
        const bool t1 = s.t[0] < s.t[1] && s.t[1] < s.t[2];
        const bool t2 = s.v_boundary > s.v_rest;
        ok1 += t1;
        ok2 += t2;
        report.theorem1_indicators.push_back(t1);
        report.theorem2_indicators.push_back(t2);
        report.mean_t_noise += s.t[0];
        report.mean_t_boundary += s.t[1];
        report.mean_t_signal += s.t[2];
        report.mean_v_boundary += s.v_boundary;
        report.mean_v_rest += s.v_rest;
        diffs.push_back(s.v_boundary - s.v_rest);
        vtilde_total += s.vtilde_sum;
    }
    const double n = static_cast<double>(reps);
    report.mean_t_noise /= n;
    report.mean_t_boundary /= n;
    report.mean_t_signal /= n;
    report.mean_v_boundary /= n;
    report.mean_v_rest /= n;
    report.theorem1_success = ok1 / n;
    report.theorem2_success = ok2 / n;
    report.v_difference_mean = mean(diffs);
    report.v_difference_se = sample_std(diffs) / std::sqrt(n);
    if (!interior.empty()) report.boundary_vtilde_mean = vtilde_total / (n * static_cast<double>(interior.size()));
    if (setting.delta == 0.0)
        report.note = "delta = 0 is outside the theorem hypotheses (delta > 0); no separation is expected";
    return report;
}

BoundaryCellEstimate boundary_cell_variability(int k, double delta, int replicates, std::uint64_t seed) {
    if (k < 0 || k > 5) throw ConfigError("k must lie in 0..5");
    if (replicates < 2) throw ConfigError("replicates must be at least 2");
    Engine engine = make_engine(seed, {stream::boundary_cell, static_cast<std::uint64_t>(k)});
    std::vector<double> draws(static_cast<std::size_t>(replicates));
    for (auto& vt : draws) {
        double y[5], sum = 0.0;
        for (int i = 0; i < 5; ++i) {
            y[i] = draw_normal(engine, i < k ? delta : 0.0, 1.0);
            sum += y[i];
        }
        const double ybar = sum / 5.0;
        vt = 0.0;
        for (double v : y) vt += (v - ybar) * (v - ybar);
    }
    return {mean(draws), sample_std(draws) / std::sqrt(static_cast<double>(replicates)),
            4.0 + noncentrality(k, delta)};
}

}  // namespace mcd
