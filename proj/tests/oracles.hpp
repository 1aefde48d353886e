#pragma once

// Naive reference computations used by the unit and acceptance tests. They
// share nothing with the library beyond the container types: windows are
// enumerated cell by cell, medians come from a full sort, and the
// likelihoods are evaluated term by term.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mcd/field.hpp"
#include "mcd/model.hpp"
#include "mcd/window.hpp"

namespace oracle {

inline bool in_window(const mcd::WindowSpec& w, int di, int dj) {
    if (w.shape == mcd::WindowShape::Square) return std::max(std::abs(di), std::abs(dj)) <= w.radius;
    return di * di + dj * dj <= w.radius * w.radius;
}

struct Sum {
    double sum = 0.0;
    std::int64_t count = 0;
};

template <typename T>
Sum window_sum(const mcd::Field<T>& g, int r, int c, const mcd::WindowSpec& w) {
    Sum s;
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j)
            if (in_window(w, i - r, j - c)) {
                s.sum += static_cast<double>(g(i, j));
                ++s.count;
            }
    return s;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// In-grid cells of D_r \ D_{r-1} around (r0, c0).
inline std::vector<std::pair<int, int>> annulus(int rows, int cols, int r0, int c0, const mcd::ScaleLadder& ladder,
                                                int scale) {
    std::vector<std::pair<int, int>> cells;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const bool in = in_window(ladder[scale], i - r0, j - c0);
            const bool prev = scale > 0 && in_window(ladder[scale - 1], i - r0, j - c0);
            if (in && !prev) cells.emplace_back(i, j);
        }
    return cells;
}

/// Log-likelihood of the annulus data under a per-annulus binomial rate,
/// summed cell by cell (binomial coefficients cancel in the ratio and are
/// left out of both sides).
inline double binomial_loglik(const mcd::Grid& y, const mcd::TrialsMap& n, const std::vector<std::pair<int, int>>& cells,
                              double p) {
    double ll = 0.0;
    for (auto [i, j] : cells) ll += y(i, j) * std::log(p) + (n(i, j) - y(i, j)) * std::log(1.0 - p);
    return ll;
}

inline double poisson_loglik(const mcd::Grid& y, const std::vector<std::pair<int, int>>& cells, double lambda,
                             double offset) {
    double ll = 0.0;
    for (auto [i, j] : cells) ll += (y(i, j) + offset) * std::log(lambda) - lambda;
    return ll;
}

inline double normal_loglik(const mcd::Grid& y, const std::vector<std::pair<int, int>>& cells, double mu, double sigma) {
    double ll = 0.0;
    for (auto [i, j] : cells) ll += -0.5 * (y(i, j) - mu) * (y(i, j) - mu) / (sigma * sigma);
    return ll;
}

inline double mad_sigma(const mcd::Grid& g) {
    std::vector<double> v(g.values().begin(), g.values().end());
    const double m = median(v);
    for (auto& x : v) x = std::abs(x - m);
    return 1.4826 * median(v);
}

/// T(s) = -2 (log L0 - log L1) with L1 the product over annuli of the
/// working-alternative likelihood at the clipped annulus estimate.
inline mcd::Field<double> statistic(const mcd::Grid& y, const mcd::ModelSpec& model, const mcd::ScaleLadder& ladder) {
    mcd::Field<double> out(y.rows(), y.cols());
    const double offset = model.family == mcd::Family::Poisson && model.poisson_offset ? 0.5 : 0.0;
    std::vector<double> all;
    for (int i = 0; i < y.rows(); ++i)
        for (int j = 0; j < y.cols(); ++j)
            all.push_back(model.family == mcd::Family::Binomial ? (y(i, j) + 1.0) / ((*model.trials)(i, j) + 2.0)
                                                               : y(i, j) + offset);
    const double theta0 = median(all);
    const double sigma = model.family == mcd::Family::Normal ? (model.sigma ? *model.sigma : mad_sigma(y)) : 1.0;

    for (int r0 = 0; r0 < y.rows(); ++r0)
        for (int c0 = 0; c0 < y.cols(); ++c0) {
            double ll0 = 0.0, ll1 = 0.0;
            for (int s = 0; s < ladder.scale_count(); ++s) {
                const auto cells = annulus(y.rows(), y.cols(), r0, c0, ladder, s);
                std::vector<double> vals;
                double sum = 0.0;
                for (auto [i, j] : cells) {
                    if (model.family == mcd::Family::Binomial)
                        vals.push_back((y(i, j) + 1.0) / ((*model.trials)(i, j) + 2.0));
                    sum += y(i, j) + offset;
                }
                switch (model.family) {
                    case mcd::Family::Binomial: {
                        const double pr = std::max(median(vals), theta0);
                        ll0 += binomial_loglik(y, *model.trials, cells, theta0);
                        ll1 += binomial_loglik(y, *model.trials, cells, pr);
                        break;
                    }
                    case mcd::Family::Poisson: {
                        const double lr = std::max(sum / static_cast<double>(cells.size()), theta0);
                        ll0 += poisson_loglik(y, cells, theta0, offset);
                        ll1 += poisson_loglik(y, cells, lr, offset);
                        break;
                    }
                    case mcd::Family::Normal: {
                        const double mr = std::max(sum / static_cast<double>(cells.size()), theta0);
                        ll0 += normal_loglik(y, cells, theta0, sigma);
                        ll1 += normal_loglik(y, cells, mr, sigma);
                        break;
                    }
                }
            }
            out(r0, c0) = -2.0 * (ll0 - ll1);
        }
    return out;
}

inline bool close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace oracle
