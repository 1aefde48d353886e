#include <algorithm>
#include <cmath>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "mcd/baselines.hpp"
#include "mcd/parallel.hpp"
#include "mcd/statistic.hpp"

namespace mcd {

namespace {

double upper_normal(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

PValueField pixel_pvalues(const Grid& grid, const ModelSpec& model, std::optional<double> null_param,
                          TailMethod method) {
    model.validate(grid);
    const double theta0 = null_param ? *null_param : estimate_null(grid, model);
    PValueField out(grid.rows(), grid.cols());

    switch (model.family) {
        case Family::Binomial: {
            if (!(theta0 > 0.0 && theta0 < 1.0))
                throw ConfigError("binomial null proportion must lie in (0,1), got " + std::to_string(theta0));
            const auto& trials = *model.trials;
            parallel_for(grid.size(), [&](std::size_t i) {
                const auto y = static_cast<std::int64_t>(grid[i]);
                const auto n = trials[i];
                if (method == TailMethod::NormalApprox) {
                    const double nd = static_cast<double>(n);
                    out[i] = upper_normal((grid[i] - nd * theta0) / std::sqrt(nd * theta0 * (1.0 - theta0)));
                    return;
                }
                if (y <= 0) {
                    out[i] = 1.0;
                    return;
                }
                const boost::math::binomial_distribution<double> dist(static_cast<double>(n), theta0);
                out[i] = std::clamp(boost::math::cdf(boost::math::complement(dist, static_cast<double>(y - 1))),
                                    0.0, 1.0);
            });
            break;
        }
        case Family::Poisson: {
            if (!(theta0 > 0.0 && std::isfinite(theta0)))
                throw ConfigError("poisson null rate must be positive, got " + std::to_string(theta0));
            parallel_for(grid.size(), [&](std::size_t i) {
                const auto y = static_cast<std::int64_t>(grid[i]);
                if (method == TailMethod::NormalApprox) {
                    out[i] = upper_normal((grid[i] - theta0) / std::sqrt(theta0));
                    return;
                }
                if (y <= 0) {
                    out[i] = 1.0;
                    return;
                }
                const boost::math::poisson_distribution<double> dist(theta0);
                out[i] = std::clamp(boost::math::cdf(boost::math::complement(dist, static_cast<double>(y - 1))),
                                    0.0, 1.0);
            });
            break;
        }
        case Family::Normal: {
            if (!std::isfinite(theta0)) throw ConfigError("normal null mean must be finite");
            const double sigma = model.sigma ? *model.sigma : robust_sigma(grid);
            if (!(sigma > 0.0))
                throw DegenerateInput("robust sigma estimate is 0; supply --sigma explicitly");
            for (std::size_t i = 0; i < grid.size(); ++i) out[i] = upper_normal((grid[i] - theta0) / sigma);
            break;
        }
    }
    return out;
}

FdrResult storey_fdr(const PValueField& pvalues, double alpha, double lambda) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("FDR alpha must lie in (0,1)");
    if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("Storey lambda must lie in (0,1)");
    const std::size_t m = pvalues.size();
    std::vector<double> sorted(pvalues.values().begin(), pvalues.values().end());
    for (double p : sorted)
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("p-values must lie in [0,1]");
    std::sort(sorted.begin(), sorted.end());

    FdrResult result;
    result.alpha = alpha;
    result.lambda = lambda;
    const auto above = static_cast<double>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), lambda));
    const double md = static_cast<double>(m);
    // A zero count would make pi0 zero; count it as one to keep pi0 in (0, 1].
    result.pi0_hat = std::min(1.0, std::max(above, 1.0) / ((1.0 - lambda) * md));

    // Largest observed gamma with pi0 * gamma * m / #{p <= gamma} <= alpha.
    double gamma = 0.0;
    bool found = false;
    for (std::size_t i = m; i-- > 0;) {
        if (i + 1 < m && sorted[i] == sorted[i + 1]) continue;  // ties: use the last index
        const double g = sorted[i];
        const double rejected = static_cast<double>(i + 1);
        const double fdr = result.pi0_hat * g * md / std::max(rejected, 1.0);
        if (fdr <= alpha) {
            gamma = g;
            found = true;
            result.estimated_fdr = fdr;
            break;
        }
    }
    result.gamma = gamma;
    result.mask = Mask(pvalues.rows(), pvalues.cols());
    if (found) {
        for (std::size_t i = 0; i < m; ++i) {
            result.mask[i] = pvalues[i] <= gamma ? 1 : 0;
            result.rejections += result.mask[i];
        }
    }
    return result;
}

}  // namespace mcd
