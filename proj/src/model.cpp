#include "mcd/model.hpp"

#include <cmath>

namespace mcd {

std::string to_string(Family family) {
    switch (family) {
        case Family::Binomial: return "binomial";
        case Family::Poisson: return "poisson";
        case Family::Normal: return "normal";
    }
    return "?";
}

Family parse_family(const std::string& text) {
    if (text == "binomial") return Family::Binomial;
    if (text == "poisson") return Family::Poisson;
    if (text == "normal") return Family::Normal;
    throw ConfigError("unknown model family '" + text + "' (expected binomial, poisson or normal)");
}

void ModelSpec::validate(const Grid& grid) const {
    if (grid.empty()) throw InvalidInput("empty grid");
    if (family == Family::Binomial && !trials)
        throw ConfigError("the binomial model requires a trials map");
    if (family != Family::Binomial && trials)
        throw ConfigError("a trials map is only meaningful for the binomial model");
    if (sigma && !(*sigma > 0.0 && std::isfinite(*sigma)))
        throw ConfigError("sigma must be a positive finite number");
    if (sigma && family != Family::Normal)
        throw ConfigError("sigma is only meaningful for the normal model");
    if (poisson_offset && family != Family::Poisson)
        throw ConfigError("the continuity offset is only meaningful for the poisson model");

    if (family == Family::Normal) {
        for (double v : grid.values())
            if (!std::isfinite(v)) throw InvalidInput("grid contains a non-finite value");
        return;
    }
    if (trials) require_same_shape(grid, *trials, "trials map");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double y = grid[i];
        if (!std::isfinite(y) || y < 0 || std::floor(y) != y)
            throw InvalidInput("count models need nonnegative integer values; cell " + std::to_string(i) +
                               " holds " + std::to_string(y));
        if (family == Family::Binomial) {
            const auto n = (*trials)[i];
            if (n < 1) throw InvalidInput("trial counts must be >= 1; cell " + std::to_string(i));
            if (y > static_cast<double>(n))
                throw InvalidInput("successes exceed trials at cell " + std::to_string(i));
        }
    }
}

Field<double> adjusted_proportions(const Grid& grid, const TrialsMap& trials) {
    require_same_shape(grid, trials, "adjusted_proportions");
    Field<double> out(grid.rows(), grid.cols());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = (grid[i] + 1.0) / (static_cast<double>(trials[i]) + 2.0);
    return out;
}

}  // namespace mcd
