#pragma once

#include <optional>
#include <string>

#include "mcd/field.hpp"

namespace mcd {

enum class Family { Binomial, Poisson, Normal };

std::string to_string(Family family);
Family parse_family(const std::string& text);

/// Observation model. Binomial requires trials; Normal may carry a known
/// sigma (estimated robustly from the grid otherwise).
struct ModelSpec {
    Family family = Family::Normal;
    std::optional<TrialsMap> trials;
    std::optional<double> sigma;
    // Poisson only: add 0.5 to every count. Off unless requested.
    bool poisson_offset = false;

    static ModelSpec binomial(TrialsMap trials) { return {Family::Binomial, std::move(trials), {}, false}; }
    static ModelSpec poisson(bool offset = false) { return {Family::Poisson, {}, {}, offset}; }
    static ModelSpec normal(std::optional<double> sigma = {}) { return {Family::Normal, {}, sigma, false}; }

    /// Checks the family/trials/sigma combination and the grid's values
    /// (count models need nonnegative integers, Binomial Y <= N).
    void validate(const Grid& grid) const;
};

/// (Y + 1) / (N + 2) per cell.
Field<double> adjusted_proportions(const Grid& grid, const TrialsMap& trials);

}  // namespace mcd
