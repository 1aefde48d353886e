#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcd/field.hpp"
#include "mcd/shapes.hpp"

namespace mcd {

enum class PixelClass : std::uint8_t { Noise, Boundary, Signal };

/// 5-point rule: a pixel is Boundary when its in-grid cross holds both
/// signal and noise cells, otherwise it takes the class of its group.
Field<PixelClass> classify_pixels(const Mask& truth);

struct TheoremSetting {
    double delta = 1.0;
    int rows = 100;
    int cols = 100;
    ShapeSpec shape = ShapeSpec::disc(20);
    std::uint64_t seed = 1;
    int replicates = 200;
};

struct TheoremReport {
    double delta = 0.0;
    int replicates = 0;
    std::int64_t n_noise = 0;
    std::int64_t n_boundary = 0;
    std::int64_t n_signal = 0;
    double p_boundary = 0.0;  // n_b / N

    // Theorem 1: Ave_N T < Ave_B T < Ave_S T
    double mean_t_noise = 0.0;
    double mean_t_boundary = 0.0;
    double mean_t_signal = 0.0;
    double theorem1_success = 0.0;

    // Theorem 2: Ave_B V > Ave_{B^c} V
    double mean_v_boundary = 0.0;
    double mean_v_rest = 0.0;
    double v_difference_mean = 0.0;
    double v_difference_se = 0.0;
    double theorem2_success = 0.0;

    // Boundary cells with a full cross: mean of 4V against 4 + mean C,
    // C = k delta^2 - k^2 delta^2 / 5 for k signal cells in the cross.
    std::int64_t interior_boundary_cells = 0;
    double boundary_vtilde_mean = 0.0;
    double boundary_vtilde_expected = 0.0;

    std::vector<std::uint8_t> theorem1_indicators;
    std::vector<std::uint8_t> theorem2_indicators;
    std::string note;
};

/// Normal model with known sigma = 1 and the ladder [0, Circle 1]; both
/// theorem checks share one set of replicates. delta = 0 is allowed and
/// produces a note; delta < 0 or a partition without boundary cells throws
/// ConfigError.
TheoremReport theorem_check(const TheoremSetting& setting);

struct BoundaryCellEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    double expected = 0.0;
};

/// E[4V] for one cross with k of its 5 cells shifted by delta.
BoundaryCellEstimate boundary_cell_variability(int k, double delta, int replicates, std::uint64_t seed);

}  // namespace mcd
