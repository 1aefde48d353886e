#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mcd/field.hpp"
#include "mcd/model.hpp"

namespace mcd {

// ---------------------------------------------------------------------------
// Single-scale per-pixel testing with Storey's direct FDR control.

using PValueField = Field<double>;

enum class TailMethod {
    Exact,        // exact binomial / Poisson upper tail
    NormalApprox  // normal approximation, for cross-checking count models
};

/// One-sided upper-tail p-values P(X >= y) under the null. `null_param`
/// defaults to estimate_null(grid, model); Normal uses model.sigma or the
/// robust sigma of the grid.
PValueField pixel_pvalues(const Grid& grid, const ModelSpec& model,
                          std::optional<double> null_param = {},
                          TailMethod method = TailMethod::Exact);

struct FdrResult {
    Mask mask;
    double gamma = 0.0;      // rejection region {p <= gamma}
    double pi0_hat = 1.0;
    double alpha = 0.0;
    double lambda = 0.5;
    double estimated_fdr = 0.0;  // at gamma; 0 when nothing is rejected
    std::int64_t rejections = 0;
};

inline constexpr double kDefaultStoreyLambda = 0.5;

FdrResult storey_fdr(const PValueField& pvalues, double alpha, double lambda = kDefaultStoreyLambda);

// ---------------------------------------------------------------------------
// Circular spatial scan statistic with Monte Carlo inference.

struct ScanOptions {
    std::vector<int> radii;           // circle radii in cells
    int mc_reps = 99;                 // >= 19
    double cluster_alpha = 0.05;
    double max_exposure_fraction = 0.5;
    std::uint64_t seed = 0;

    static std::vector<int> default_radii() {
        std::vector<int> r;
        for (int i = 1; i <= 20; ++i) r.push_back(i);
        return r;
    }
};

struct ScanCluster {
    Cell center;
    int radius = 0;
    std::vector<Cell> cells;
    double observed = 0.0;   // successes / counts / value sum inside the zone
    double exposure = 0.0;   // trials (Binomial) or cell count (Poisson, Normal)
    double expected = 0.0;   // under the fitted null
    double llr = 0.0;
    double p_value = 1.0;
};

struct ScanResult {
    std::vector<ScanCluster> clusters;   // ranked by LLR, pairwise disjoint
    Mask mask;                           // union of clusters with p <= cluster_alpha
    std::vector<double> replicate_max_llr;
    std::int64_t zone_count = 0;
};

ScanResult circular_scan(const Grid& grid, const ModelSpec& model, const ScanOptions& options);

/// Bernoulli scan log-likelihood ratio of a zone with `c` successes in `n`
/// trials against a total of `total_c` in `total_n`; 0 unless the zone rate
/// exceeds the complement rate.
double bernoulli_llr(double c, double n, double total_c, double total_n);
/// Poisson scan LLR with zone count `c` and expectation `expected` out of total `total_c`.
double poisson_llr(double c, double expected, double total_c);
/// Gaussian mean-shift LLR (known sigma) for a zone of `n` cells with sum `s`.
double normal_llr(double s, double n, double total_s, double total_n, double sigma);

}  // namespace mcd
