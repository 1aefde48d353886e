#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcd/baselines.hpp"
#include "mcd/field.hpp"
#include "mcd/metrics.hpp"
#include "mcd/model.hpp"
#include "mcd/shapes.hpp"
#include "mcd/threshold.hpp"
#include "mcd/window.hpp"

namespace mcd {

enum class MethodKind { Mcd, Fdr, Scan };

std::string to_string(MethodKind kind);

/// One detection method evaluated by the harness.
struct MethodSpec {
    MethodKind kind = MethodKind::Mcd;
    std::string name = "mcd";
    // MCD
    ScaleLadder ladder = ScaleLadder::two_scale();
    int threshold_count = kDefaultThresholdCount;
    std::int64_t min_belt_count = 1;
    // FDR
    double alpha = 0.6;
    double lambda = kDefaultStoreyLambda;
    TailMethod tail = TailMethod::Exact;
    // Scan (seed is derived per replicate)
    ScanOptions scan{ScanOptions::default_radii()};

    static MethodSpec mcd(std::string name = "mcd", ScaleLadder ladder = ScaleLadder::two_scale());
    static MethodSpec fdr(double alpha = 0.6, std::string name = "fdr");
    static MethodSpec circular_scan(std::vector<int> radii = ScanOptions::default_radii(), int mc_reps = 99,
                                    std::string name = "scan");
};

/// A simulation experiment: i.i.d. null background with an alternative
/// inside the shape, repeated `replicates` times per alternative value.
struct SimConfig {
    int rows = 100;
    int cols = 100;
    Family family = Family::Binomial;
    int trials = 100;          // Binomial N0
    double p0 = 0.2;           // Binomial null
    double lambda0 = 5.0;      // Poisson null
    double mu0 = 0.0;          // Normal null mean
    double sigma = 1.0;        // Normal noise sd
    bool sigma_known = true;   // Normal: pass sigma to the model instead of estimating it
    // Alternative parameter per setting: p1 (Binomial), lambda1 (Poisson) or
    // delta (Normal, signal mean mu0 + delta).
    std::vector<double> alternatives = {0.25};
    ShapeSpec shape;
    int replicates = 100;
    std::uint64_t seed = 1;
    std::vector<MethodSpec> methods = {MethodSpec::mcd()};
    int roc_points = 0;  // > 0: record ROC curves and AUC for MCD methods

    /// Throws ConfigError on an invalid configuration.
    void validate() const;
    /// Null parameter of the configured family.
    double null_parameter() const;
    std::string setting_label(double alternative) const;
};

struct SimulatedData {
    Grid grid;
    Mask truth;
    ModelSpec model;
};

/// Grid for (alternative, replicate_index); fully determined by
/// (seed, replicate_index) with cells drawn in row-major order.
SimulatedData simulate_grid(const SimConfig& config, double alternative, int replicate_index);

struct SettingSummary {
    std::string label;
    double alternative = 0.0;
    double sensitivity_mean = 0.0;
    double sensitivity_std = 0.0;
    double specificity_mean = 0.0;
    double specificity_std = 0.0;
    std::vector<Metrics> replicates;
    Field<double> probability_map;
    int no_signal_replicates = 0;  // MCD only: constant statistic, empty detection
    std::optional<double> auc_mean;
    std::vector<double> aucs;
    std::vector<RocPoint> roc;  // replicate 0
};

struct MethodSummary {
    std::string name;
    MethodKind kind = MethodKind::Mcd;
    std::vector<SettingSummary> settings;
};

struct ExperimentSummary {
    std::vector<MethodSummary> methods;
    std::int64_t truth_cells = 0;
    const MethodSummary& method(const std::string& name) const;
};

/// Runs every method on every (alternative, replicate). Replicates may run
/// concurrently; the summary does not depend on the thread count.
ExperimentSummary run_experiment(const SimConfig& config);

}  // namespace mcd
