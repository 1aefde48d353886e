#include "mcd/simulation.hpp"

#include <cmath>
#include <sstream>

#include "mcd/parallel.hpp"
#include "mcd/rng.hpp"
#include "mcd/robust.hpp"
#include "mcd/statistic.hpp"

namespace mcd {

std::string to_string(MethodKind kind) {
    switch (kind) {
        case MethodKind::Mcd: return "mcd";
        case MethodKind::Fdr: return "fdr";
        case MethodKind::Scan: return "scan";
    }
    return "?";
}

MethodSpec MethodSpec::mcd(std::string name, ScaleLadder ladder) {
    MethodSpec m;
    m.kind = MethodKind::Mcd;
    m.name = std::move(name);
    m.ladder = std::move(ladder);
    return m;
}

MethodSpec MethodSpec::fdr(double alpha, std::string name) {
    MethodSpec m;
    m.kind = MethodKind::Fdr;
    m.name = std::move(name);
    m.alpha = alpha;
    return m;
}

MethodSpec MethodSpec::circular_scan(std::vector<int> radii, int mc_reps, std::string name) {
    MethodSpec m;
    m.kind = MethodKind::Scan;
    m.name = std::move(name);
    m.scan.radii = std::move(radii);
    m.scan.mc_reps = mc_reps;
    return m;
}

double SimConfig::null_parameter() const {
    switch (family) {
        case Family::Binomial: return p0;
        case Family::Poisson: return lambda0;
        case Family::Normal: return mu0;
    }
    return 0.0;
}

void SimConfig::validate() const {
    if (rows < 2 || cols < 2) throw ConfigError("simulation grid must be at least 2x2");
    if (replicates < 2) throw ConfigError("replicates must be at least 2");
    if (alternatives.empty()) throw ConfigError("at least one alternative value is required");
    if (methods.empty()) throw ConfigError("at least one method is required");
    if (family == Family::Binomial) {
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError("p0 must lie in (0,1)");
        for (double a : alternatives)
            if (!(a > p0 && a < 1.0)) throw ConfigError("alternative p1 must satisfy p0 < p1 < 1");
    } else if (family == Family::Poisson) {
        if (!(lambda0 > 0.0)) throw ConfigError("lambda0 must be positive");
        for (double a : alternatives)
            if (!(a > lambda0)) throw ConfigError("alternative lambda1 must exceed lambda0");
    } else {
        if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
        for (double a : alternatives)
            if (!(a > 0.0)) throw ConfigError("alternative delta must be positive");
    }
    for (const auto& m : methods) {
        if (m.name.empty()) throw ConfigError("method names must be non-empty");
        if (m.kind == MethodKind::Mcd && m.threshold_count < 3)
            throw ConfigError("threshold_count must be at least 3");
        if (m.kind == MethodKind::Mcd && m.min_belt_count < 1) throw ConfigError("min_belt_count must be at least 1");
        if (m.kind == MethodKind::Scan && m.scan.mc_reps < 19) throw ConfigError("scan mc_reps must be >= 19");
    }
    for (std::size_t i = 0; i < methods.size(); ++i)
        for (std::size_t j = i + 1; j < methods.size(); ++j)
            if (methods[i].name == methods[j].name)
                throw ConfigError("duplicate method name '" + methods[i].name + "'");
    if (roc_points == 1 || roc_points < 0) throw ConfigError("roc_points must be 0 or >= 2");
    gen_shape(shape, rows, cols);
}

std::string SimConfig::setting_label(double alternative) const {
    std::ostringstream os;
    os << (family == Family::Binomial ? "p1=" : family == Family::Poisson ? "lambda1=" : "delta=") << alternative;
    return os.str();
}

SimulatedData simulate_grid(const SimConfig& config, double alternative, int replicate_index) {
    SimulatedData data;
    data.truth = gen_shape(config.shape, config.rows, config.cols);
    data.grid = Grid(config.rows, config.cols);
    Engine engine = make_engine(config.seed, {stream::simulate, static_cast<std::uint64_t>(replicate_index)});
    for (std::size_t i = 0; i < data.grid.size(); ++i) {
        const bool signal = data.truth[i] != 0;
        switch (config.family) {
            case Family::Binomial:
                data.grid[i] = draw_binomial(engine, config.trials, signal ? alternative : config.p0);
                break;
            case Family::Poisson:
                data.grid[i] = draw_poisson(engine, signal ? alternative : config.lambda0);
                break;
            case Family::Normal:
                data.grid[i] = draw_normal(engine, config.mu0 + (signal ? alternative : 0.0), config.sigma);
                break;
        }
    }
    switch (config.family) {
        case Family::Binomial:
            data.model = ModelSpec::binomial(TrialsMap(config.rows, config.cols, std::int64_t{config.trials}));
            break;
        case Family::Poisson: data.model = ModelSpec::poisson(); break;
        case Family::Normal:
            data.model = ModelSpec::normal(config.sigma_known ? std::optional<double>(config.sigma) : std::nullopt);
            break;
    }
    return data;
}

const MethodSummary& ExperimentSummary::method(const std::string& name) const {
    for (const auto& m : methods)
        if (m.name == name) return m;
    throw InvalidInput("no method named '" + name + "' in the summary");
}

namespace {

struct ReplicateOutcome {
    Mask mask;
    Metrics metrics;
    bool no_signal = false;
    double auc = 0.0;
    std::vector<RocPoint> roc;
};

template <typename E>
[[noreturn]] void rethrow_with_context(const E& e, const std::string& context) {
    throw E(context + ": " + e.what());
}

ReplicateOutcome run_method(const MethodSpec& method, const SimulatedData& data, const SimConfig& config,
                            std::uint64_t scan_seed) {
    ReplicateOutcome out;
    switch (method.kind) {
        case MethodKind::Mcd: {
            const auto stat = compute_statistic(data.grid, data.model, method.ladder);
            const auto var = neighborhood_variability(data.grid, data.model);
            try {
                out.mask = select_and_detect(stat.values, var, method.threshold_count, method.min_belt_count).mask;
            } catch (const NoSignal&) {
                out.mask = Mask(data.grid.rows(), data.grid.cols());
                out.no_signal = true;
            }
            if (config.roc_points >= 2) {
                out.auc = roc_auc(stat.values, data.truth);
                out.roc = roc_curve(stat.values, data.truth, config.roc_points);
            }
            break;
        }
        case MethodKind::Fdr: {
            const auto pv = pixel_pvalues(data.grid, data.model, std::nullopt, method.tail);
            out.mask = storey_fdr(pv, method.alpha, method.lambda).mask;
            break;
        }
        case MethodKind::Scan: {
            ScanOptions opts = method.scan;
            opts.seed = scan_seed;
            out.mask = circular_scan(data.grid, data.model, opts).mask;
            break;
        }
    }
    out.metrics = sensitivity_specificity(out.mask, data.truth);
    return out;
}

}  // namespace

ExperimentSummary run_experiment(const SimConfig& config) {
    config.validate();
    const std::size_t n_methods = config.methods.size();
    const auto reps = static_cast<std::size_t>(config.replicates);

    ExperimentSummary summary;
    summary.truth_cells = static_cast<std::int64_t>(count_on(gen_shape(config.shape, config.rows, config.cols)));
    for (const auto& m : config.methods) summary.methods.push_back({m.name, m.kind, {}});

    for (std::size_t s = 0; s < config.alternatives.size(); ++s) {
        const double alt = config.alternatives[s];
        std::vector<ReplicateOutcome> outcomes(reps * n_methods);
        parallel_for(reps, [&](std::size_t r) {
            try {
                const auto data = simulate_grid(config, alt, static_cast<int>(r));
                for (std::size_t m = 0; m < n_methods; ++m) {
                    const auto scan_seed =
                        stream_seed(config.seed, {stream::scan_monte_carlo, static_cast<std::uint64_t>(s), r});
                    outcomes[r * n_methods + m] = run_method(config.methods[m], data, config, scan_seed);
                }
            } catch (const DegenerateInput& e) {
                rethrow_with_context(e, "replicate " + std::to_string(r) + ", " + config.setting_label(alt));
            } catch (const ConfigError& e) {
                rethrow_with_context(e, "replicate " + std::to_string(r) + ", " + config.setting_label(alt));
            } catch (const InvalidInput& e) {
                rethrow_with_context(e, "replicate " + std::to_string(r) + ", " + config.setting_label(alt));
            } catch (const UndefinedMetric& e) {
                rethrow_with_context(e, "replicate " + std::to_string(r) + ", " + config.setting_label(alt));
            } catch (const Error& e) {
                rethrow_with_context(InternalError(e.what()),
                                     "replicate " + std::to_string(r) + ", " + config.setting_label(alt));
            }
        });

        for (std::size_t m = 0; m < n_methods; ++m) {
            SettingSummary setting;
            setting.label = config.setting_label(alt);
            setting.alternative = alt;
            setting.probability_map = Field<double>(config.rows, config.cols);
            std::vector<double> sens, spec;
            for (std::size_t r = 0; r < reps; ++r) {
                const auto& o = outcomes[r * n_methods + m];
                setting.replicates.push_back(o.metrics);
                sens.push_back(o.metrics.sensitivity);
                spec.push_back(o.metrics.specificity);
                setting.no_signal_replicates += o.no_signal;
                for (std::size_t i = 0; i < o.mask.size(); ++i) setting.probability_map[i] += o.mask[i];
                if (config.methods[m].kind == MethodKind::Mcd && config.roc_points >= 2) setting.aucs.push_back(o.auc);
            }
            for (auto& v : setting.probability_map.values()) v /= static_cast<double>(reps);
            setting.sensitivity_mean = mean(sens);
            setting.sensitivity_std = sample_std(sens);
            setting.specificity_mean = mean(spec);
            setting.specificity_std = sample_std(spec);
            if (!setting.aucs.empty()) {
                setting.auc_mean = mean(setting.aucs);
                setting.roc = outcomes[m].roc;
            }
            summary.methods[m].settings.push_back(std::move(setting));
        }
    }
    return summary;
}

}  // namespace mcd
