// mcd command-line front end: detect, simulate, scan, fdr, theorems, generate.
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcd/baselines.hpp"
#include "mcd/io.hpp"
#include "mcd/parallel.hpp"
#include "mcd/simulation.hpp"
#include "mcd/statistic.hpp"
#include "mcd/theorems.hpp"
#include "mcd/threshold.hpp"

namespace fs = std::filesystem;
using namespace mcd;

namespace {

enum Exit { kOk = 0, kUsage = 2, kDegenerate = 3, kInternal = 4 };

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

double to_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(key + ": '" + text + "' is not a number");
}

long long to_int(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(key + ": '" + text + "' is not an integer");
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key + ": '" + text + "' is not a boolean");
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& s : split(text, ',')) out.push_back(to_double(key, s));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

/// "1-20" or "1,2,5,10".
std::vector<int> to_radii(const std::string& key, const std::string& text) {
    std::vector<int> out;
    for (const auto& part : split(text, ',')) {
        const auto dash = part.find('-');
        if (dash != std::string::npos && dash > 0) {
            const auto lo = to_int(key, part.substr(0, dash)), hi = to_int(key, part.substr(dash + 1));
            if (lo > hi) throw ConfigError(key + ": empty range '" + part + "'");
            for (auto r = lo; r <= hi; ++r) out.push_back(static_cast<int>(r));
        } else {
            out.push_back(static_cast<int>(to_int(key, part)));
        }
    }
    if (out.empty()) throw ConfigError(key + ": no radii given");
    return out;
}

TailMethod to_tail(const std::string& text) {
    if (text == "exact") return TailMethod::Exact;
    if (text == "normal") return TailMethod::NormalApprox;
    throw ConfigError("tail: expected 'exact' or 'normal', got '" + text + "'");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
    if (flag) return *flag;
    if (const char* env = std::getenv("MCD_SEED"); env && *env) {
        const auto v = to_int("MCD_SEED", env);
        if (v < 0) throw ConfigError("MCD_SEED must be nonnegative");
        return static_cast<std::uint64_t>(v);
    }
    return fallback;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InvalidInput("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::string file_label(std::string s) {
    for (auto& ch : s)
        if (ch == '=' || ch == '/' || ch == ' ') ch = '_';
    return s;
}

// ---------------------------------------------------------------------------
// Model options shared by detect, scan and fdr.

struct ModelOptions {
    std::string input;
    std::string trials_path;
    std::optional<std::int64_t> trials_uniform;
    std::string family = "binomial";
    std::optional<double> sigma;
    bool poisson_offset = false;

    void add_to(CLI::App& app) {
        app.add_option("-i,--input", input, "Grid CSV (header rows,cols[,trials])")->required();
        app.add_option("--trials", trials_path, "Trials CSV for the binomial model");
        app.add_option("--trials-uniform", trials_uniform, "Same number of trials at every cell");
        app.add_option("-f,--family", family, "binomial, poisson or normal")->capture_default_str();
        app.add_option("--sigma", sigma, "Known noise sd for the normal model (default: robust estimate)");
        app.add_flag("--poisson-offset", poisson_offset, "Add 0.5 to every Poisson count");
    }

    std::pair<Grid, ModelSpec> load() const {
        auto file = io::read_grid(input);
        const Family fam = parse_family(family);
        switch (fam) {
            case Family::Binomial: {
                std::optional<TrialsMap> trials;
                if (!trials_path.empty()) trials = io::read_trials(trials_path);
                else if (trials_uniform) trials = TrialsMap(file.grid.rows(), file.grid.cols(), *trials_uniform);
                else if (file.trials_uniform)
                    trials = TrialsMap(file.grid.rows(), file.grid.cols(), *file.trials_uniform);
                if (!trials)
                    throw ConfigError("the binomial model needs trials: pass --trials, --trials-uniform, or put "
                                      "them in the grid header");
                require_same_shape(file.grid, *trials, "trials");
                return {std::move(file.grid), ModelSpec::binomial(std::move(*trials))};
            }
            case Family::Poisson: return {std::move(file.grid), ModelSpec::poisson(poisson_offset)};
            case Family::Normal: return {std::move(file.grid), ModelSpec::normal(sigma)};
        }
        throw InternalError("unknown family");
    }
};

// ---------------------------------------------------------------------------
// detect

struct DetectOptions {
    ModelOptions model;
    std::string ladder = "0,s5";
    std::string window_shape = "square";
    int thresholds = kDefaultThresholdCount;
    std::int64_t min_belt = 1;
    std::string out = "detect_out";
};

int run_detect(const DetectOptions& o) {
    auto [grid, model] = o.model.load();
    const auto ladder = ScaleLadder::parse(o.ladder, parse_window_shape(o.window_shape));
    const auto stat = compute_statistic(grid, model, ladder);
    const auto var = neighborhood_variability(grid, model);
    ensure_dir(o.out);
    const fs::path out(o.out);
    io::write_grid(out / "stat.csv", stat.values);
    io::write_grid(out / "var.csv", var);

    io::Json report;
    report["family"] = to_string(model.family);
    report["ladder"] = ladder.to_string();
    report["null_estimate"] = stat.null_estimate;
    if (stat.sigma) report["sigma"] = *stat.sigma;
    report["min_belt_count"] = o.min_belt;
    Mask mask(grid.rows(), grid.cols());
    int code = kOk;
    try {
        const auto result = select_and_detect(stat.values, var, o.thresholds, o.min_belt);
        mask = result.mask;
        report["no_signal"] = false;
        report["scan"] = io::to_json(result.scan);
    } catch (const NoSignal& e) {
        std::cerr << "warning: " << e.what() << "; writing an empty mask\n";
        report["no_signal"] = true;
    }
    report["detected_cells"] = count_on(mask);
    io::write_mask(out / "mask.csv", mask);
    io::write_pgm(out / "mask.pgm", mask);
    io::write_json(out / "scan.json", report);
    std::cout << "detected " << count_on(mask) << " of " << mask.size() << " cells; outputs in " << o.out << "\n";
    return code;
}

// ---------------------------------------------------------------------------
// fdr

struct FdrOptions {
    ModelOptions model;
    double alpha = 0.6;
    double lambda = kDefaultStoreyLambda;
    std::string tail = "exact";
    std::optional<double> null_param;
    std::string out = "fdr_out";
};

int run_fdr(const FdrOptions& o) {
    auto [grid, model] = o.model.load();
    const auto pv = pixel_pvalues(grid, model, o.null_param, to_tail(o.tail));
    const auto fdr = storey_fdr(pv, o.alpha, o.lambda);
    ensure_dir(o.out);
    const fs::path out(o.out);
    io::write_grid(out / "pvalues.csv", pv);
    io::write_mask(out / "mask.csv", fdr.mask);
    io::write_pgm(out / "mask.pgm", fdr.mask);
    io::write_json(out / "fdr.json", io::to_json(fdr));
    std::cout << "rejected " << fdr.rejections << " cells at gamma " << fdr.gamma << "; outputs in " << o.out << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// scan

struct ScanCliOptions {
    ModelOptions model;
    std::string radii = "1-20";
    int mc_reps = 99;
    double cluster_alpha = 0.05;
    double max_fraction = 0.5;
    std::optional<std::uint64_t> seed;
    std::string out = "scan_out";
};

int run_scan(const ScanCliOptions& o) {
    auto [grid, model] = o.model.load();
    ScanOptions opts;
    opts.radii = to_radii("radii", o.radii);
    opts.mc_reps = o.mc_reps;
    opts.cluster_alpha = o.cluster_alpha;
    opts.max_exposure_fraction = o.max_fraction;
    opts.seed = resolve_seed(o.seed, 1);
    const auto result = circular_scan(grid, model, opts);
    ensure_dir(o.out);
    const fs::path out(o.out);
    io::write_mask(out / "mask.csv", result.mask);
    io::write_pgm(out / "mask.pgm", result.mask);
    auto j = io::to_json(result);
    j["seed"] = opts.seed;
    j["mc_reps"] = opts.mc_reps;
    io::write_json(out / "scan.json", j);
    std::cout << result.clusters.size() << " cluster(s) reported, " << count_on(result.mask)
              << " cells detected; outputs in " << o.out << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// simulate / generate configuration

const std::vector<std::string>& sim_keys() {
    static const std::vector<std::string> keys = {
        "rows",      "cols",          "family",     "trials",         "p0",          "lambda0",
        "mu0",       "sigma",         "sigma_known", "alternatives",  "shape",       "disc_radius",
        "replicates", "seed",         "methods",    "ladder",         "window_shape", "threshold_count",
        "min_belt_count", "alpha",    "lambda",     "tail",           "radii",       "mc_reps",
        "cluster_alpha", "roc_points", "maps"};
    return keys;
}

struct SimSettings {
    SimConfig config;
    bool maps = true;
};

SimSettings build_sim_config(const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv)
        if (std::find(sim_keys().begin(), sim_keys().end(), k) == sim_keys().end())
            throw ConfigError("unknown configuration key '" + k + "'");
    auto get = [&](const std::string& k) -> std::optional<std::string> {
        const auto it = kv.find(k);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    SimSettings s;
    SimConfig& c = s.config;
    if (auto v = get("rows")) c.rows = static_cast<int>(to_int("rows", *v));
    if (auto v = get("cols")) c.cols = static_cast<int>(to_int("cols", *v));
    if (auto v = get("family")) c.family = parse_family(*v);
    if (auto v = get("trials")) c.trials = static_cast<int>(to_int("trials", *v));
    if (auto v = get("p0")) c.p0 = to_double("p0", *v);
    if (auto v = get("lambda0")) c.lambda0 = to_double("lambda0", *v);
    if (auto v = get("mu0")) c.mu0 = to_double("mu0", *v);
    if (auto v = get("sigma")) c.sigma = to_double("sigma", *v);
    if (auto v = get("sigma_known")) c.sigma_known = to_bool("sigma_known", *v);
    if (auto v = get("alternatives")) c.alternatives = to_doubles("alternatives", *v);
    if (auto v = get("shape")) c.shape.kind = parse_shape_kind(*v);
    if (c.shape.kind == ShapeKind::Custom) throw ConfigError("shape: custom masks are not available from a config");
    if (auto v = get("disc_radius")) c.shape.disc_radius = static_cast<int>(to_int("disc_radius", *v));
    if (auto v = get("replicates")) c.replicates = static_cast<int>(to_int("replicates", *v));
    if (auto v = get("seed")) {
        const auto seed = to_int("seed", *v);
        if (seed < 0) throw ConfigError("seed must be nonnegative");
        c.seed = static_cast<std::uint64_t>(seed);
    }
    if (auto v = get("roc_points")) c.roc_points = static_cast<int>(to_int("roc_points", *v));
    if (auto v = get("maps")) s.maps = to_bool("maps", *v);

    const auto shape = parse_window_shape(get("window_shape").value_or("square"));
    c.methods.clear();
    for (const auto& name : split(get("methods").value_or("mcd"), ',')) {
        if (name == "mcd") {
            auto m = MethodSpec::mcd("mcd", ScaleLadder::parse(get("ladder").value_or("0,5"), shape));
            if (auto v = get("threshold_count")) m.threshold_count = static_cast<int>(to_int("threshold_count", *v));
            if (auto v = get("min_belt_count")) m.min_belt_count = to_int("min_belt_count", *v);
            c.methods.push_back(std::move(m));
        } else if (name == "fdr") {
            auto m = MethodSpec::fdr(to_double("alpha", get("alpha").value_or("0.6")));
            if (auto v = get("lambda")) m.lambda = to_double("lambda", *v);
            if (auto v = get("tail")) m.tail = to_tail(*v);
            c.methods.push_back(std::move(m));
        } else if (name == "scan") {
            auto m = MethodSpec::circular_scan(to_radii("radii", get("radii").value_or("1-20")),
                                               static_cast<int>(to_int("mc_reps", get("mc_reps").value_or("99"))));
            if (auto v = get("cluster_alpha")) m.scan.cluster_alpha = to_double("cluster_alpha", *v);
            c.methods.push_back(std::move(m));
        } else {
            throw ConfigError("methods: unknown method '" + name + "' (expected mcd, fdr or scan)");
        }
    }
    c.validate();
    return s;
}

std::map<std::string, std::string> merged_config(const std::string& path, const std::vector<std::string>& sets) {
    std::map<std::string, std::string> kv;
    if (!path.empty()) kv = io::read_key_values(path);
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
        kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    return kv;
}

struct SimulateOptions {
    std::string config;
    std::vector<std::string> sets;
    std::optional<int> replicates;
    std::optional<std::uint64_t> seed;
    std::string out = "simulate_out";
};

int run_simulate(const SimulateOptions& o) {
    auto kv = merged_config(o.config, o.sets);
    if (o.replicates) kv["replicates"] = std::to_string(*o.replicates);
    if (o.seed || !kv.count("seed")) kv["seed"] = std::to_string(resolve_seed(o.seed, 1));
    const auto settings = build_sim_config(kv);
    const auto summary = run_experiment(settings.config);

    ensure_dir(o.out);
    const fs::path out(o.out);
    auto j = io::to_json(summary);
    io::Json cfg;
    for (const auto& [k, v] : kv) cfg[k] = v;
    j["config"] = cfg;
    io::write_json(out / "summary.json", j);
    for (const auto& m : summary.methods) {
        for (const auto& s : m.settings) {
            const std::string stem = file_label(m.name + "_" + s.label);
            if (settings.maps) {
                ensure_dir(out / "maps");
                io::write_grid(out / "maps" / (stem + ".csv"), s.probability_map);
                io::write_pgm(out / "maps" / (stem + ".pgm"), s.probability_map);
            }
            if (!s.roc.empty()) {
                ensure_dir(out / "roc");
                std::ofstream roc(out / "roc" / (stem + ".csv"), std::ios::binary);
                roc << "threshold,false_positive_rate,true_positive_rate\n";
                for (const auto& p : s.roc)
                    roc << io::format_number(p.threshold) << ',' << io::format_number(p.false_positive_rate) << ','
                        << io::format_number(p.true_positive_rate) << '\n';
            }
            std::cout << m.name << " " << s.label << ": specificity " << s.specificity_mean << " ("
                      << s.specificity_std << "), sensitivity " << s.sensitivity_mean << " (" << s.sensitivity_std
                      << ")\n";
        }
    }
    return kOk;
}

struct GenerateOptions {
    std::string config;
    std::vector<std::string> sets;
    std::optional<double> alternative;
    int replicate = 0;
    std::optional<std::uint64_t> seed;
    std::string out = "generated";
};

int run_generate(const GenerateOptions& o) {
    auto kv = merged_config(o.config, o.sets);
    if (o.seed || !kv.count("seed")) kv["seed"] = std::to_string(resolve_seed(o.seed, 1));
    if (!kv.count("replicates")) kv["replicates"] = "2";
    const auto settings = build_sim_config(kv);
    const double alt = o.alternative.value_or(settings.config.alternatives.front());
    const auto data = simulate_grid(settings.config, alt, o.replicate);
    ensure_dir(o.out);
    const fs::path out(o.out);
    std::optional<std::int64_t> trials;
    if (settings.config.family == Family::Binomial) trials = settings.config.trials;
    io::write_grid(out / "grid.csv", data.grid, trials);
    io::write_mask(out / "truth.csv", data.truth);
    io::write_pgm(out / "truth.pgm", data.truth);
    std::cout << "wrote " << (out / "grid.csv").string() << " (" << count_on(data.truth) << " signal cells)\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// theorems

struct TheoremOptions {
    std::optional<double> delta;
    int reps = 200;
    int rows = 100;
    int cols = 100;
    int disc_radius = 20;
    int cell_reps = 20000;
    std::optional<std::uint64_t> seed;
    std::string out = "theorems.json";
};

int run_theorems(const TheoremOptions& o) {
    TheoremSetting s;
    s.delta = *o.delta;
    s.replicates = o.reps;
    s.rows = o.rows;
    s.cols = o.cols;
    s.shape = ShapeSpec::disc(o.disc_radius);
    s.seed = resolve_seed(o.seed, 1);
    const auto report = theorem_check(s);
    auto j = io::to_json(report);
    j["seed"] = s.seed;
    j["shape"] = "disc";
    j["disc_radius"] = o.disc_radius;
    j["boundary_cell_k2"] = io::to_json(boundary_cell_variability(2, s.delta, o.cell_reps, s.seed));
    const fs::path out(o.out);
    if (out.has_parent_path()) ensure_dir(out.parent_path());
    io::write_json(out, j);
    if (!report.note.empty()) std::cout << "note: " << report.note << "\n";
    std::cout << "theorem 1 success fraction " << report.theorem1_success << ", theorem 2 success fraction "
              << report.theorem2_success << "; report in " << o.out << "\n";
    return kOk;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const DegenerateInput*>(&e) || dynamic_cast<const UndefinedMetric*>(&e)) return kDegenerate;
    if (dynamic_cast<const mcd::ParseError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
        dynamic_cast<const InvalidInput*>(&e))
        return kUsage;
    return kInternal;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-resolution spatial cluster detection"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker thread cap (0 = all cores)");

    DetectOptions det;
    auto* detect = app.add_subcommand("detect", "MCD statistic, variability threshold and detection mask");
    det.model.add_to(*detect);
    detect->add_option("--ladder", det.ladder, "Scale ladder, e.g. 0,s5 or 0,1,2,3,4,5")->capture_default_str();
    detect->add_option("--window-shape", det.window_shape, "Shape for bare radii in --ladder")->capture_default_str();
    detect->add_option("-K,--thresholds", det.thresholds, "Number of thresholds")->capture_default_str();
    detect->add_option("--min-belt", det.min_belt, "Smallest belt eligible for the argmax")->capture_default_str();
    detect->add_option("-o,--out", det.out, "Output directory")->capture_default_str();

    FdrOptions fdr;
    auto* fdr_cmd = app.add_subcommand("fdr", "Per-cell tests with Storey's direct FDR");
    fdr.model.add_to(*fdr_cmd);
    fdr_cmd->add_option("--alpha", fdr.alpha, "FDR level")->capture_default_str();
    fdr_cmd->add_option("--lambda", fdr.lambda, "Storey tuning parameter")->capture_default_str();
    fdr_cmd->add_option("--tail", fdr.tail, "exact or normal")->capture_default_str();
    fdr_cmd->add_option("--null", fdr.null_param, "Null parameter (default: estimated)");
    fdr_cmd->add_option("-o,--out", fdr.out, "Output directory")->capture_default_str();

    ScanCliOptions scan;
    auto* scan_cmd = app.add_subcommand("scan", "Circular scan statistic with Monte Carlo p-values");
    scan.model.add_to(*scan_cmd);
    scan_cmd->add_option("--radii", scan.radii, "Radii, e.g. 1-20 or 1,2,4")->capture_default_str();
    scan_cmd->add_option("--mc-reps", scan.mc_reps, "Monte Carlo replicates (>= 19)")->capture_default_str();
    scan_cmd->add_option("--cluster-alpha", scan.cluster_alpha, "Reporting level")->capture_default_str();
    scan_cmd->add_option("--max-fraction", scan.max_fraction, "Largest zone as a share of exposure")
        ->capture_default_str();
    scan_cmd->add_option("--seed", scan.seed, "Seed (falls back to MCD_SEED, then 1)");
    scan_cmd->add_option("-o,--out", scan.out, "Output directory")->capture_default_str();

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Sensitivity/specificity experiment");
    sim_cmd->add_option("-c,--config", sim.config, "key = value configuration file");
    sim_cmd->add_option("--set", sim.sets, "Override a configuration key (key=value)");
    sim_cmd->add_option("--replicates", sim.replicates, "Replicates per setting");
    sim_cmd->add_option("--seed", sim.seed, "Seed (falls back to the config, MCD_SEED, then 1)");
    sim_cmd->add_option("-o,--out", sim.out, "Output directory")->capture_default_str();

    GenerateOptions gen;
    auto* gen_cmd = app.add_subcommand("generate", "Write one simulated grid and its truth mask");
    gen_cmd->add_option("-c,--config", gen.config, "key = value configuration file");
    gen_cmd->add_option("--set", gen.sets, "Override a configuration key (key=value)");
    gen_cmd->add_option("--alternative", gen.alternative, "Alternative parameter (default: first in config)");
    gen_cmd->add_option("--replicate", gen.replicate, "Replicate index")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Seed (falls back to the config, MCD_SEED, then 1)");
    gen_cmd->add_option("-o,--out", gen.out, "Output directory")->capture_default_str();

    TheoremOptions thm;
    auto* thm_cmd = app.add_subcommand("theorems", "Monte Carlo checks of the boundary theorems");
    thm_cmd->add_option("--delta", thm.delta, "Signal mean shift (>= 0)")->required();
    thm_cmd->add_option("--reps", thm.reps, "Replicates")->capture_default_str();
    thm_cmd->add_option("--rows", thm.rows)->capture_default_str();
    thm_cmd->add_option("--cols", thm.cols)->capture_default_str();
    thm_cmd->add_option("--disc-radius", thm.disc_radius)->capture_default_str();
    thm_cmd->add_option("--cell-reps", thm.cell_reps, "Replicates for the single boundary cell check")
        ->capture_default_str();
    thm_cmd->add_option("--seed", thm.seed, "Seed (falls back to MCD_SEED, then 1)");
    thm_cmd->add_option("-o,--out", thm.out, "Output JSON")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        set_thread_limit(threads);
        if (*detect) return run_detect(det);
        if (*fdr_cmd) return run_fdr(fdr);
        if (*scan_cmd) return run_scan(scan);
        if (*sim_cmd) return run_simulate(sim);
        if (*gen_cmd) return run_generate(gen);
        if (*thm_cmd) return run_theorems(thm);
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        std::cerr << "error: " << e.what() << "\n";
        return code;
    }
    return kInternal;
}
