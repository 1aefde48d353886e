#include "mcd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace mcd::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        parts.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_number(std::string_view text, int line, int column) {
    double v = 0.0;
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": '" +
                             std::string(text) + "' is not a number",
                         line, column);
    if (!std::isfinite(v))
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": non-finite value",
                         line, column);
    return v;
}

std::int64_t parse_integer(std::string_view text, int line, int column, const char* what) {
    const double v = parse_number(text, line, column);
    if (v != std::floor(v) || std::abs(v) > 9.007199254740992e15)
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what +
                             " must be an integer",
                         line, column);
    return static_cast<std::int64_t>(v);
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot open '" + path.string() + "' for writing");
    return out;
}

template <typename T, typename Convert>
Field<T> read_layout(const std::filesystem::path& path, Convert convert) {
    auto in = open_in(path);
    const GridFile file = parse_grid(in);
    Field<T> out(file.grid.rows(), file.grid.cols());
    for (int r = 0; r < out.rows(); ++r)
        for (int c = 0; c < out.cols(); ++c) out(r, c) = convert(file.grid(r, c), r, c);
    return out;
}

}  // namespace

std::string format_number(double v) {
    if (v == std::floor(v) && std::abs(v) < 9.007199254740992e15) {
        if (v == 0.0) return "0";
        return std::to_string(static_cast<std::int64_t>(v));
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

GridFile parse_grid(std::istream& in) {
    std::string line;
    int line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!trim(line).empty()) return true;
        }
        return false;
    };
    if (!next_line()) throw ParseError("line 1: empty grid file, missing header 'rows,cols[,trials]'", 1);
    const auto header = split_commas(trim(line));
    if (header.size() < 2 || header.size() > 3)
        throw ParseError("line " + std::to_string(line_no) + ": header must be 'rows,cols[,trials_uniform]'",
                         line_no);
    const auto rows = parse_integer(header[0], line_no, 1, "rows");
    const auto cols = parse_integer(header[1], line_no, 2, "cols");
    if (rows <= 0 || cols <= 0 || rows > 1000000 || cols > 1000000)
        throw ParseError("line " + std::to_string(line_no) + ": rows and cols must be positive", line_no);
    GridFile file;
    if (header.size() == 3) {
        file.trials_uniform = parse_integer(header[2], line_no, 3, "trials");
        if (*file.trials_uniform < 1)
            throw ParseError("line " + std::to_string(line_no) + ": trials must be >= 1", line_no, 3);
    }

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(rows * cols));
    const auto total = static_cast<std::size_t>(rows * cols);
    bool one_per_line = false;
    int body_lines = 0;
    while (next_line()) {
        const auto parts = split_commas(trim(line));
        if (body_lines == 0) one_per_line = cols > 1 && parts.size() == 1;
        ++body_lines;
        const std::size_t expected = one_per_line ? 1 : static_cast<std::size_t>(cols);
        if (parts.size() != expected)
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                                 " values, found " + std::to_string(parts.size()),
                             line_no, static_cast<int>(std::min(parts.size(), expected)) + 1);
        if (values.size() + parts.size() > total)
            throw ParseError("line " + std::to_string(line_no) + ": more data than the header declares", line_no);
        for (std::size_t j = 0; j < parts.size(); ++j)
            values.push_back(parse_number(parts[j], line_no, static_cast<int>(j) + 1));
    }
    if (values.size() != total)
        throw ParseError("line " + std::to_string(line_no + 1) + ": expected " + std::to_string(total) +
                             " values, file ends after " + std::to_string(values.size()),
                         line_no + 1);
    file.grid = Grid(static_cast<int>(rows), static_cast<int>(cols), std::move(values));
    return file;
}

GridFile read_grid(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return parse_grid(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line(), e.column());
    }
}

void write_grid(std::ostream& out, const Field<double>& grid, std::optional<std::int64_t> trials_uniform) {
    out << grid.rows() << ',' << grid.cols();
    if (trials_uniform) out << ',' << *trials_uniform;
    out << '\n';
    std::string row;
    for (int r = 0; r < grid.rows(); ++r) {
        row.clear();
        for (int c = 0; c < grid.cols(); ++c) {
            if (c) row += ',';
            row += format_number(grid(r, c));
        }
        out << row << '\n';
    }
}

void write_grid(const std::filesystem::path& path, const Field<double>& grid,
                std::optional<std::int64_t> trials_uniform) {
    auto out = open_out(path);
    write_grid(out, grid, trials_uniform);
    if (!out) throw InvalidInput("failed writing '" + path.string() + "'");
}

TrialsMap read_trials(const std::filesystem::path& path) {
    return read_layout<std::int64_t>(path, [&](double v, int r, int c) {
        if (v < 0 || v != std::floor(v))
            throw ParseError(path.string() + ": line " + std::to_string(r + 2) + ", column " +
                                 std::to_string(c + 1) + ": trials must be nonnegative integers",
                             r + 2, c + 1);
        return static_cast<std::int64_t>(v);
    });
}

Mask read_mask(const std::filesystem::path& path) {
    return read_layout<std::uint8_t>(path, [&](double v, int r, int c) {
        if (v != 0.0 && v != 1.0)
            throw ParseError(path.string() + ": line " + std::to_string(r + 2) + ", column " +
                                 std::to_string(c + 1) + ": mask values must be 0 or 1",
                             r + 2, c + 1);
        return static_cast<std::uint8_t>(v);
    });
}

void write_mask(const std::filesystem::path& path, const Mask& mask) {
    Field<double> as_double(mask.rows(), mask.cols());
    for (std::size_t i = 0; i < mask.size(); ++i) as_double[i] = mask[i] ? 1.0 : 0.0;
    write_grid(path, as_double);
}

void write_pgm(const std::filesystem::path& path, const Mask& mask) {
    auto out = open_out(path);
    out << "P5\n" << mask.cols() << ' ' << mask.rows() << "\n255\n";
    std::vector<char> bytes(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) bytes[i] = static_cast<char>(mask[i] ? 255 : 0);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_pgm(const std::filesystem::path& path, const Field<double>& probabilities) {
    auto out = open_out(path);
    out << "P5\n" << probabilities.cols() << ' ' << probabilities.rows() << "\n255\n";
    std::vector<char> bytes(probabilities.size());
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double p = std::clamp(probabilities[i], 0.0, 1.0);
        bytes[i] = static_cast<char>(static_cast<unsigned char>(std::lround(p * 255.0)));
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
        const std::string key(trim(view.substr(0, eq)));
        std::string value(trim(view.substr(eq + 1)));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty key", line_no);
        if (!kv.emplace(key, value).second)
            throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'", line_no);
    }
    return kv;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return parse_key_values(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line(), e.column());
    }
}

namespace {

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const ThresholdScan& scan) {
    Json j;
    j["threshold_count"] = scan.threshold_count();
    j["t_star"] = scan.t_star;
    j["chosen_belt"] = scan.chosen_belt;
    j["variability_ratio"] = nullable(scan.variability_ratio);
    Json thresholds = Json::array(), means = Json::array(), counts = Json::array();
    for (double t : scan.thresholds) thresholds.push_back(t);
    for (double m : scan.belt_means) means.push_back(nullable(m));
    for (auto c : scan.belt_counts) counts.push_back(c);
    j["thresholds"] = thresholds;
    j["belt_means"] = means;
    j["belt_counts"] = counts;
    return j;
}

Json to_json(const FdrResult& fdr) {
    Json j;
    j["alpha"] = fdr.alpha;
    j["lambda"] = fdr.lambda;
    j["pi0_hat"] = fdr.pi0_hat;
    j["gamma"] = fdr.gamma;
    j["estimated_fdr"] = fdr.estimated_fdr;
    j["rejections"] = fdr.rejections;
    return j;
}

Json to_json(const ScanResult& scan, bool include_cells) {
    Json j;
    j["zone_count"] = scan.zone_count;
    j["detected_cells"] = count_on(scan.mask);
    Json clusters = Json::array();
    for (const auto& c : scan.clusters) {
        Json cj;
        cj["row"] = c.center.row;
        cj["col"] = c.center.col;
        cj["radius"] = c.radius;
        cj["cells"] = c.cells.size();
        cj["observed"] = c.observed;
        cj["exposure"] = c.exposure;
        cj["expected"] = c.expected;
        cj["llr"] = c.llr;
        cj["p_value"] = c.p_value;
        if (include_cells) {
            Json cells = Json::array();
            for (const auto& cell : c.cells) cells.push_back({cell.row, cell.col});
            cj["cell_list"] = cells;
        }
        clusters.push_back(cj);
    }
    j["clusters"] = clusters;
    return j;
}

Json to_json(const ExperimentSummary& summary) {
    Json j;
    j["truth_cells"] = summary.truth_cells;
    Json methods;
    for (const auto& m : summary.methods) {
        Json mj;
        mj["kind"] = to_string(m.kind);
        Json settings;
        for (const auto& s : m.settings) {
            Json sj;
            sj["alternative"] = s.alternative;
            sj["sensitivity_mean"] = s.sensitivity_mean;
            sj["sensitivity_std"] = s.sensitivity_std;
            sj["specificity_mean"] = s.specificity_mean;
            sj["specificity_std"] = s.specificity_std;
            sj["replicates"] = s.replicates.size();
            if (m.kind == MethodKind::Mcd) sj["no_signal_replicates"] = s.no_signal_replicates;
            if (s.auc_mean) sj["auc_mean"] = *s.auc_mean;
            settings[s.label] = sj;
        }
        mj["settings"] = settings;
        methods[m.name] = mj;
    }
    j["methods"] = methods;
    return j;
}

Json to_json(const TheoremReport& r) {
    Json j;
    j["delta"] = r.delta;
    j["replicates"] = r.replicates;
    j["partition"] = {{"n_noise", r.n_noise}, {"n_boundary", r.n_boundary}, {"n_signal", r.n_signal},
                      {"p_boundary", r.p_boundary}};
    j["theorem1"] = {{"mean_t_noise", r.mean_t_noise},
                     {"mean_t_boundary", r.mean_t_boundary},
                     {"mean_t_signal", r.mean_t_signal},
                     {"success_fraction", r.theorem1_success}};
    j["theorem2"] = {{"mean_v_boundary", r.mean_v_boundary},
                     {"mean_v_rest", r.mean_v_rest},
                     {"difference_mean", r.v_difference_mean},
                     {"difference_se", r.v_difference_se},
                     {"success_fraction", r.theorem2_success},
                     {"interior_boundary_cells", r.interior_boundary_cells},
                     {"boundary_vtilde_mean", r.boundary_vtilde_mean},
                     {"boundary_vtilde_expected", r.boundary_vtilde_expected}};
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

Json to_json(const BoundaryCellEstimate& e) {
    return {{"mean", e.mean}, {"standard_error", e.standard_error}, {"expected", e.expected}};
}

void write_json(const std::filesystem::path& path, const Json& json) {
    auto out = open_out(path);
    out << json.dump(2) << '\n';
    if (!out) throw InvalidInput("failed writing '" + path.string() + "'");
}

}  // namespace mcd::io
