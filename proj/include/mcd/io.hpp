#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "mcd/baselines.hpp"
#include "mcd/field.hpp"
#include "mcd/simulation.hpp"
#include "mcd/theorems.hpp"
#include "mcd/threshold.hpp"

#include <json.hpp>

namespace mcd::io {

using Json = nlohmann::ordered_json;

// Grid CSV: a header line "rows,cols[,trials_uniform]" followed by `rows`
// lines of `cols` comma-separated numbers. A body of rows*cols lines with one
// number each is accepted as well. Integral values are written without a
// decimal point, others with 17 significant digits.

struct GridFile {
    Grid grid;
    std::optional<std::int64_t> trials_uniform;
};

GridFile parse_grid(std::istream& in);
GridFile read_grid(const std::filesystem::path& path);
void write_grid(std::ostream& out, const Field<double>& grid, std::optional<std::int64_t> trials_uniform = {});
void write_grid(const std::filesystem::path& path, const Field<double>& grid,
                std::optional<std::int64_t> trials_uniform = {});

/// Same layout; every value must be a nonnegative integer.
TrialsMap read_trials(const std::filesystem::path& path);
/// Same layout with 0/1 values.
Mask read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const Mask& mask);

/// Binary PGM (P5). Masks map to 0/255; probability maps in [0,1] are
/// scaled and rounded.
void write_pgm(const std::filesystem::path& path, const Mask& mask);
void write_pgm(const std::filesystem::path& path, const Field<double>& probabilities);

std::string format_number(double v);

/// Flat "key = value" file. '#' starts a comment; blank lines are skipped;
/// a repeated key is a ParseError.
std::map<std::string, std::string> parse_key_values(std::istream& in);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

Json to_json(const ThresholdScan& scan);
Json to_json(const FdrResult& fdr);
Json to_json(const ScanResult& scan, bool include_cells = false);
Json to_json(const ExperimentSummary& summary);
Json to_json(const TheoremReport& report);
Json to_json(const BoundaryCellEstimate& estimate);

void write_json(const std::filesystem::path& path, const Json& json);

}  // namespace mcd::io
