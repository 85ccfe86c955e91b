#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqdet/detector.hpp"

namespace seqdet::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCsvMagic = "# seqdet-csv v1";

// Malformed observation input (exit code 2); the message cites the line.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem problems (exit code 1).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value configuration text; '#' starts a comment. Keys:
//   procedure, family, theta, lambda, a, beta, eta_grid_n, grid_n,
//   pair (beta | q0-const:V | q0-csv:PATH | csv:PATH), pair_tol,
//   require_verified_pair. Set values are "v" or "lo:hi".
DetectorConfig parse_config_text(const std::string& text);

// Reads the file and parses it; when raw_text is non-null the file contents
// are copied out for manifest embedding.
DetectorConfig load_config(const std::string& path, std::string* raw_text = nullptr);

// Built-in configurations (threshold presets included). Unknown name -> empty.
std::vector<std::string> preset_names();
std::optional<std::string> preset_text(const std::string& name);

// One observation per line; blank lines and '#' comments ignored. Throws
// ParseError citing the 1-based physical line number.
std::vector<double> read_observations(std::istream& in);

// Streaming variant: returns false at end of input, throws ParseError on a
// malformed line. `line_no` advances over physical lines.
bool next_observation(std::istream& in, double& x, std::int64_t& line_no);

// Stable numeric formatting for CSV/report output; NaN renders as "NA".
std::string fmt(double v);

// Appends a data row, creating the file with the magic + header when absent.
void append_csv_row(const std::string& path, const std::string& header,
                    const std::string& row);

// Writes `<out_path>.manifest.json` describing a replayable invocation.
void write_manifest(const std::string& out_path, const std::string& command,
                    const std::string& replay_json_text,
                    const std::vector<std::string>& outputs);

// Optimizer-pair tabulation CSV: columns set ("p"/"q"), parameter, value.
void write_pair_csv(const std::string& path, const OptimizerPair& pair);
OptimizerPair load_pair_csv(const std::string& path);

// Resolves the master seed: explicit flag, else SEQDET_SEED, else 1.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_value);

}  // namespace seqdet::cli
