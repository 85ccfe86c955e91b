#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqdet/simlab.hpp"

namespace seqdet::cli {

// One cell of a bundled reference table: a Monte Carlo estimate published for
// this procedure at this sampling parameter, with its standard error.
struct ReferenceCell {
  CalibMode mode = CalibMode::long_arl;  // long_arl: param samples the pre-change
  double param = 0.0;                    // family; delay: the post-change one
  double reference_mean = 0.0;
  double reference_se = 0.0;
};

struct TableColumn {
  std::string label;
  std::string preset;  // config preset this column is built from
  DetectorConfig config;
  CalibMode calib_mode = CalibMode::delay;  // how the threshold was tuned
  double calib_target = 0.0;
  double calib_at = 0.0;
  std::vector<ReferenceCell> cells;
};

// Normal-mean comparison: windowed rule vs two pinned recursions, thresholds
// tuned to detection delay 20 at lambda = 0.
std::vector<TableColumn> table1_columns();

// The reference envelope column (per-row recalibrated recursion). The runner
// must re-tune `config.theta`/`config.a` per cell.
TableColumn table1_best_possible_column();

// Exponential-rate comparison: scaled GLR vs nominal GLR, thresholds tuned to
// long ARL 600 at theta = 1.
std::vector<TableColumn> table2_columns();

struct CellResult {
  ReferenceCell cell;
  ArlEstimate est;
  double a = 0.0;           // threshold actually used
  double z = 0.0;           // (est - ref) / hypot(est_se, ref_se)
  bool comparable = false;  // uncensored, finite, with a usable combined SE
};

CellResult run_cell(const DetectorConfig& config, const ReferenceCell& cell,
                    std::int64_t reps, const SeedScheme& seeds, int threads = 0);

}  // namespace seqdet::cli
