#include "tables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "config_io.hpp"

namespace seqdet::cli {

namespace {

DetectorConfig config_from_preset(const std::string& name) {
  const auto text = preset_text(name);
  if (!text) throw ConfigError("unknown preset '" + name + "'");
  return parse_config_text(*text);
}

std::vector<ReferenceCell> arl_cells(std::initializer_list<ReferenceCell> cells) {
  return {cells};
}

}  // namespace

std::vector<TableColumn> table1_columns() {
  std::vector<TableColumn> cols;

  TableColumn m;
  m.label = "m_star(a=18.50)";
  m.preset = "table1-m-star";
  m.config = config_from_preset(m.preset);
  m.calib_mode = CalibMode::delay;
  m.calib_target = 20.0;
  m.calib_at = 0.0;
  m.cells = arl_cells({{CalibMode::long_arl, -0.5, 206.0, 6.0},
                       {CalibMode::long_arl, -0.6, 501.0, 15.0},
                       {CalibMode::long_arl, -0.7, 1324.0, 43.0},
                       {CalibMode::long_arl, -0.8, 4688.0, 148.0},
                       {CalibMode::long_arl, -0.9, 19217.0, 606.0},
                       {CalibMode::long_arl, -1.0, 83619.0, 2566.0}});
  cols.push_back(std::move(m));

  TableColumn c5;
  c5.label = "cusum(-0.5,a=2.92)";
  c5.preset = "table1-cusum-half";
  c5.config = config_from_preset(c5.preset);
  c5.calib_mode = CalibMode::delay;
  c5.calib_target = 20.0;
  c5.calib_at = 0.0;
  c5.cells = arl_cells({{CalibMode::long_arl, -0.5, 233.0, 7.0},
                        {CalibMode::long_arl, -0.6, 518.0, 15.0},
                        {CalibMode::long_arl, -0.7, 1227.0, 37.0},
                        {CalibMode::long_arl, -0.8, 3580.0, 113.0},
                        {CalibMode::long_arl, -0.9, 10613.0, 343.0},
                        {CalibMode::long_arl, -1.0, 31641.0, 1036.0}});
  cols.push_back(std::move(c5));

  TableColumn c1;
  c1.label = "cusum(-1.0,a=9.88)";
  c1.preset = "table1-cusum-one";
  c1.config = config_from_preset(c1.preset);
  c1.calib_mode = CalibMode::delay;
  c1.calib_target = 20.0;
  c1.calib_at = 0.0;
  c1.cells = arl_cells({{CalibMode::long_arl, -0.5, 125.0, 3.0},
                        {CalibMode::long_arl, -0.6, 297.0, 8.0},
                        {CalibMode::long_arl, -0.7, 938.0, 29.0},
                        {CalibMode::long_arl, -0.8, 4148.0, 129.0},
                        {CalibMode::long_arl, -0.9, 21617.0, 658.0},
                        {CalibMode::long_arl, -1.0, 118223.0, 3711.0}});
  cols.push_back(std::move(c1));

  return cols;
}

TableColumn table1_best_possible_column() {
  TableColumn best;
  best.label = "best_possible(recalibrated)";
  best.preset = "table1-cusum-half";  // template; theta and a re-tuned per row
  best.config = config_from_preset(best.preset);
  best.calib_mode = CalibMode::delay;
  best.calib_target = 20.0;
  best.calib_at = 0.0;
  best.cells = arl_cells({{CalibMode::long_arl, -0.5, 233.0, 7.0},
                          {CalibMode::long_arl, -0.6, 523.0, 15.0},
                          {CalibMode::long_arl, -0.7, 1384.0, 43.0},
                          {CalibMode::long_arl, -0.8, 5157.0, 165.0},
                          {CalibMode::long_arl, -0.9, 22942.0, 699.0},
                          {CalibMode::long_arl, -1.0, 118223.0, 3711.0}});
  return best;
}

std::vector<TableColumn> table2_columns() {
  std::vector<TableColumn> cols;

  TableColumn scaled;
  scaled.label = "t_hat_star_glr(a=22.50)";
  scaled.preset = "table2-scaled-glr";
  scaled.config = config_from_preset(scaled.preset);
  scaled.calib_mode = CalibMode::long_arl;
  scaled.calib_target = 600.0;
  scaled.calib_at = 1.0;
  scaled.cells = arl_cells({{CalibMode::long_arl, 1.0, 601.0, 18.0},
                            {CalibMode::long_arl, 0.9, 1448.0, 43.0},
                            {CalibMode::long_arl, 0.8, 3772.0, 116.0},
                            {CalibMode::delay, 2.0, 21.41, 0.10},
                            {CalibMode::delay, 2.2, 18.09, 0.07},
                            {CalibMode::delay, 2.5, 15.08, 0.05},
                            {CalibMode::delay, 2.7, 13.75, 0.04},
                            {CalibMode::delay, 3.0, 12.29, 0.04}});
  cols.push_back(std::move(scaled));

  TableColumn glr;
  glr.label = "tau_glr(a=5.02)";
  glr.preset = "table2-glr";
  glr.config = config_from_preset(glr.preset);
  glr.calib_mode = CalibMode::long_arl;
  glr.calib_target = 600.0;
  glr.calib_at = 1.0;
  glr.cells = arl_cells({{CalibMode::long_arl, 1.0, 606.0, 19.0},
                         {CalibMode::long_arl, 0.9, 1207.0, 36.0},
                         {CalibMode::long_arl, 0.8, 2749.0, 90.0},
                         {CalibMode::delay, 2.0, 21.92, 0.11},
                         {CalibMode::delay, 2.2, 18.18, 0.09},
                         {CalibMode::delay, 2.5, 14.76, 0.06},
                         {CalibMode::delay, 2.7, 13.22, 0.05},
                         {CalibMode::delay, 3.0, 11.62, 0.04}});
  cols.push_back(std::move(glr));

  return cols;
}

CellResult run_cell(const DetectorConfig& config, const ReferenceCell& cell,
                    std::int64_t reps, const SeedScheme& seeds, int threads) {
  CellResult r;
  r.cell = cell;
  r.a = config.a;
  if (cell.mode == CalibMode::long_arl) {
    const std::int64_t horizon = std::max<std::int64_t>(
        1'000'000, cell.reference_mean > 0.0
                       ? static_cast<std::int64_t>(std::llround(50.0 * cell.reference_mean))
                       : 0);
    r.est = estimate_long_arl(config, cell.param, reps, horizon, seeds, threads);
  } else {
    r.est = estimate_delay(config, cell.param, reps, seeds, 1'000'000, threads);
  }
  const double est_var = std::isnan(r.est.se) ? 0.0 : r.est.se * r.est.se;
  const double var = est_var + cell.reference_se * cell.reference_se;
  r.comparable = std::isfinite(r.est.mean) && r.est.censored == 0 && var > 0.0;
  r.z = r.comparable ? (r.est.mean - cell.reference_mean) / std::sqrt(var)
                     : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace seqdet::cli
