#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cdmacap/scenario.hpp"

namespace cdmacap {

// One evaluated (scenario, bound, eta) cell.
struct SweepRow {
  std::string scenario_id;
  double eta_db = 0.0;
  std::string bound_kind;
  std::string policy;
  double bits_per_user = 0.0;
  double mc_stderr = 0.0;
  std::optional<double> gamma_star;
  std::optional<double> theta_star;
  std::optional<double> psi_star;
  uint64_t seed = 0;
  std::string status = "ok";  // or "error: ..."
};

// Evaluate every (scenario, bound kind, eta) combination. Work is distributed
// across `threads` workers but results are deterministic and independent of
// the thread count: each cell's seed is derived from
// mix_seed(mix_seed(master_seed, hash(scenario_id)), hash(bound_kind)) and is
// deliberately shared across the eta grid so per-seed curves stay smooth.
std::vector<SweepRow> run_sweep(const std::vector<Scenario>& scenarios, int threads = 1);

// Rows sorted by (scenario_id, bound_kind, eta_db), numbers at 17 significant
// digits, optional fields empty. Byte-identical across thread counts.
void write_csv(const std::vector<SweepRow>& rows, std::ostream& out);
std::string to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_csv(std::istream& in);  // round-trip for tests/plots

// Preconfigured scenario sets reproducing the survey figures; valid ids are
// fig1..fig6.
std::vector<Scenario> figure_recipe(const std::string& figure_id);
std::vector<std::string> figure_ids();

// Companion gnuplot script plotting bits/user against eta for every
// (scenario, bound) curve in the CSV.
std::string gnuplot_script(const std::string& csv_path, const std::vector<SweepRow>& rows,
                           const std::string& title);

}  // namespace cdmacap
