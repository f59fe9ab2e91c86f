#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdmacap/model.hpp"
#include "cdmacap/power_control.hpp"

namespace cdmacap {

enum class Field { real, complex };

struct McConfig {
  int samples = 0;  // 0: engine default (200 draws for lower_T1, 500 for upper_T2)
  uint64_t master_seed = 1;
};

// Full system description: finite (m, n) or asymptotic beta, alphabets, gain
// law, allocation policy, estimation error, SNR grid.
struct Scenario {
  std::string id = "scenario";
  int m = 0;
  int n = 0;
  double beta = 0.0;  // used when m, n are absent (asymptotic modes)
  Alphabet input = Alphabet::binary();
  Alphabet signature = Alphabet::binary();
  Distribution gain = Distribution::point(1.0);
  PolicySpec alloc;
  double rho2 = 0.0;
  std::optional<double> cer_db;  // when set, rho2 is derived from it
  std::vector<double> eta_db_grid;
  Field field = Field::real;
  McConfig mc;
  std::vector<std::string> bounds;  // default bound kinds (figure recipes fill this)
  std::string gv_snr_mode = "product";  // or "additive"

  bool finite_dims() const { return m > 0 && n > 0; }
  double loading() const { return finite_dims() ? double(n) / double(m) : beta; }

  // mean-square allocation amplitude entering the eta definition; 1 for
  // budget-normalized policies, the law's second moment for raw random draws
  double alloc_second_moment() const;

  double resolved_rho2() const;

  // aggregated invariant check; empty means valid
  std::vector<std::string> validation_errors() const;
  void check_valid() const;  // throws with the aggregated message
};

}  // namespace cdmacap
