#pragma once
#include <string>

#include <Eigen/Dense>

#include "cdmacap/model.hpp"

namespace cdmacap {

// How the allocation diagonal C is produced from a gain realization.
// budget is the total mean-square amplitude sum(C_i^2); budget < 0 means
// "use n", which keeps the mean-square allocation at 1 so eta retains its
// meaning under every policy.
struct PolicySpec {
  enum class Kind { none, inversion, inversion_squared, random, waterfill };

  Kind kind = Kind::none;
  Distribution law = Distribution::gaussian(0.0, 1.0);  // random kind only
  double budget = -1.0;
  bool normalize = true;

  std::string name() const;
  bool deterministic() const { return kind != Kind::random; }
  // the law of C_1 seen by the asymptotic engines: delta_1 for the
  // deterministic "none" policy, the configured law for "random"
  Distribution marginal_law() const;
};

PolicySpec parse_policy_kind(const std::string& kind);

// C diagonal from gains; throws on zero gains under inversion kinds.
Eigen::VectorXd apply_policy(const PolicySpec& spec, const Eigen::VectorXd& gains, double sigma2,
                             Rng& rng);

// Classical water-filling: P_i = max(0, nu - sigma2/G_i^2) with nu chosen so
// sum(P_i) = budget (bisection then an exact active-set polish).
Eigen::VectorXd water_fill(const Eigen::VectorXd& gains, double sigma2, double budget);

}  // namespace cdmacap
