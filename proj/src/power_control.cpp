#include "cdmacap/power_control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdmacap {

std::string PolicySpec::name() const {
  switch (kind) {
    case Kind::none: return "none";
    case Kind::inversion: return "inversion";
    case Kind::inversion_squared: return "inversion_squared";
    case Kind::random: return "random";
    case Kind::waterfill: return "waterfill";
  }
  return "?";
}

Distribution PolicySpec::marginal_law() const {
  if (kind == Kind::random) return law;
  return Distribution::point(1.0);
}

PolicySpec parse_policy_kind(const std::string& kind) {
  PolicySpec spec;
  if (kind == "none") spec.kind = PolicySpec::Kind::none;
  else if (kind == "inversion") spec.kind = PolicySpec::Kind::inversion;
  else if (kind == "inversion_squared") spec.kind = PolicySpec::Kind::inversion_squared;
  else if (kind == "random") spec.kind = PolicySpec::Kind::random;
  else if (kind == "waterfill") spec.kind = PolicySpec::Kind::waterfill;
  else throw std::invalid_argument("unknown allocation kind: " + kind);
  return spec;
}

namespace {

Eigen::VectorXd normalize_to_budget(Eigen::VectorXd raw, double budget) {
  double ss = raw.squaredNorm();
  if (!(ss > 0.0)) throw std::invalid_argument("policy: zero-power allocation cannot be normalized");
  return raw * std::sqrt(budget / ss);
}

}  // namespace

Eigen::VectorXd apply_policy(const PolicySpec& spec, const Eigen::VectorXd& gains, double sigma2,
                             Rng& rng) {
  const int n = static_cast<int>(gains.size());
  const double budget = spec.budget < 0.0 ? double(n) : spec.budget;

  switch (spec.kind) {
    case PolicySpec::Kind::none:
      return Eigen::VectorXd::Ones(n);

    case PolicySpec::Kind::inversion:
    case PolicySpec::Kind::inversion_squared: {
      Eigen::VectorXd raw(n);
      for (int i = 0; i < n; ++i) {
        if (gains(i) == 0.0) throw std::invalid_argument("policy: inversion of a zero gain");
        double inv = 1.0 / gains(i);
        raw(i) = spec.kind == PolicySpec::Kind::inversion ? inv : inv * inv;
      }
      return spec.normalize ? normalize_to_budget(std::move(raw), budget) : raw;
    }

    case PolicySpec::Kind::random: {
      Eigen::VectorXd raw(n);
      for (int i = 0; i < n; ++i) raw(i) = spec.law.sample(rng);
      return spec.normalize ? normalize_to_budget(std::move(raw), budget) : raw;
    }

    case PolicySpec::Kind::waterfill: {
      Eigen::VectorXd powers = water_fill(gains, sigma2, budget);
      return powers.array().sqrt().matrix();
    }
  }
  return Eigen::VectorXd::Ones(n);
}

Eigen::VectorXd water_fill(const Eigen::VectorXd& gains, double sigma2, double budget) {
  const int n = static_cast<int>(gains.size());
  if (!(budget > 0.0)) throw std::invalid_argument("water_fill: budget must be positive");
  Eigen::VectorXd floors(n);
  for (int i = 0; i < n; ++i) {
    if (!(gains(i) > 0.0)) throw std::invalid_argument("water_fill: gains must be positive");
    floors(i) = sigma2 / (gains(i) * gains(i));
  }

  auto spent = [&](double nu) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::max(0.0, nu - floors(i));
    return s;
  };

  double lo = floors.minCoeff();
  double hi = floors.minCoeff() + budget;  // at most one active user at lo; all budget on it at hi
  while (spent(hi) < budget) hi += budget;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (spent(mid) < budget ? lo : hi) = mid;
  }

  // exact polish: with the active set fixed, nu has a closed form
  double nu = 0.5 * (lo + hi);
  double floor_sum = 0.0;
  int active = 0;
  for (int i = 0; i < n; ++i) {
    if (nu > floors(i)) {
      floor_sum += floors(i);
      ++active;
    }
  }
  if (active > 0) nu = (budget + floor_sum) / double(active);

  Eigen::VectorXd powers(n);
  for (int i = 0; i < n; ++i) powers(i) = std::max(0.0, nu - floors(i));
  return powers;
}

}  // namespace cdmacap
