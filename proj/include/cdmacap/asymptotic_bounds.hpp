#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cdmacap/finite_bounds.hpp"
#include "cdmacap/model.hpp"

namespace cdmacap {

// Effective-snr bracket for imperfect amplitude estimation. The estimation
// error acts as extra noise whose strength is set by the extreme eigenvalue
// of the large random signature Gram matrix:
//   eta_l = eta / (1 + f rho2 eta (1+sqrt(beta))^2)
//   eta_u = eta / (1 + f rho2 eta (1-sqrt(beta))^2)
// with f = xi (1 for real chips, 2 for complex). `rederived` swaps in f = 2
// for the real case, matching a direct variance calculation; the default
// keeps the published constant.
struct EtaBracket {
  double eta_l = 0.0;
  double eta_u = 0.0;
};
EtaBracket eta_transform(double eta, double rho2, double beta, int xi, bool rederived = false);

// Shared integral kernel of the large-system formulas below:
//   gaussian_tanh_mean(lam)   = E_z[ tanh(lam + sqrt(lam) z) ]
//   gaussian_lncosh_mean(lam) = E_z[ ln cosh(lam + sqrt(lam) z) ]
// for z ~ N(0,1) and lam >= 0. Gauss-Hermite in z resolves the tanh
// crossover only while sqrt(lam) is small (the kink near z = -sqrt(lam) has
// width 1/sqrt(lam) in z); for larger lam the expectation is taken in
// u = lam + sqrt(lam) z, where the crossover always has unit width: the
// saturated left tail reduces to an exact gaussian tail mass and two fixed
// Gauss-Legendre panels cover the rest. Absolute accuracy is ~1e-12 for
// every lam, so doubling `order` past 64 moves the result by far less
// than 1e-8.
double gaussian_tanh_mean(double lam, int order = 64);
double gaussian_lncosh_mean(double lam, int order = 64);

// Replica-symmetric capacity of the binary-input load-beta system,
// bits per user. Roots of the self-consistency map
//   theta = Integral tanh(sqrt(lambda) z + lambda) Dz,
//   lambda(theta) = 1 / (sigma2 + beta (1 - theta)),  sigma2 = 1/(2 eta)
// are found on [0, 1); each gives a candidate capacity and `selection`
// picks "min" (default, the thermodynamic branch) or "max".
struct TanakaSolution {
  double bits_per_user = 0.0;
  double theta = 0.0;
  double lambda = 0.0;
  double residual = 0.0;            // fixed-point residual of the chosen root
  std::vector<double> all_theta;    // every located root
  std::vector<double> all_bits;
  bool replica_validity_flag = false;  // beta beyond the documented safe range
};
TanakaSolution tanaka_capacity(double beta, double eta, const std::string& selection = "min",
                               int quad_order = 64);

// Same statistical-physics capacity expressed through a decoupled scalar
// channel, supporting per-user snr spread from fading and allocation.
// Modes for the single-user snr variable:
//   "product":  snr = 2 eta (c g)^2 / E[C^2]
//   "additive": snr = beta eta (g^2 + c^2) / E[C^2]
enum class SnrMode { product, additive };
BoundResult guo_verdu_capacity(double beta, double eta, const Distribution& gain,
                               const Distribution& alloc, SnrMode mode = SnrMode::product,
                               int quad_order = 64);

// Large-deviations lower bound: an outer search over the auxiliary snr gamma
// and an inner Legendre-type search over the mean interference level theta,
// with T = (X~ C G)^2 and rate function I from `RateFunction`.
BoundResult varadhan_lower(double beta, double eta, const Alphabet& input,
                           const Distribution& gain, const Distribution& alloc);

// Gaussian-channel ceiling min(log2 |I|, (1/2 beta) log2(1 + beta Var[A C G X]/sigma2))
// with Var the product of second moments (all cross means vanish by symmetry)
// and sigma2 tied to eta through the model's noise definition.
BoundResult closed_form_upper(double beta, double eta, const Alphabet& input,
                              const Alphabet& signature, const Distribution& gain,
                              const Distribution& alloc);

// Engine selector for the imperfect-estimation bracket.
enum class AsymptoticEngine { tanaka, guo_verdu, varadhan_closed_form };

// Evaluate the chosen engine at eta_l / eta_u and return (lower, upper).
// For varadhan_closed_form the lower bound uses the large-deviations engine
// and the upper bound the Gaussian ceiling. Throws if lower > upper.
std::pair<BoundResult, BoundResult> imperfect_bracket(
    AsymptoticEngine engine, double beta, double eta, double rho2, int xi, const Alphabet& input,
    const Alphabet& signature, const Distribution& gain, const Distribution& alloc,
    SnrMode mode = SnrMode::product, bool rederived = false);

}  // namespace cdmacap
