#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "cdmacap/model.hpp"
#include "cdmacap/numerics.hpp"
#include "cdmacap/scenario.hpp"

namespace cdmacap {

// A bound value in bits per user plus optimizer and Monte Carlo diagnostics.
struct BoundResult {
  std::string bound_kind;
  double bits_per_user = 0.0;
  double mc_stderr = 0.0;
  std::optional<double> gamma_star;
  std::optional<double> theta_star;
  std::optional<double> psi_star;
  uint64_t seed = 0;
  std::map<std::string, double> diagnostics;
};

// Exact E_b[exp(-a |b^T d|^2)] over all signature vectors b in S^n weighted by
// the signature pmf. Brute-force oracle; |S|^n capped at 2^24.
double eb_exact(const std::vector<cd>& d, double a_coeff, const Alphabet& signature);

// Quadrature evaluation of the same expectation via Gaussian linearization:
// exp(-a t^2) = E_Z[exp(i sqrt(2a) t Z)], which factorizes the b-expectation
// into a product of per-user characteristic functions under a Gauss-Hermite
// rule (a 2-D tensor rule for complex-valued sums). When the integrand
// oscillates faster than the supplied rule can resolve, the order is escalated
// internally (up to 200) and past that the call falls back to eb_exact, so the
// advertised 1e-6 agreement with the oracle holds on the whole domain.
double eb_quadrature(const std::vector<cd>& d, double a_coeff, const Alphabet& signature,
                     const QuadratureRule& rule);

// Differential entropy in bits of a Gaussian mixture with the given component
// means, weights and common variance, integrated adaptively over
// [min mean - 8 sigma, max mean + 8 sigma].
double mixture_entropy_bits(const Eigen::VectorXd& means, const Eigen::VectorXd& weights,
                            double sigma2, double tol = 1e-11, bool* depth_capped = nullptr);

// Evaluation strategy for the lower bound's inner expectation (exposed for tests).
enum class T1Mode {
  automatic,             // symmetric fast path when applicable, else enumerate
  fast_symmetric,        // 3^n signed enumeration; binary signature, {0,+-w} differences
  enumerate_exact,       // per-difference-pattern eb_exact
  enumerate_quadrature,  // per-difference-pattern eb_quadrature
};

// Per-draw objective of the finite lower bound at a fixed gamma:
//   -m (gamma log2 e - log2(1+gamma)) - log2 E_X~[(E_b e^{-a |b^T diag(d) X~|^2})^m]
// with a = gamma / (2 (1+gamma) m sigma2) and d the received amplitudes C.*G.
double t1_draw_objective(const Eigen::VectorXd& received, const DifferencePmf& diff,
                         const Alphabet& signature, int m, double sigma2, double gamma,
                         T1Mode mode = T1Mode::automatic);

// Monte Carlo lower bound over (G, C) draws; per draw the objective above is
// maximized over gamma in [0, 100]. Requires rho2 = 0.
BoundResult lower_bound_T1(const Scenario& sc, double eta_db, uint64_t seed, int threads = 1);

// Upper bound from the chip-wise mixture entropy; Monte Carlo over
// (A^1, C, G) draws. Requires rho2 = 0 and a real field.
BoundResult upper_bound_T2(const Scenario& sc, double eta_db, uint64_t seed, int threads = 1);

}  // namespace cdmacap
