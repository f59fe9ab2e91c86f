#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "cdmacap/rng.hpp"

namespace cdmacap {

// Quadrature rules are normalized so weights sum to 1: each rule integrates
// against a probability law (standard normal for Gauss-Hermite, uniform on
// [lo,hi] for Gauss-Legendre). That matches how every integral in the capacity
// formulas is written and avoids stray sqrt(2*pi) factors.
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  int order() const { return static_cast<int>(nodes.size()); }
};

// Probabilists' Gauss-Hermite rule (exact for polynomials of degree < 2*order
// against the standard normal measure). Orders above 200 are rejected; the
// Golub-Welsch eigenproblem is no longer reliable there.
const QuadratureRule& gauss_hermite(int order);

QuadratureRule gauss_legendre(int order, double lo, double hi);

struct ScalarMax {
  double argmax = 0.0;
  double value = 0.0;
};

// Coarse scan (log-spaced when lo > 0) followed by golden-section refinement
// on the best bracket. Throws if f evaluates to NaN.
ScalarMax maximize_scalar(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-10, int grid = 64);

// All roots of `residual` on [lo, hi]: uniform scan, bisection of every
// sign-change bracket down to 1e-12 width. An endpoint with |residual| <=
// accept is also returned (a fixed point pushed just past the interval by
// saturation shows up that way). Every returned root has |residual| <= accept.
std::vector<double> find_fixed_points(const std::function<double(double)>& residual,
                                      double lo, double hi, int grid = 512,
                                      double accept = 1e-9);

struct Integral {
  double value = 0.0;
  bool depth_capped = false;
};

// Adaptive Simpson with absolute tolerance; sets depth_capped instead of
// recursing past depth_cap.
Integral adaptive_integrate(const std::function<double(double)>& f, double lo, double hi,
                            double tol, int depth_cap = 60);

// Neumaier compensated sum in index order.
double neumaier_sum(const double* xs, int64_t count);
double neumaier_sum(const std::vector<double>& xs);

struct McMean {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

// Deterministic parallel Monte Carlo mean: sample i draws from an Rng seeded
// with mix_seed(master_seed, i); samples are stored and reduced in index order
// with compensated summation, so the result is bit-identical for any thread
// count. stderr is the sample standard deviation divided by sqrt(count).
McMean seeded_parallel_mean(const std::function<double(int64_t, Rng&)>& sample_fn,
                            int64_t count, uint64_t master_seed, int threads = 1);

// Cumulant generating function and Legendre transform of a finitely supported
// scalar variable T.
class RateFunction {
 public:
  RateFunction(std::vector<double> values, std::vector<double> weights);

  // ln E[e^{xT}], evaluated by logsumexp over the atoms
  double cgf(double x) const;

  // I(theta) = sup_x { theta*x - cgf(x) }; +inf outside the support hull,
  // exact -ln P(T = boundary) at the hull endpoints.
  double rate(double theta) const;

  double t_min() const { return tmin_; }
  double t_max() const { return tmax_; }
  double mean() const { return mean_; }

 private:
  std::vector<double> v_;
  std::vector<double> w_;
  double tmin_ = 0.0, tmax_ = 0.0, mean_ = 0.0;
  double p_min_ = 0.0, p_max_ = 0.0;
};

inline double legendre_transform(const RateFunction& rf, double theta) { return rf.rate(theta); }

}  // namespace cdmacap
