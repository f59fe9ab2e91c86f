#pragma once
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cdmacap/rng.hpp"

namespace cdmacap {

using cd = std::complex<double>;

// Finite symbol set with a pmf. Used for both the input alphabet and the
// signature alphabet; symbols are stored as complex and are plain reals when
// the imaginary parts are zero.
struct Alphabet {
  std::vector<cd> symbols;
  Eigen::VectorXd pmf;

  int size() const { return static_cast<int>(symbols.size()); }
  cd mean() const;
  double second_moment() const;     // E|S|^2
  double second_moment_re() const;  // E[Re(S)^2]
  double variance() const;          // E|S|^2 - |E S|^2
  bool zero_mean(double tol = 1e-12) const;
  bool is_symmetric(double tol = 1e-12) const;  // law of -S equals law of S
  bool is_binary_pm1() const;                   // {+1,-1} with uniform pmf
  bool is_real(double tol = 0.0) const;
  void check_valid() const;  // throws on invalid pmf or duplicate symbols

  static Alphabet binary();  // {+1,-1}, uniform
  static Alphabet real_symbols(std::vector<double> values, std::vector<double> probs = {});
  static Alphabet complex_symbols(std::vector<cd> values, std::vector<double> probs = {});
  // {(+1+i), (+1-i), (-1+i), (-1-i)} / sqrt(2), uniform
  static Alphabet quaternary();
};

// Law of the difference of two i.i.d. input symbols.
struct DifferencePmf {
  std::vector<cd> values;
  Eigen::VectorXd pmf;

  int size() const { return static_cast<int>(values.size()); }
  bool symmetric(double tol = 1e-12) const;
  double mass_at_zero() const;
  bool is_real(double tol = 0.0) const;
};

DifferencePmf difference_pmf(const Alphabet& input);

// Scalar probability law with exact moments and a deterministic sampler.
struct Distribution {
  enum class Kind { point_masses, uniform, gaussian, half_gaussian };

  Kind kind = Kind::point_masses;
  std::vector<double> values{1.0};   // point_masses
  Eigen::VectorXd pmf = Eigen::VectorXd::Ones(1);
  double lo = 0.0, hi = 0.0;         // uniform
  double mu = 0.0, sigma2 = 0.0;     // gaussian; half_gaussian uses sigma2 only

  double mean() const;
  double variance() const;
  double second_moment() const;
  double sample(Rng& rng) const;
  bool is_point_mass() const;
  bool is_point_mass_at(double v, double tol = 1e-12) const;
  std::string describe() const;

  // Finite atom view (values, weights): exact for point masses, a quadrature
  // discretization matching the law's moments otherwise.
  std::pair<std::vector<double>, std::vector<double>> atoms(int quad_order = 64) const;

  static Distribution point(double v);
  static Distribution point_masses(std::vector<double> values, std::vector<double> probs);
  static Distribution uniform_interval(double lo, double hi);
  static Distribution gaussian(double mu, double sigma2);
  static Distribution half_gaussian(double sigma2);
};

inline double eta_db_to_linear(double eta_db) { return std::pow(10.0, eta_db / 10.0); }

// Noise variance from the normalized SNR definition:
// sigma^2 = sigma_p^2 * (sigma_pi^2 + mu_pi^2) * (sigma_c^2 + mu_c^2) / (2 eta).
// Throws when the input alphabet has zero variance.
double eta_to_sigma2(double eta_linear, const Alphabet& input, const Alphabet& signature,
                     double alloc_second_moment);
double sigma2_to_eta(double sigma2, const Alphabet& input, const Alphabet& signature,
                     double alloc_second_moment);

// rho^2 = E[Re(G)^2] / 10^(cer_db / 10); exact round-trip with rho2_to_cer.
double cer_to_rho2(double cer_db, const Distribution& gain);
double rho2_to_cer(double rho2, const Distribution& gain);

}  // namespace cdmacap
