#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "cdmacap/asymptotic_bounds.hpp"
#include "cdmacap/numerics.hpp"
#include "cdmacap/rng.hpp"

using namespace cdmacap;

namespace {

double gauss_expect(const std::function<double(double)>& f, int order = 64) {
  const QuadratureRule& r = gauss_hermite(order);
  double acc = 0.0;
  for (int i = 0; i < r.order(); ++i) acc += r.weights(i) * f(r.nodes(i));
  return acc;
}

double stable_ln_cosh(double u) {
  u = std::abs(u);
  return u + std::log1p(std::exp(-2.0 * u)) - std::log(2.0);
}

// capacity of the single-user binary-input Gaussian channel, bits, with
// noise variance sigma2 matching the multiuser model at load beta -> 0
double binary_awgn_bits(double eta) {
  const double lam = 2.0 * eta;
  double e = gauss_expect([&](double z) { return stable_ln_cosh(lam + std::sqrt(lam) * z); });
  return (lam - e) * std::log2(std::exp(1.0));
}

}  // namespace

TEST_CASE("eta_transform: worked examples and collapse at rho2 = 0") {
  EtaBracket id = eta_transform(10.0, 0.0, 2.0, 1);
  CHECK(id.eta_l == 10.0);
  CHECK(id.eta_u == 10.0);

  // beta = 1 makes the low edge of the spectrum vanish, so eta_u is untouched
  EtaBracket b1 = eta_transform(10.0, 0.01, 1.0, 1);
  CHECK(b1.eta_u == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(b1.eta_l == doctest::Approx(10.0 / 1.4).epsilon(1e-12));

  Distribution g = Distribution::uniform_interval(0.5, 1.0);
  double rho2 = cer_to_rho2(20.0, g);
  CHECK(rho2 == doctest::Approx((7.0 / 12.0) / 100.0).epsilon(1e-12));
  EtaBracket br = eta_transform(10.0, rho2, 2.0, 1);
  CHECK(br.eta_l == doctest::Approx(7.4627).epsilon(1e-4));
  CHECK(br.eta_u == doctest::Approx(9.9009).epsilon(1e-4));

  CHECK_THROWS(eta_transform(10.0, 0.01, 2.0, 3));
  CHECK_THROWS(eta_transform(-1.0, 0.01, 2.0, 1));
}

TEST_CASE("eta_transform: ordering eta_l <= eta_u <= eta on random parameters") {
  Rng rng(20260814u);
  for (int t = 0; t < 1000; ++t) {
    double eta = std::pow(10.0, -2.0 + 5.0 * rng.uniform());
    double rho2 = rng.uniform();
    double beta = 0.01 + 4.0 * rng.uniform();
    int xi = rng.uniform() < 0.5 ? 1 : 2;
    EtaBracket b = eta_transform(eta, rho2, beta, xi);
    CHECK(b.eta_l <= b.eta_u);
    CHECK(b.eta_u <= eta * (1.0 + 1e-15));
    // rederived constant doubles the penalty for real chips
    if (xi == 1 && rho2 > 0.0) {
      EtaBracket r = eta_transform(eta, rho2, beta, xi, true);
      CHECK(r.eta_l < b.eta_l);
      CHECK(r.eta_u <= b.eta_u);
    }
  }
}

TEST_CASE("tanaka: residuals, limits, and the single-user oracle") {
  for (double beta : {0.5, 1.0, 2.0})
    for (double eta_db : {0.0, 6.0, 12.0, 20.0}) {
      TanakaSolution s = tanaka_capacity(beta, eta_db_to_linear(eta_db));
      CHECK(std::abs(s.residual) <= 1e-9);
      CHECK(s.bits_per_user >= 0.0);
      CHECK(s.bits_per_user <= 1.0 + 1e-9);
      // every reported root solves the self-consistency map
      const double sigma2 = 1.0 / (2.0 * eta_db_to_linear(eta_db));
      for (double th : s.all_theta) {
        double lam = 1.0 / (sigma2 + beta * (1.0 - th));
        CHECK(std::abs(th - gaussian_tanh_mean(lam)) <= 1e-9);
      }
    }

  // light loading reduces to the single-user binary-input channel
  for (double eta_db : {0.0, 5.0, 10.0}) {
    double eta = eta_db_to_linear(eta_db);
    TanakaSolution s = tanaka_capacity(0.1, eta);
    CHECK(s.bits_per_user == doctest::Approx(binary_awgn_bits(eta)).epsilon(1e-2));
  }

  // saturation at high snr even past the classical load threshold
  TanakaSolution hi = tanaka_capacity(2.0, eta_db_to_linear(30.0));
  CHECK(std::abs(hi.bits_per_user - 1.0) <= 1e-2);
  CHECK(hi.replica_validity_flag);

  TanakaSolution lo = tanaka_capacity(2.0, 1e-6);
  CHECK(lo.bits_per_user <= 1e-4);

  CHECK(tanaka_capacity(2.0, 10.0, "max").bits_per_user >=
        tanaka_capacity(2.0, 10.0, "min").bits_per_user - 1e-12);
  CHECK_THROWS(tanaka_capacity(2.0, 10.0, "median"));
  CHECK_THROWS(tanaka_capacity(-1.0, 10.0));
}

TEST_CASE("tanaka: nondecreasing in eta and below the gaussian ceiling") {
  Alphabet bin = Alphabet::binary();
  Distribution one = Distribution::point(1.0);
  double prev = -1.0;
  for (double eta_db = 0.0; eta_db <= 20.0 + 1e-9; eta_db += 2.0) {
    double eta = eta_db_to_linear(eta_db);
    TanakaSolution s = tanaka_capacity(2.0, eta);
    CHECK(s.bits_per_user >= prev - 1e-12);
    prev = s.bits_per_user;
    BoundResult cf = closed_form_upper(2.0, eta, bin, bin, one, one);
    CHECK(s.bits_per_user <= cf.bits_per_user + 1e-6);
  }
}

TEST_CASE("gaussian kernels: accurate at all scales, stable under order doubling") {
  // plain Gauss-Hermite in z loses the tanh crossover once sqrt(lam) exceeds
  // the node spacing; the kernels must stay stable straight through that zone
  for (double lam : {0.0, 0.5, 0.7, 2.0, 2.5, 8.0, 40.0, 400.0}) {
    CHECK(std::abs(gaussian_tanh_mean(lam, 64) - gaussian_tanh_mean(lam, 128)) < 1e-10);
    CHECK(std::abs(gaussian_lncosh_mean(lam, 64) - gaussian_lncosh_mean(lam, 128)) < 1e-10);
  }

  // brute-force oracle: adaptive integration of the z-density-weighted
  // integrand over the region carrying the gaussian mass
  for (double lam : {0.6, 1.0, 3.0, 8.0, 40.0, 120.0}) {
    double sl = std::sqrt(lam);
    auto ref = [&](auto f) {
      Integral r = adaptive_integrate(
          [&](double z) {
            return f(sl * z + lam) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
          },
          -9.5, 9.5, 1e-13);
      return r.value;
    };
    CHECK(std::abs(gaussian_tanh_mean(lam) - ref([](double u) { return std::tanh(u); })) < 5e-10);
    CHECK(std::abs(gaussian_lncosh_mean(lam) - ref([](double u) { return stable_ln_cosh(u); })) <
          5e-10);
  }

  CHECK(gaussian_tanh_mean(0.0) == 0.0);
  CHECK(gaussian_lncosh_mean(0.0) == 0.0);
  CHECK_THROWS(gaussian_tanh_mean(-1.0));

  // the composed capacity inherits that stability (the fixed-point location
  // feeds the integral error back through the self-consistency map, so it
  // gets a looser budget than the raw kernels)
  for (double eta_db : {4.0, 10.0, 13.0, 16.0}) {
    double eta = eta_db_to_linear(eta_db);
    double c64 = tanaka_capacity(2.0, eta, "min", 64).bits_per_user;
    double c128 = tanaka_capacity(2.0, eta, "min", 128).bits_per_user;
    CHECK(std::abs(c64 - c128) < 1e-8);
  }
}

TEST_CASE("guo_verdu: degenerate laws reproduce the replica capacity") {
  Distribution one = Distribution::point(1.0);
  for (double beta : {0.5, 1.0, 2.0})
    for (double eta_db = 0.0; eta_db <= 20.0 + 1e-9; eta_db += 2.0) {
      double eta = eta_db_to_linear(eta_db);
      BoundResult gv = guo_verdu_capacity(beta, eta, one, one);
      TanakaSolution tk = tanaka_capacity(beta, eta);
      CHECK(gv.bits_per_user == doctest::Approx(tk.bits_per_user).epsilon(1e-3));
      CHECK(gv.diagnostics.at("fp_residual") <= 1e-8);
      REQUIRE(gv.psi_star.has_value());
      CHECK(*gv.psi_star > 0.0);
      CHECK(*gv.psi_star <= 2.0);
    }
}

TEST_CASE("guo_verdu: fading spreads snr and costs capacity") {
  Distribution one = Distribution::point(1.0);
  Distribution g = Distribution::uniform_interval(0.5, 1.0);
  double eta = eta_db_to_linear(10.0);
  double ideal = guo_verdu_capacity(2.0, eta, one, one).bits_per_user;
  double faded = guo_verdu_capacity(2.0, eta, g, one).bits_per_user;
  CHECK(faded < ideal);
  CHECK(ideal <= 1.0 + 1e-9);

  // the additive snr variant stays a valid capacity in [0, 1]
  BoundResult add = guo_verdu_capacity(2.0, eta, g, one, SnrMode::additive);
  CHECK(add.bits_per_user > 0.0);
  CHECK(add.bits_per_user <= 1.0 + 1e-9);

  BoundResult zero = guo_verdu_capacity(2.0, 1e-6, one, one);
  CHECK(zero.bits_per_user <= 1e-4);

  double c64 = guo_verdu_capacity(2.0, eta, g, one, SnrMode::product, 64).bits_per_user;
  double c128 = guo_verdu_capacity(2.0, eta, g, one, SnrMode::product, 128).bits_per_user;
  CHECK(std::abs(c64 - c128) < 1e-8);
}

TEST_CASE("varadhan_lower: sits under both upper bounds") {
  Alphabet bin = Alphabet::binary();
  Distribution one = Distribution::point(1.0);
  for (double eta_db = 0.0; eta_db <= 20.0 + 1e-9; eta_db += 4.0) {
    double eta = eta_db_to_linear(eta_db);
    BoundResult v = varadhan_lower(2.0, eta, bin, one, one);
    TanakaSolution tk = tanaka_capacity(2.0, eta);
    BoundResult cf = closed_form_upper(2.0, eta, bin, bin, one, one);
    CHECK(v.bits_per_user >= 0.0);
    CHECK(v.bits_per_user <= tk.bits_per_user + 1e-6);
    CHECK(v.bits_per_user <= cf.bits_per_user + 1e-12);
    REQUIRE(v.gamma_star.has_value());
    REQUIRE(v.theta_star.has_value());
  }

  // at vanishing snr the optimum collapses to gamma = 0, theta = E[T]
  BoundResult z = varadhan_lower(2.0, 1e-8, bin, one, one);
  CHECK(z.bits_per_user <= 1e-4);
  CHECK(*z.theta_star == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(z.diagnostics.at("t_mean") == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("closed_form_upper: alphabet cap and gaussian term") {
  Alphabet bin = Alphabet::binary();
  Distribution one = Distribution::point(1.0);
  BoundResult b2 = closed_form_upper(2.0, 10.0, bin, bin, one, one);
  CHECK(b2.bits_per_user == 1.0);  // gaussian term 1.3398 loses to the 1-bit cap
  CHECK(b2.diagnostics.at("gaussian_term") == doctest::Approx(0.25 * std::log2(41.0)).epsilon(1e-12));

  BoundResult b8 = closed_form_upper(8.0, 10.0, bin, bin, one, one);
  CHECK(b8.bits_per_user == doctest::Approx(std::log2(161.0) / 16.0).epsilon(1e-12));
  CHECK(b8.bits_per_user == doctest::Approx(0.4580).epsilon(1e-3));
}

TEST_CASE("imperfect_bracket: collapse, composition, and naming") {
  Alphabet bin = Alphabet::binary();
  Distribution one = Distribution::point(1.0);
  Distribution g = Distribution::uniform_interval(0.5, 1.0);

  auto [pl, pu] = imperfect_bracket(AsymptoticEngine::tanaka, 2.0, 10.0, 0.0, 1, bin, bin, one, one);
  double exact = tanaka_capacity(2.0, 10.0).bits_per_user;
  CHECK(pl.bits_per_user == exact);
  CHECK(pu.bits_per_user == exact);

  double rho2 = cer_to_rho2(20.0, g);
  auto [lo, hi] = imperfect_bracket(AsymptoticEngine::tanaka, 2.0, 10.0, rho2, 1, bin, bin, one, one);
  EtaBracket br = eta_transform(10.0, rho2, 2.0, 1);
  CHECK(lo.bound_kind == "tanaka_lower");
  CHECK(hi.bound_kind == "tanaka_upper");
  CHECK(lo.bits_per_user == tanaka_capacity(2.0, br.eta_l).bits_per_user);
  CHECK(hi.bits_per_user == tanaka_capacity(2.0, br.eta_u).bits_per_user);
  CHECK(lo.bits_per_user <= hi.bits_per_user);

  auto [gl, gu] = imperfect_bracket(AsymptoticEngine::guo_verdu, 2.0, 10.0, rho2, 1, bin, bin, g, one);
  CHECK(gl.bound_kind == "guo_verdu_lower");
  CHECK(gl.bits_per_user <= gu.bits_per_user);

  auto [vl, vu] =
      imperfect_bracket(AsymptoticEngine::varadhan_closed_form, 2.0, 10.0, rho2, 1, bin, bin, one, one);
  CHECK(vl.bound_kind == "varadhan_lower");
  CHECK(vu.bound_kind == "closed_form_upper");
  CHECK(vl.bits_per_user <= vu.bits_per_user);
}

TEST_CASE("random signature gram spectrum motivates the eta_transform constant") {
  // finite-size check that extreme eigenvalues of (1/m) A A^T approach
  // (1 -+ sqrt(beta))^2 for binary chips at beta = 2
  const int m = 300, n = 600;
  Rng rng(4242u);
  Eigen::MatrixXd a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform() < 0.5 ? -1.0 : 1.0;
  Eigen::MatrixXd w = a * a.transpose() / double(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  const double sb = std::sqrt(2.0);
  CHECK(hi == doctest::Approx((1.0 + sb) * (1.0 + sb)).epsilon(0.05));
  CHECK(lo == doctest::Approx((1.0 - sb) * (1.0 - sb)).epsilon(0.25));
}
