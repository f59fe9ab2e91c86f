#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cdmacap/numerics.hpp"

using namespace cdmacap;

namespace {
constexpr double kPi = 3.14159265358979323846;

double normal_moment(int j) {  // E[Z^j]
  if (j % 2) return 0.0;
  double m = 1.0;
  for (int k = j - 1; k > 1; k -= 2) m *= k;
  return m;
}
}  // namespace

TEST_CASE("gauss-hermite basics") {
  const QuadratureRule& r10 = gauss_hermite(10);
  double one = 0.0, z2 = 0.0;
  for (int i = 0; i < r10.order(); ++i) {
    one += r10.weights(i);
    z2 += r10.weights(i) * r10.nodes(i) * r10.nodes(i);
  }
  CHECK(one == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(z2 == doctest::Approx(1.0).epsilon(1e-13));

  const QuadratureRule& r40 = gauss_hermite(40);
  double ch = 0.0;
  for (int i = 0; i < r40.order(); ++i) ch += r40.weights(i) * std::cosh(r40.nodes(i));
  CHECK(std::abs(ch - std::exp(0.5)) < 1e-10);

  CHECK_THROWS(gauss_hermite(201));
  CHECK_THROWS(gauss_hermite(0));
}

TEST_CASE("gauss-hermite integrates monomials up to the exactness degree") {
  // degrees past ~20 probe the relative accuracy of the near-zero tail
  // weights, which nothing downstream depends on; cap the checked degree
  // there. Mirrored nodes are summed pairwise so odd powers cancel exactly.
  for (int order : {1, 2, 3, 5, 8, 13, 21}) {
    const QuadratureRule& r = gauss_hermite(order);
    for (int j = 0; j < std::min(2 * order, 21); ++j) {
      double acc = 0.0;
      for (int i = 0; 2 * i < r.order(); ++i) {
        int m = r.order() - 1 - i;
        double t = r.weights(i) * std::pow(r.nodes(i), j);
        if (m != i) t += r.weights(m) * std::pow(r.nodes(m), j);
        acc += t;
      }
      CHECK(std::abs(acc - normal_moment(j)) < 1e-9 * std::max(1.0, normal_moment(j)));
    }
  }
}

TEST_CASE("gauss-legendre basics") {
  QuadratureRule r = gauss_legendre(16, 0.0, 1.0);
  double acc = 0.0;
  for (int i = 0; i < r.order(); ++i) acc += r.weights(i) * r.nodes(i) * r.nodes(i);
  CHECK(acc == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("maximize_scalar") {
  ScalarMax parab = maximize_scalar([](double x) { return -(x - 2.0) * (x - 2.0); }, 0.0, 5.0);
  CHECK(parab.argmax == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(std::abs(parab.value) < 1e-12);

  ScalarMax logistic = maximize_scalar([](double x) { return x * (1.0 - x); }, 0.0, 1.0);
  CHECK(logistic.argmax == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(logistic.value == doctest::Approx(0.25).epsilon(1e-12));

  CHECK_THROWS(maximize_scalar([](double) { return std::nan(""); }, 0.0, 1.0));
}

TEST_CASE("find_fixed_points") {
  std::vector<double> r1 = find_fixed_points([](double t) { return t - 0.5; }, 0.0, 1.0);
  REQUIRE(r1.size() == 1);
  CHECK(r1[0] == doctest::Approx(0.5).epsilon(1e-10));

  std::vector<double> r2 = find_fixed_points([](double t) { return t - std::tanh(5.0 * t); }, 0.0, 1.0);
  REQUIRE(r2.size() == 2);
  CHECK(r2[0] == 0.0);
  CHECK(r2[1] == doctest::Approx(0.9999092).epsilon(1e-6));

  CHECK(find_fixed_points([](double t) { return t * t + 1.0; }, 0.0, 1.0).empty());

  // every reported root has a small residual
  auto res = [](double t) { return std::sin(8.0 * t) - 0.3; };
  for (double root : find_fixed_points(res, 0.0, 3.0)) CHECK(std::abs(res(root)) <= 1e-9);
}

TEST_CASE("adaptive integration") {
  Integral a = adaptive_integrate([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
  CHECK(a.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(!a.depth_capped);

  auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); };
  Integral b = adaptive_integrate(phi, -8.0, 8.0, 1e-12);
  CHECK(std::abs(b.value - 1.0) < 1e-10);

  Integral c = adaptive_integrate([&](double x) { return -phi(x) * std::log2(phi(x)); }, -8.0, 8.0, 1e-11);
  CHECK(c.value == doctest::Approx(0.5 * std::log2(2.0 * kPi * std::exp(1.0))).epsilon(1e-9));
  CHECK(c.value == doctest::Approx(2.04709).epsilon(1e-5));
}

TEST_CASE("neumaier summation") {
  std::vector<double> tricky{1e16, 1.0, -1e16, 1.0};
  CHECK(neumaier_sum(tricky) == 2.0);
}

TEST_CASE("seeded_parallel_mean examples") {
  McMean c = seeded_parallel_mean([](int64_t, Rng&) { return 3.0; }, 1000, 7u);
  CHECK(c.mean == 3.0);
  CHECK(c.stderr_of_mean == 0.0);

  McMean alt = seeded_parallel_mean([](int64_t i, Rng&) { return i % 2 ? 1.0 : -1.0; }, 10000, 7u);
  CHECK(alt.mean == 0.0);

  McMean g = seeded_parallel_mean([](int64_t, Rng& rng) { return rng.gaussian(); }, 1000000, 42u);
  CHECK(std::abs(g.mean) < 5.0 * g.stderr_of_mean);
  CHECK(g.stderr_of_mean == doctest::Approx(1e-3).epsilon(0.05));
}

TEST_CASE("seeded_parallel_mean is bit-identical across worker counts") {
  auto fn = [](int64_t, Rng& rng) { return std::exp(rng.gaussian()) + rng.uniform(); };
  McMean w1 = seeded_parallel_mean(fn, 50001, 99u, 1);
  McMean w2 = seeded_parallel_mean(fn, 50001, 99u, 2);
  McMean w8 = seeded_parallel_mean(fn, 50001, 99u, 8);
  CHECK(w1.mean == w2.mean);
  CHECK(w1.mean == w8.mean);
  CHECK(w1.stderr_of_mean == w2.stderr_of_mean);
  CHECK(w1.stderr_of_mean == w8.stderr_of_mean);
}

TEST_CASE("rate function of the binary equal-power interference term") {
  // T = X~^2 for binary inputs: {0, 4} with probability 1/2 each
  RateFunction rf({0.0, 4.0}, {0.5, 0.5});
  CHECK(rf.cgf(0.0) == 0.0);
  CHECK(rf.mean() == doctest::Approx(2.0));
  CHECK(rf.rate(2.0) <= 1e-9);
  CHECK(rf.rate(4.0) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(rf.rate(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(std::isinf(rf.rate(4.5)));
  CHECK(std::isinf(rf.rate(-0.5)));

  // convexity on interior triples
  for (int i = 1; i < 99; ++i) {
    double a = 4.0 * double(i - 1) / 100.0, b = 4.0 * double(i) / 100.0,
           c = 4.0 * double(i + 1) / 100.0;
    CHECK(rf.rate(b) <= 0.5 * (rf.rate(a) + rf.rate(c)) + 1e-9);
  }
}

TEST_CASE("cgf convexity spot check") {
  RateFunction rf({0.25, 1.0, 4.0}, {0.25, 0.5, 0.25});
  for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    double mid = rf.cgf(x);
    CHECK(mid <= 0.5 * (rf.cgf(x - 0.25) + rf.cgf(x + 0.25)) + 1e-9);
  }
}
