#include "cdmacap/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace cdmacap {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix, weights the
// squared first components of its eigenvectors (times the total mass, 1 here).
QuadratureRule golub_welsch(const Eigen::VectorXd& offdiag) {
  const int k = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i + 1 < k; ++i) {
    jacobi(i, i + 1) = offdiag(i);
    jacobi(i + 1, i) = offdiag(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  QuadratureRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights = es.eigenvectors().row(0).array().square();
  rule.weights /= rule.weights.sum();  // kill eigensolver round-off
  // zero diagonal makes the exact spectrum symmetric about 0; enforce that on
  // the computed rule so mirrored nodes carry identical weights and odd
  // moments cancel cleanly
  const int half = k / 2;
  for (int i = 0; i < half; ++i) {
    int j = k - 1 - i;
    double z = 0.5 * (rule.nodes(j) - rule.nodes(i));
    rule.nodes(i) = -z;
    rule.nodes(j) = z;
    double w = 0.5 * (rule.weights(i) + rule.weights(j));
    rule.weights(i) = w;
    rule.weights(j) = w;
  }
  if (k % 2) rule.nodes(half) = 0.0;
  return rule;
}

}  // namespace

const QuadratureRule& gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
  if (order > 200) throw std::invalid_argument("gauss_hermite: order > 200 is numerically unreliable");
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  // probabilists' Hermite recurrence: off-diagonal sqrt(k)
  Eigen::VectorXd off(order - 1 > 0 ? order - 1 : 0);
  for (int i = 0; i + 1 < order; ++i) off(i) = std::sqrt(double(i + 1));
  QuadratureRule rule = order == 1 ? QuadratureRule{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)}
                                   : golub_welsch(off);
  return cache.emplace(order, std::move(rule)).first->second;
}

QuadratureRule gauss_legendre(int order, double lo, double hi) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  if (order > 200) throw std::invalid_argument("gauss_legendre: order > 200 is numerically unreliable");
  QuadratureRule rule;
  if (order == 1) {
    rule.nodes = Eigen::VectorXd::Zero(1);
    rule.weights = Eigen::VectorXd::Ones(1);
  } else {
    // Legendre recurrence on [-1,1]: off-diagonal k / sqrt(4k^2 - 1)
    Eigen::VectorXd off(order - 1);
    for (int i = 0; i + 1 < order; ++i) {
      double k = double(i + 1);
      off(i) = k / std::sqrt(4.0 * k * k - 1.0);
    }
    rule = golub_welsch(off);
  }
  rule.nodes = (0.5 * (hi + lo) + 0.5 * (hi - lo) * rule.nodes.array()).matrix();
  return rule;
}

ScalarMax maximize_scalar(const std::function<double(double)>& f, double lo, double hi,
                          double tol, int grid) {
  if (!(hi > lo)) throw std::invalid_argument("maximize_scalar: requires hi > lo");
  if (grid < 3) grid = 3;
  auto eval = [&](double x) {
    double v = f(x);
    if (std::isnan(v)) throw std::runtime_error("maximize_scalar: f(x) evaluated to NaN");
    return v;
  };

  const bool log_spaced = lo > 0.0;
  std::vector<double> xs(grid);
  for (int i = 0; i < grid; ++i) {
    double t = double(i) / double(grid - 1);
    xs[i] = log_spaced ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  }
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  std::vector<double> vals(grid);
  for (int i = 0; i < grid; ++i) {
    vals[i] = eval(xs[i]);
    if (vals[i] > best_val) {
      best_val = vals[i];
      best = i;
    }
  }

  double a = xs[std::max(0, best - 1)];
  double b = xs[std::min(grid - 1, best + 1)];
  const double gr = 0.6180339887498948482;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = eval(c1), f2 = eval(c2);
  for (int it = 0; it < 300 && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 > f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = eval(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = eval(c2);
    }
  }
  double xm = 0.5 * (a + b);
  double fm = eval(xm);
  ScalarMax out{xs[best], best_val};
  if (f1 > out.value) out = {c1, f1};
  if (f2 > out.value) out = {c2, f2};
  if (fm > out.value) out = {xm, fm};
  return out;
}

std::vector<double> find_fixed_points(const std::function<double(double)>& residual,
                                      double lo, double hi, int grid, double accept) {
  if (!(hi > lo)) throw std::invalid_argument("find_fixed_points: requires hi > lo");
  if (grid < 2) grid = 2;
  std::vector<double> xs(grid), vals(grid);
  for (int i = 0; i < grid; ++i) {
    xs[i] = lo + (hi - lo) * double(i) / double(grid - 1);
    vals[i] = residual(xs[i]);
  }

  std::vector<double> roots;
  for (int i = 0; i + 1 < grid; ++i) {
    double a = xs[i], b = xs[i + 1], fa = vals[i], fb = vals[i + 1];
    if (fa == 0.0) {
      roots.push_back(a);
      continue;
    }
    if (fa * fb < 0.0) {
      while (b - a > 1e-12) {
        double m = 0.5 * (a + b);
        double fmv = residual(m);
        if (fmv == 0.0) {
          a = b = m;
          break;
        }
        if (fa * fmv < 0.0) {
          b = m;
        } else {
          a = m;
          fa = fmv;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
  }
  if (vals[grid - 1] == 0.0) roots.push_back(xs[grid - 1]);

  // a root pinned just outside [lo, hi] shows up as a near-zero endpoint
  // residual with no sign change; accept the endpoint in that case
  for (int e : {0, grid - 1})
    if (vals[e] != 0.0 && std::abs(vals[e]) <= accept) roots.push_back(xs[e]);

  if (roots.empty()) {
    int imin = 0;
    for (int i = 1; i < grid; ++i)
      if (std::abs(vals[i]) < std::abs(vals[imin])) imin = i;
    if (std::abs(vals[imin]) <= accept) roots.push_back(xs[imin]);
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (!out.empty() && std::abs(r - out.back()) <= 1e-10) continue;
    if (std::abs(residual(r)) > accept) continue;  // contract: never exceed accept
    out.push_back(r);
  }
  return out;
}

namespace {

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, int depth, int depth_cap,
                     bool& capped) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(fa, flm, fm, m - a);
  double right = simpson(fm, frm, fb, b - m);
  double delta = left + right - whole;
  if (depth >= depth_cap) {
    capped = true;
    return left + right + delta / 15.0;
  }
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, depth_cap, capped) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, depth_cap, capped);
}

}  // namespace

Integral adaptive_integrate(const std::function<double(double)>& f, double lo, double hi,
                            double tol, int depth_cap) {
  Integral out;
  if (lo == hi) return out;
  double sign = 1.0;
  if (hi < lo) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
  double whole = simpson(fa, fm, fb, hi - lo);
  bool capped = false;
  out.value = sign * adaptive_step(f, lo, hi, fa, fm, fb, whole, tol, 0, depth_cap, capped);
  out.depth_capped = capped;
  return out;
}

double neumaier_sum(const double* xs, int64_t count) {
  double sum = 0.0, comp = 0.0;
  for (int64_t i = 0; i < count; ++i) {
    double t = sum + xs[i];
    if (std::abs(sum) >= std::abs(xs[i]))
      comp += (sum - t) + xs[i];
    else
      comp += (xs[i] - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double neumaier_sum(const std::vector<double>& xs) {
  return neumaier_sum(xs.data(), static_cast<int64_t>(xs.size()));
}

McMean seeded_parallel_mean(const std::function<double(int64_t, Rng&)>& sample_fn, int64_t count,
                            uint64_t master_seed, int threads) {
  if (count < 1) throw std::invalid_argument("seeded_parallel_mean: count must be >= 1");
  std::vector<double> samples(static_cast<size_t>(count));
  auto run_range = [&](int worker, int stride) {
    for (int64_t i = worker; i < count; i += stride) {
      Rng rng(mix_seed(master_seed, static_cast<uint64_t>(i)));
      samples[static_cast<size_t>(i)] = sample_fn(i, rng);
    }
  };
  if (threads <= 1 || count == 1) {
    run_range(0, 1);
  } else {
    int workers = std::min<int64_t>(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_range, w, workers);
    for (auto& t : pool) t.join();
  }

  McMean out;
  out.mean = neumaier_sum(samples) / double(count);
  if (count > 1) {
    std::vector<double> sq(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
      double d = samples[i] - out.mean;
      sq[i] = d * d;
    }
    double var = neumaier_sum(sq) / double(count - 1);
    out.stderr_of_mean = std::sqrt(var / double(count));
  }
  return out;
}

RateFunction::RateFunction(std::vector<double> values, std::vector<double> weights)
    : v_(std::move(values)), w_(std::move(weights)) {
  if (v_.empty() || v_.size() != w_.size())
    throw std::invalid_argument("RateFunction: values/weights size mismatch");
  double total = 0.0;
  for (double w : w_) {
    if (w < 0.0) throw std::invalid_argument("RateFunction: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("RateFunction: weights must sum to 1");
  tmin_ = *std::min_element(v_.begin(), v_.end());
  tmax_ = *std::max_element(v_.begin(), v_.end());
  mean_ = 0.0;
  for (size_t i = 0; i < v_.size(); ++i) mean_ += v_[i] * w_[i];
  for (size_t i = 0; i < v_.size(); ++i) {
    if (std::abs(v_[i] - tmin_) <= 1e-12 * (1.0 + std::abs(tmin_))) p_min_ += w_[i];
    if (std::abs(v_[i] - tmax_) <= 1e-12 * (1.0 + std::abs(tmax_))) p_max_ += w_[i];
  }
}

double RateFunction::cgf(double x) const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : v_) m = std::max(m, x * v);
  double acc = 0.0;
  for (size_t i = 0; i < v_.size(); ++i) acc += w_[i] * std::exp(x * v_[i] - m);
  return m + std::log(acc);
}

double RateFunction::rate(double theta) const {
  const double span = std::max(1.0, tmax_ - tmin_);
  if (theta < tmin_ - 1e-12 * span || theta > tmax_ + 1e-12 * span)
    return std::numeric_limits<double>::infinity();
  // hull endpoints: the supremum is the exact boundary log-probability
  if (std::abs(theta - tmin_) <= 1e-12 * span) return -std::log(p_min_);
  if (std::abs(theta - tmax_) <= 1e-12 * span) return -std::log(p_max_);
  if (tmax_ == tmin_) return 0.0;

  auto obj = [&](double x) { return theta * x - cgf(x); };
  // obj is concave; expand a bracket until both wings have turned downhill
  double lo = -1.0, hi = 1.0;
  while (lo > -1e9 && obj(lo) > obj(lo * 0.5)) lo *= 2.0;
  while (hi < 1e9 && obj(hi) > obj(hi * 0.5)) hi *= 2.0;
  const double gr = 0.6180339887498948482;
  double a = lo, b = hi;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = obj(c1), f2 = obj(c2);
  for (int it = 0; it < 300 && (b - a) > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 > f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = obj(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = obj(c2);
    }
  }
  return std::max(0.0, obj(0.5 * (a + b)));
}

}  // namespace cdmacap
