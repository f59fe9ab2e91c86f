#include "cdmacap/asymptotic_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace cdmacap {

namespace {

constexpr double kLog2E = 1.4426950408889634074;
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double ln_cosh(double u) {
  u = std::abs(u);
  return u + std::log1p(std::exp(-2.0 * u)) - kLn2;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// crossover window for the u-variable integrals: outside |u| <= kWindow the
// logistic / softplus factors are flat to e^{-2 kWindow} ~ 9e-14
constexpr double kWindow = 15.0;
// largest lam still safe for Gauss-Hermite: its error grows like
// exp(-pi sqrt(2 order) / sqrt(lam)) while the panel scheme degrades below
// lam ~ 0.3, where the gaussian gets too narrow for the fixed window
constexpr double kHermiteCutoff = 0.5;

struct CrossoverPanels {
  QuadratureRule left, right;
};

const CrossoverPanels& crossover_panels(int order) {
  static std::mutex mu;
  static std::unordered_map<int, CrossoverPanels> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end())
    it = cache
             .emplace(order, CrossoverPanels{gauss_legendre(order, -kWindow, 0.0),
                                             gauss_legendre(order, 0.0, kWindow)})
             .first;
  return it->second;
}

// panel average of f(u) * density of N(lam, lam), times the panel span
template <class F>
double panel_integral(const QuadratureRule& r, double lam, double sl, F&& f) {
  double acc = 0.0;
  for (int i = 0; i < r.order(); ++i) {
    const double u = r.nodes(i);
    const double z = (u - lam) / sl;
    acc += r.weights(i) * f(u) * std::exp(-0.5 * z * z);
  }
  return acc * kWindow * kInvSqrt2Pi / sl;
}

struct SnrAtoms {
  std::vector<double> snr;
  std::vector<double> w;
  double mean = 0.0;
};

SnrAtoms snr_atoms(double beta, double eta, const Distribution& gain, const Distribution& alloc,
                   SnrMode mode) {
  auto [gv, gw] = gain.atoms(64);
  auto [cv, cw] = alloc.atoms(64);
  const double ec2 = alloc.second_moment();
  if (!(ec2 > 0.0)) throw std::invalid_argument("snr_atoms: allocation second moment must be positive");
  SnrAtoms out;
  out.snr.reserve(gv.size() * cv.size());
  out.w.reserve(gv.size() * cv.size());
  for (size_t i = 0; i < gv.size(); ++i)
    for (size_t j = 0; j < cv.size(); ++j) {
      double s = mode == SnrMode::product
                     ? 2.0 * eta * (cv[j] * gv[i]) * (cv[j] * gv[i]) / ec2
                     : beta * eta * (gv[i] * gv[i] + cv[j] * cv[j]) / ec2;
      out.snr.push_back(s);
      out.w.push_back(gw[i] * cw[j]);
      out.mean += gw[i] * cw[j] * s;
    }
  return out;
}

}  // namespace

double gaussian_tanh_mean(double lam, int order) {
  if (!(lam >= 0.0)) throw std::invalid_argument("gaussian_tanh_mean: lam must be nonnegative");
  const double sl = std::sqrt(lam);
  if (lam <= kHermiteCutoff) {
    const QuadratureRule& gh = gauss_hermite(order);
    double acc = 0.0;
    for (int i = 0; i < gh.order(); ++i) acc += gh.weights(i) * std::tanh(sl * gh.nodes(i) + lam);
    return acc;
  }
  // tanh(u) = 1 - 2 / (1 + e^{2u}); left of -kWindow the logistic factor is 1
  // and integrates to the exact tail mass, right of kWindow it vanishes
  double logistic_mass = norm_cdf((-kWindow - lam) / sl);
  const CrossoverPanels& p = crossover_panels(order);
  for (const QuadratureRule* r : {&p.left, &p.right})
    logistic_mass += panel_integral(*r, lam, sl,
                                    [](double u) { return 1.0 / (1.0 + std::exp(2.0 * u)); });
  return 1.0 - 2.0 * logistic_mass;
}

double gaussian_lncosh_mean(double lam, int order) {
  if (!(lam >= 0.0)) throw std::invalid_argument("gaussian_lncosh_mean: lam must be nonnegative");
  const double sl = std::sqrt(lam);
  if (lam <= kHermiteCutoff) {
    const QuadratureRule& gh = gauss_hermite(order);
    double acc = 0.0;
    for (int i = 0; i < gh.order(); ++i) acc += gh.weights(i) * ln_cosh(sl * gh.nodes(i) + lam);
    return acc;
  }
  // ln cosh u = |u| - ln 2 + log1p(e^{-2|u|}); E|u| is closed form for
  // gaussian u and the softplus remainder lives inside the window
  const double mean_abs =
      lam * (1.0 - 2.0 * norm_cdf(-sl)) + 2.0 * sl * kInvSqrt2Pi * std::exp(-0.5 * lam);
  double soft = 0.0;
  const CrossoverPanels& p = crossover_panels(order);
  for (const QuadratureRule* r : {&p.left, &p.right})
    soft += panel_integral(*r, lam, sl, [](double u) {
      return std::log1p(std::exp(-2.0 * std::abs(u)));
    });
  return mean_abs - kLn2 + soft;
}

EtaBracket eta_transform(double eta, double rho2, double beta, int xi, bool rederived) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta_transform: eta must be positive");
  if (rho2 < 0.0) throw std::invalid_argument("eta_transform: rho2 must be nonnegative");
  if (!(beta > 0.0)) throw std::invalid_argument("eta_transform: beta must be positive");
  if (xi != 1 && xi != 2) throw std::invalid_argument("eta_transform: xi must be 1 or 2");
  const double f = rederived ? 2.0 : double(xi);
  const double sb = std::sqrt(beta);
  EtaBracket out;
  out.eta_l = eta / (1.0 + f * rho2 * eta * (1.0 + sb) * (1.0 + sb));
  out.eta_u = eta / (1.0 + f * rho2 * eta * (1.0 - sb) * (1.0 - sb));
  return out;
}

TanakaSolution tanaka_capacity(double beta, double eta, const std::string& selection,
                               int quad_order) {
  if (!(beta > 0.0) || !(eta > 0.0))
    throw std::invalid_argument("tanaka_capacity: beta and eta must be positive");
  if (selection != "min" && selection != "max")
    throw std::invalid_argument("tanaka_capacity: selection must be 'min' or 'max'");

  const double sigma2 = 1.0 / (2.0 * eta);

  auto lam_of = [&](double theta) { return 1.0 / (sigma2 + beta * (1.0 - theta)); };
  auto residual = [&](double theta) {
    return gaussian_tanh_mean(lam_of(theta), quad_order) - theta;
  };

  std::vector<double> roots = find_fixed_points(residual, 0.0, 1.0 - 1e-10);
  if (roots.empty()) throw std::runtime_error("tanaka_capacity: no self-consistent root found");

  TanakaSolution out;
  out.replica_validity_flag = beta > 1.49;
  double best = selection == "min" ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity();
  for (double theta : roots) {
    const double lam = lam_of(theta);
    const double q = lam * (1.0 + theta) / 2.0 - gaussian_lncosh_mean(lam, quad_order);
    const double cap = (1.0 / (2.0 * beta)) * std::log2(1.0 + 2.0 * eta * beta * (1.0 - theta)) +
                       q * kLog2E;
    out.all_theta.push_back(theta);
    out.all_bits.push_back(cap);
    const bool take = selection == "min" ? cap < best : cap > best;
    if (take) {
      best = cap;
      out.bits_per_user = cap;
      out.theta = theta;
      out.lambda = lam;
      out.residual = residual(theta);
    }
  }
  return out;
}

BoundResult guo_verdu_capacity(double beta, double eta, const Distribution& gain,
                               const Distribution& alloc, SnrMode mode, int quad_order) {
  if (!(beta > 0.0) || !(eta > 0.0))
    throw std::invalid_argument("guo_verdu_capacity: beta and eta must be positive");
  const SnrAtoms atoms = snr_atoms(beta, eta, gain, alloc, mode);

  // E_z[tanh(u - z sqrt(u))] = E_z[tanh(u + z sqrt(u))] by z-symmetry, so the
  // shared kernel applies with lam = u
  auto mse_total = [&](double psi) {
    double tot = 0.0;
    for (size_t k = 0; k < atoms.snr.size(); ++k) {
      const double u = std::max(psi * atoms.snr[k], 0.0);
      tot += atoms.w[k] * atoms.snr[k] * (1.0 - gaussian_tanh_mean(u, quad_order));
    }
    return tot;
  };
  auto residual = [&](double psi) { return 1.0 / psi - 1.0 - beta * mse_total(psi); };

  std::vector<double> roots = find_fixed_points(residual, 1e-6, 1.0, 512, 1e-8);
  if (roots.empty()) roots = find_fixed_points(residual, 1e-6, 2.0, 512, 1e-8);
  if (roots.empty()) throw std::runtime_error("guo_verdu_capacity: no fixed point for the mse parameter");

  double best = std::numeric_limits<double>::infinity();
  double best_psi = roots.front();
  for (double psi : roots) {
    double zeta = 0.0;
    for (size_t k = 0; k < atoms.snr.size(); ++k) {
      const double u = std::max(psi * atoms.snr[k], 0.0);
      zeta -= atoms.w[k] * gaussian_lncosh_mean(u, quad_order) * kLog2E;
    }
    zeta *= beta;
    zeta += beta * psi * atoms.mean * kLog2E;
    zeta += 0.5 * ((psi - 1.0) * kLog2E - std::log2(psi));
    const double cap = zeta / beta;  // per-chip spectral efficiency back to bits per user
    if (cap < best) {
      best = cap;
      best_psi = psi;
    }
  }

  BoundResult out;
  out.bound_kind = "guo_verdu";
  out.bits_per_user = best;
  out.psi_star = best_psi;
  out.diagnostics["roots"] = double(roots.size());
  out.diagnostics["snr_mean"] = atoms.mean;
  out.diagnostics["snr_atoms"] = double(atoms.snr.size());
  out.diagnostics["fp_residual"] = std::abs(residual(best_psi));
  return out;
}

BoundResult varadhan_lower(double beta, double eta, const Alphabet& input,
                           const Distribution& gain, const Distribution& alloc) {
  if (!(beta > 0.0) || !(eta > 0.0))
    throw std::invalid_argument("varadhan_lower: beta and eta must be positive");
  input.check_valid();
  if (!input.is_real(1e-15)) throw std::invalid_argument("varadhan_lower: real input alphabets only");

  const DifferencePmf diff = difference_pmf(input);
  auto [gv, gw] = gain.atoms(48);
  auto [cv, cw] = alloc.atoms(48);

  // atoms of T = (X~ C G)^2; the signature symbol has unit magnitude here
  std::vector<double> tv, tw;
  for (int i = 0; i < diff.size(); ++i) {
    const double x = diff.values[static_cast<size_t>(i)].real();
    for (size_t j = 0; j < cv.size(); ++j)
      for (size_t k = 0; k < gv.size(); ++k) {
        tv.push_back(x * x * cv[j] * cv[j] * gv[k] * gv[k]);
        tw.push_back(diff.pmf(i) * cw[j] * gw[k]);
      }
  }
  // collapse duplicate atom values so the rate function sees clean masses
  std::vector<int> order(tv.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return tv[static_cast<size_t>(a)] < tv[static_cast<size_t>(b)]; });
  std::vector<double> cvv, cww;
  const double span = tv[static_cast<size_t>(order.back())] - tv[static_cast<size_t>(order.front())];
  const double merge_tol = 1e-12 * (1.0 + span);
  for (int pos : order) {
    if (!cvv.empty() && tv[static_cast<size_t>(pos)] - cvv.back() <= merge_tol)
      cww.back() += tw[static_cast<size_t>(pos)];
    else {
      cvv.push_back(tv[static_cast<size_t>(pos)]);
      cww.push_back(tw[static_cast<size_t>(pos)]);
    }
  }
  RateFunction rate(cvv, cww);

  const double norm = input.variance() * alloc.second_moment();  // unit-power signatures
  if (!(norm > 0.0)) throw std::invalid_argument("varadhan_lower: input variance must be positive");

  auto inner = [&](double gamma, double* theta_at = nullptr) {
    auto f_minus_rate = [&](double theta) {
      const double arg = 1.0 + 2.0 * eta * gamma * beta * theta / (norm * (1.0 + gamma));
      return -(1.0 / (2.0 * beta)) * std::log(arg) - rate.rate(theta);
    };
    ScalarMax sm = maximize_scalar(f_minus_rate, rate.t_min(), rate.mean(), 1e-10, 64);
    if (theta_at) *theta_at = sm.argmax;
    return sm.value;
  };
  auto outer = [&](double gamma) {
    const double pre = -(1.0 / (2.0 * beta)) * (gamma * kLog2E - std::log2(1.0 + gamma));
    return pre - kLog2E * inner(gamma);
  };

  ScalarMax sm = maximize_scalar(outer, 1e-4, 100.0, 1e-8, 64);
  BoundResult out;
  out.bound_kind = "varadhan_lower";
  if (sm.value <= 0.0) {
    out.bits_per_user = 0.0;  // gamma = 0 attains exactly 0
    out.gamma_star = 0.0;
    out.theta_star = rate.mean();
  } else {
    out.bits_per_user = sm.value;
    out.gamma_star = sm.argmax;
    double theta = rate.mean();
    inner(sm.argmax, &theta);
    out.theta_star = theta;
  }
  out.diagnostics["t_atoms"] = double(cvv.size());
  out.diagnostics["t_mean"] = rate.mean();
  return out;
}

BoundResult closed_form_upper(double beta, double eta, const Alphabet& input,
                              const Alphabet& signature, const Distribution& gain,
                              const Distribution& alloc) {
  if (!(beta > 0.0) || !(eta > 0.0))
    throw std::invalid_argument("closed_form_upper: beta and eta must be positive");
  input.check_valid();
  signature.check_valid();
  const double ec2 = alloc.second_moment();
  if (!(ec2 > 0.0)) throw std::invalid_argument("closed_form_upper: allocation power must be positive");
  const double var = signature.second_moment() * ec2 * gain.second_moment() * input.variance();
  const double sigma2 = eta_to_sigma2(eta, input, signature, ec2);
  const double gauss = (1.0 / (2.0 * beta)) * std::log2(1.0 + beta * var / sigma2);
  BoundResult out;
  out.bound_kind = "closed_form_upper";
  out.bits_per_user = std::min(std::log2(double(input.size())), gauss);
  out.diagnostics["gaussian_term"] = gauss;
  out.diagnostics["alphabet_cap"] = std::log2(double(input.size()));
  return out;
}

std::pair<BoundResult, BoundResult> imperfect_bracket(
    AsymptoticEngine engine, double beta, double eta, double rho2, int xi, const Alphabet& input,
    const Alphabet& signature, const Distribution& gain, const Distribution& alloc, SnrMode mode,
    bool rederived) {
  const EtaBracket br = eta_transform(eta, rho2, beta, xi, rederived);
  auto eval_lower = [&](double e) -> BoundResult {
    switch (engine) {
      case AsymptoticEngine::tanaka: {
        TanakaSolution t = tanaka_capacity(beta, e);
        BoundResult r;
        r.bound_kind = "tanaka";
        r.bits_per_user = t.bits_per_user;
        r.theta_star = t.theta;
        return r;
      }
      case AsymptoticEngine::guo_verdu:
        return guo_verdu_capacity(beta, e, gain, alloc, mode);
      case AsymptoticEngine::varadhan_closed_form:
        return varadhan_lower(beta, e, input, gain, alloc);
    }
    throw std::logic_error("imperfect_bracket: unknown engine");
  };
  BoundResult lower = eval_lower(br.eta_l);
  BoundResult upper = engine == AsymptoticEngine::varadhan_closed_form
                          ? closed_form_upper(beta, br.eta_u, input, signature, gain, alloc)
                          : eval_lower(br.eta_u);
  if (engine != AsymptoticEngine::varadhan_closed_form) {
    lower.bound_kind += "_lower";
    upper.bound_kind += "_upper";
  }
  if (lower.bits_per_user > upper.bits_per_user + 1e-12)
    throw std::runtime_error("imperfect_bracket: lower bound exceeded upper bound");
  return {lower, upper};
}

}  // namespace cdmacap
