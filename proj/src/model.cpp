#include "cdmacap/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cdmacap/numerics.hpp"

namespace cdmacap {

namespace {
constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd uniform_or_given(size_t count, std::vector<double> probs, const char* what) {
  Eigen::VectorXd pmf(count);
  if (probs.empty()) {
    pmf.setConstant(1.0 / double(count));
  } else {
    if (probs.size() != count) throw std::invalid_argument(std::string(what) + ": pmf size mismatch");
    for (size_t i = 0; i < count; ++i) pmf(static_cast<int>(i)) = probs[i];
  }
  return pmf;
}
}  // namespace

cd Alphabet::mean() const {
  cd acc = 0.0;
  for (int i = 0; i < size(); ++i) acc += pmf(i) * symbols[i];
  return acc;
}

double Alphabet::second_moment() const {
  double acc = 0.0;
  for (int i = 0; i < size(); ++i) acc += pmf(i) * std::norm(symbols[i]);
  return acc;
}

double Alphabet::second_moment_re() const {
  double acc = 0.0;
  for (int i = 0; i < size(); ++i) acc += pmf(i) * symbols[i].real() * symbols[i].real();
  return acc;
}

double Alphabet::variance() const { return second_moment() - std::norm(mean()); }

bool Alphabet::zero_mean(double tol) const { return std::abs(mean()) <= tol; }

bool Alphabet::is_symmetric(double tol) const {
  for (int i = 0; i < size(); ++i) {
    double p_neg = 0.0;
    bool found = false;
    for (int j = 0; j < size(); ++j) {
      if (std::abs(symbols[j] + symbols[i]) <= tol) {
        p_neg = pmf(j);
        found = true;
        break;
      }
    }
    if (!found || std::abs(p_neg - pmf(i)) > tol) return false;
  }
  return true;
}

bool Alphabet::is_binary_pm1() const {
  if (size() != 2 || !is_real()) return false;
  double a = symbols[0].real(), b = symbols[1].real();
  return std::abs(std::abs(a) - 1.0) <= 1e-12 && std::abs(a + b) <= 1e-12 &&
         std::abs(pmf(0) - 0.5) <= 1e-12 && std::abs(pmf(1) - 0.5) <= 1e-12;
}

bool Alphabet::is_real(double tol) const {
  for (const cd& s : symbols)
    if (std::abs(s.imag()) > tol) return false;
  return true;
}

void Alphabet::check_valid() const {
  if (symbols.empty()) throw std::invalid_argument("alphabet: empty symbol set");
  if (static_cast<int>(symbols.size()) != pmf.size())
    throw std::invalid_argument("alphabet: pmf size mismatch");
  double total = 0.0;
  for (int i = 0; i < size(); ++i) {
    if (pmf(i) < 0.0) throw std::invalid_argument("alphabet: negative pmf entry");
    total += pmf(i);
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("alphabet: pmf must sum to 1");
  for (int i = 0; i < size(); ++i)
    for (int j = i + 1; j < size(); ++j)
      if (std::abs(symbols[i] - symbols[j]) <= 1e-15)
        throw std::invalid_argument("alphabet: duplicate symbols");
}

Alphabet Alphabet::binary() { return real_symbols({1.0, -1.0}); }

Alphabet Alphabet::real_symbols(std::vector<double> values, std::vector<double> probs) {
  Alphabet a;
  a.symbols.reserve(values.size());
  for (double v : values) a.symbols.emplace_back(v, 0.0);
  a.pmf = uniform_or_given(values.size(), std::move(probs), "alphabet");
  a.check_valid();
  return a;
}

Alphabet Alphabet::complex_symbols(std::vector<cd> values, std::vector<double> probs) {
  Alphabet a;
  a.symbols = std::move(values);
  a.pmf = uniform_or_given(a.symbols.size(), std::move(probs), "alphabet");
  a.check_valid();
  return a;
}

Alphabet Alphabet::quaternary() {
  const double r = 1.0 / std::sqrt(2.0);
  return complex_symbols({{r, r}, {r, -r}, {-r, r}, {-r, -r}});
}

bool DifferencePmf::symmetric(double tol) const {
  for (int i = 0; i < size(); ++i) {
    double p_neg = 0.0;
    bool found = false;
    for (int j = 0; j < size(); ++j) {
      if (std::abs(values[j] + values[i]) <= tol) {
        p_neg = pmf(j);
        found = true;
        break;
      }
    }
    if (!found || std::abs(p_neg - pmf(i)) > tol) return false;
  }
  return true;
}

double DifferencePmf::mass_at_zero() const {
  for (int i = 0; i < size(); ++i)
    if (std::abs(values[i]) <= 1e-12) return pmf(i);
  return 0.0;
}

bool DifferencePmf::is_real(double tol) const {
  for (const cd& v : values)
    if (std::abs(v.imag()) > tol) return false;
  return true;
}

DifferencePmf difference_pmf(const Alphabet& input) {
  input.check_valid();
  std::vector<std::pair<cd, double>> raw;
  raw.reserve(static_cast<size_t>(input.size()) * input.size());
  for (int i = 0; i < input.size(); ++i)
    for (int j = 0; j < input.size(); ++j)
      raw.emplace_back(input.symbols[i] - input.symbols[j], input.pmf(i) * input.pmf(j));

  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
    return a.first.imag() < b.first.imag();
  });
  std::vector<cd> values;
  std::vector<double> probs;
  for (const auto& [v, p] : raw) {
    if (!values.empty() && std::abs(v - values.back()) <= 1e-12) {
      probs.back() += p;
    } else {
      values.push_back(v);
      probs.push_back(p);
    }
  }
  DifferencePmf out;
  out.values = std::move(values);
  out.pmf = Eigen::Map<Eigen::VectorXd>(probs.data(), static_cast<int>(probs.size()));
  return out;
}

double Distribution::mean() const {
  switch (kind) {
    case Kind::point_masses: {
      double acc = 0.0;
      for (size_t i = 0; i < values.size(); ++i) acc += pmf(static_cast<int>(i)) * values[i];
      return acc;
    }
    case Kind::uniform:
      return 0.5 * (lo + hi);
    case Kind::gaussian:
      return mu;
    case Kind::half_gaussian:
      return std::sqrt(2.0 * sigma2 / kPi);
  }
  return 0.0;
}

double Distribution::variance() const {
  switch (kind) {
    case Kind::point_masses: {
      double m = mean(), acc = 0.0;
      for (size_t i = 0; i < values.size(); ++i)
        acc += pmf(static_cast<int>(i)) * (values[i] - m) * (values[i] - m);
      return acc;
    }
    case Kind::uniform:
      return (hi - lo) * (hi - lo) / 12.0;
    case Kind::gaussian:
      return sigma2;
    case Kind::half_gaussian:
      return sigma2 * (1.0 - 2.0 / kPi);
  }
  return 0.0;
}

double Distribution::second_moment() const {
  double m = mean();
  return variance() + m * m;
}

double Distribution::sample(Rng& rng) const {
  switch (kind) {
    case Kind::point_masses: {
      double u = rng.uniform(), acc = 0.0;
      for (size_t i = 0; i < values.size(); ++i) {
        acc += pmf(static_cast<int>(i));
        if (u < acc) return values[i];
      }
      return values.back();
    }
    case Kind::uniform:
      return rng.uniform(lo, hi);
    case Kind::gaussian:
      return mu + std::sqrt(sigma2) * rng.gaussian();
    case Kind::half_gaussian:
      return std::abs(std::sqrt(sigma2) * rng.gaussian());
  }
  return 0.0;
}

bool Distribution::is_point_mass() const {
  return kind == Kind::point_masses && values.size() == 1;
}

bool Distribution::is_point_mass_at(double v, double tol) const {
  return is_point_mass() && std::abs(values[0] - v) <= tol;
}

std::string Distribution::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::point_masses:
      if (is_point_mass()) {
        os << "point(" << values[0] << ")";
      } else {
        os << "point_masses(";
        for (size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
        os << ")";
      }
      break;
    case Kind::uniform:
      os << "uniform(" << lo << "," << hi << ")";
      break;
    case Kind::gaussian:
      os << "gaussian(" << mu << "," << sigma2 << ")";
      break;
    case Kind::half_gaussian:
      os << "half_gaussian(" << sigma2 << ")";
      break;
  }
  return os.str();
}

std::pair<std::vector<double>, std::vector<double>> Distribution::atoms(int quad_order) const {
  std::vector<double> vs, ws;
  switch (kind) {
    case Kind::point_masses:
      vs = values;
      ws.assign(pmf.data(), pmf.data() + pmf.size());
      break;
    case Kind::uniform: {
      QuadratureRule rule = gauss_legendre(quad_order, lo, hi);
      vs.assign(rule.nodes.data(), rule.nodes.data() + rule.nodes.size());
      ws.assign(rule.weights.data(), rule.weights.data() + rule.weights.size());
      break;
    }
    case Kind::gaussian: {
      const QuadratureRule& rule = gauss_hermite(quad_order);
      double s = std::sqrt(sigma2);
      for (int i = 0; i < rule.order(); ++i) {
        vs.push_back(mu + s * rule.nodes(i));
        ws.push_back(rule.weights(i));
      }
      break;
    }
    case Kind::half_gaussian: {
      // folding Gauss-Hermite nodes through |.| would put a kink at 0 in every
      // integrand; integrate the folded density on [0, 8.5 sigma] instead
      double s = std::sqrt(sigma2);
      const double span = 8.5 * s;
      QuadratureRule rule = gauss_legendre(quad_order, 0.0, span);
      double total = 0.0;
      for (int i = 0; i < rule.order(); ++i) {
        double x = rule.nodes(i);
        double p = std::sqrt(2.0 / (kPi * sigma2)) * std::exp(-x * x / (2.0 * sigma2));
        vs.push_back(x);
        ws.push_back(rule.weights(i) * span * p);
        total += ws.back();
      }
      for (double& w : ws) w /= total;  // absorb the ~1e-17 tail truncation
      break;
    }
  }
  return {std::move(vs), std::move(ws)};
}

Distribution Distribution::point(double v) {
  Distribution d;
  d.kind = Kind::point_masses;
  d.values = {v};
  d.pmf = Eigen::VectorXd::Ones(1);
  return d;
}

Distribution Distribution::point_masses(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size())
    throw std::invalid_argument("distribution: point mass values/pmf mismatch");
  double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("distribution: pmf must sum to 1");
  Distribution d;
  d.kind = Kind::point_masses;
  d.values = std::move(values);
  d.pmf = Eigen::Map<Eigen::VectorXd>(probs.data(), static_cast<int>(probs.size()));
  return d;
}

Distribution Distribution::uniform_interval(double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("distribution: uniform requires hi > lo");
  Distribution d;
  d.kind = Kind::uniform;
  d.lo = lo;
  d.hi = hi;
  return d;
}

Distribution Distribution::gaussian(double mu, double sigma2) {
  if (sigma2 < 0.0) throw std::invalid_argument("distribution: negative variance");
  Distribution d;
  d.kind = Kind::gaussian;
  d.mu = mu;
  d.sigma2 = sigma2;
  return d;
}

Distribution Distribution::half_gaussian(double sigma2) {
  if (sigma2 < 0.0) throw std::invalid_argument("distribution: negative variance");
  Distribution d;
  d.kind = Kind::half_gaussian;
  d.sigma2 = sigma2;
  return d;
}

double eta_to_sigma2(double eta_linear, const Alphabet& input, const Alphabet& signature,
                     double alloc_second_moment) {
  if (!(eta_linear > 0.0)) throw std::invalid_argument("eta_to_sigma2: eta must be positive");
  double sp2 = input.variance();
  double spi2 = signature.second_moment();
  if (sp2 <= 0.0 || spi2 <= 0.0 || alloc_second_moment <= 0.0)
    throw std::invalid_argument("eta_to_sigma2: zero-variance alphabet or zero allocation power");
  return sp2 * spi2 * alloc_second_moment / (2.0 * eta_linear);
}

double sigma2_to_eta(double sigma2, const Alphabet& input, const Alphabet& signature,
                     double alloc_second_moment) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2_to_eta: sigma2 must be positive");
  double sp2 = input.variance();
  double spi2 = signature.second_moment();
  if (sp2 <= 0.0 || spi2 <= 0.0 || alloc_second_moment <= 0.0)
    throw std::invalid_argument("sigma2_to_eta: zero-variance alphabet or zero allocation power");
  return sp2 * spi2 * alloc_second_moment / (2.0 * sigma2);
}

double cer_to_rho2(double cer_db, const Distribution& gain) {
  return gain.second_moment() / std::pow(10.0, cer_db / 10.0);
}

double rho2_to_cer(double rho2, const Distribution& gain) {
  if (!(rho2 > 0.0)) throw std::invalid_argument("rho2_to_cer: rho2 must be positive");
  return 10.0 * std::log10(gain.second_moment() / rho2);
}

}  // namespace cdmacap
