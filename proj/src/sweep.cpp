#include "cdmacap/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cdmacap/asymptotic_bounds.hpp"
#include "cdmacap/finite_bounds.hpp"
#include "cdmacap/rng.hpp"

namespace cdmacap {

namespace {

const std::set<std::string>& known_bound_kinds() {
  static const std::set<std::string> kinds = {
      "lower_T1",  "upper_T2",        "tanaka",          "tanaka_lower", "tanaka_upper",
      "guo_verdu", "guo_verdu_lower", "guo_verdu_upper", "varadhan",     "closed_form",
  };
  return kinds;
}

SnrMode snr_mode_of(const Scenario& sc) {
  return sc.gv_snr_mode == "additive" ? SnrMode::additive : SnrMode::product;
}

BoundResult evaluate_cell(const Scenario& sc, const std::string& kind, double eta_db,
                          uint64_t seed) {
  if (kind == "lower_T1") return lower_bound_T1(sc, eta_db, seed);
  if (kind == "upper_T2") return upper_bound_T2(sc, eta_db, seed);

  const double beta = sc.loading();
  const int xi = sc.field == Field::complex ? 2 : 1;
  const double rho2 = sc.resolved_rho2();
  // the fixed-point engines hardcode the +1/-1 system; gains and estimation
  // error are in scope (absorbed via eta and rho2), other alphabets are not
  if (kind.rfind("tanaka", 0) == 0 || kind.rfind("guo_verdu", 0) == 0) {
    if (sc.field != Field::real || !sc.input.is_binary_pm1() || !sc.signature.is_binary_pm1())
      throw std::invalid_argument(kind + ": requires real binary (+1/-1) input and signature alphabets");
  }
  double eta = eta_db_to_linear(eta_db);
  if (kind.size() > 6 && kind.substr(kind.size() - 6) == "_lower" && rho2 > 0.0)
    eta = eta_transform(eta, rho2, beta, xi).eta_l;
  if (kind.size() > 6 && kind.substr(kind.size() - 6) == "_upper" && rho2 > 0.0)
    eta = eta_transform(eta, rho2, beta, xi).eta_u;

  if (kind.rfind("tanaka", 0) == 0) {
    TanakaSolution t = tanaka_capacity(beta, eta);
    BoundResult r;
    r.bound_kind = kind;
    r.bits_per_user = t.bits_per_user;
    r.theta_star = t.theta;
    r.diagnostics["residual"] = t.residual;
    r.diagnostics["replica_validity_flag"] = t.replica_validity_flag ? 1.0 : 0.0;
    return r;
  }
  if (kind.rfind("guo_verdu", 0) == 0)
    return guo_verdu_capacity(beta, eta, sc.gain, sc.alloc.marginal_law(), snr_mode_of(sc));
  if (kind == "varadhan")
    return varadhan_lower(beta, eta, sc.input, sc.gain, sc.alloc.marginal_law());
  if (kind == "closed_form")
    return closed_form_upper(beta, eta, sc.input, sc.signature, sc.gain, sc.alloc.marginal_law());
  throw std::invalid_argument("unknown bound kind '" + kind + "'");
}

}  // namespace

std::vector<SweepRow> run_sweep(const std::vector<Scenario>& scenarios, int threads) {
  struct Cell {
    const Scenario* sc;
    std::string kind;
    double eta_db;
    uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const Scenario& sc : scenarios) {
    sc.check_valid();
    if (sc.bounds.empty())
      throw std::invalid_argument("scenario '" + sc.id + "' lists no bound kinds");
    if (sc.eta_db_grid.empty())
      throw std::invalid_argument("scenario '" + sc.id + "' has an empty eta grid");
    for (const std::string& kind : sc.bounds) {
      if (!known_bound_kinds().count(kind))
        throw std::invalid_argument("scenario '" + sc.id + "': unknown bound kind '" + kind + "'");
      uint64_t seed = mix_seed(mix_seed(sc.mc.master_seed, hash_string(sc.id)), hash_string(kind));
      for (double eta_db : sc.eta_db_grid) cells.push_back({&sc, kind, eta_db, seed});
    }
  }

  std::vector<SweepRow> rows(cells.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      const Cell& c = cells[i];
      SweepRow& row = rows[i];
      row.scenario_id = c.sc->id;
      row.eta_db = c.eta_db;
      row.bound_kind = c.kind;
      row.policy = c.sc->alloc.name();
      row.seed = c.seed;
      try {
        BoundResult r = evaluate_cell(*c.sc, c.kind, c.eta_db, c.seed);
        row.bits_per_user = r.bits_per_user;
        row.mc_stderr = r.mc_stderr;
        row.gamma_star = r.gamma_star;
        row.theta_star = r.theta_star;
        row.psi_star = r.psi_star;
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
        row.bits_per_user = std::nan("");
      }
    }
  };

  int workers = std::max(1, threads);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.scenario_id != b.scenario_id) return a.scenario_id < b.scenario_id;
    if (a.bound_kind != b.bound_kind) return a.bound_kind < b.bound_kind;
    return a.eta_db < b.eta_db;
  });
  return rows;
}

namespace {

std::string fmt17(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt17(*v) : ""; }

}  // namespace

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "scenario_id,eta_db,bound_kind,policy,bits_per_user,mc_stderr,gamma_star,theta_star,"
         "psi_star,seed,status\n";
  for (const SweepRow& r : rows) {
    out << r.scenario_id << ',' << fmt17(r.eta_db) << ',' << r.bound_kind << ',' << r.policy << ','
        << fmt17(r.bits_per_user) << ',' << fmt17(r.mc_stderr) << ',' << fmt_opt(r.gamma_star)
        << ',' << fmt_opt(r.theta_star) << ',' << fmt_opt(r.psi_star) << ',' << r.seed << ','
        << r.status << '\n';
  }
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  write_csv(rows, out);
  return out.str();
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else
        cur += c;
    }
    fields.push_back(cur);
    if (fields.size() != 11) throw std::runtime_error("CSV row with wrong field count: " + line);
    SweepRow r;
    r.scenario_id = fields[0];
    r.eta_db = std::stod(fields[1]);
    r.bound_kind = fields[2];
    r.policy = fields[3];
    r.bits_per_user = fields[4].empty() ? std::nan("") : std::stod(fields[4]);
    r.mc_stderr = fields[5].empty() ? 0.0 : std::stod(fields[5]);
    if (!fields[6].empty()) r.gamma_star = std::stod(fields[6]);
    if (!fields[7].empty()) r.theta_star = std::stod(fields[7]);
    if (!fields[8].empty()) r.psi_star = std::stod(fields[8]);
    r.seed = std::stoull(fields[9]);
    r.status = fields[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::vector<double> grid(double start, double step, double stop) {
  std::vector<double> out;
  for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
  return out;
}

Scenario finite_base(const std::string& id, int m, int n) {
  Scenario sc;
  sc.id = id;
  sc.m = m;
  sc.n = n;
  sc.beta = double(n) / double(m);
  sc.bounds = {"lower_T1"};
  return sc;
}

Scenario asymptotic_base(const std::string& id, double beta) {
  Scenario sc;
  sc.id = id;
  sc.beta = beta;
  sc.eta_db_grid = grid(0.0, 2.0, 20.0);
  return sc;
}

}  // namespace

std::vector<std::string> figure_ids() { return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6"}; }

std::vector<Scenario> figure_recipe(const std::string& figure_id) {
  std::vector<Scenario> out;
  if (figure_id == "fig1") {
    // four finite (5, 10) systems on a 0..16 dB grid
    Scenario ideal = finite_base("fig1_ideal", 5, 10);
    ideal.eta_db_grid = grid(0.0, 1.0, 16.0);

    Scenario nearfar = finite_base("fig1_nearfar", 5, 10);
    nearfar.eta_db_grid = grid(0.0, 1.0, 16.0);
    nearfar.gain = Distribution::uniform_interval(0.5, 1.0);

    Scenario inversion = nearfar;
    inversion.id = "fig1_inversion";
    inversion.bounds = {"lower_T1"};
    inversion.alloc = parse_policy_kind("inversion");

    Scenario random = finite_base("fig1_random", 5, 10);
    random.eta_db_grid = grid(0.0, 1.0, 16.0);
    random.alloc = parse_policy_kind("random");

    out = {ideal, nearfar, inversion, random};
  } else if (figure_id == "fig2" || figure_id == "fig3") {
    const int m = figure_id == "fig2" ? 5 : 3;
    const int n = figure_id == "fig2" ? 10 : 9;
    for (const char* policy : {"inversion", "random", "waterfill"}) {
      Scenario sc = finite_base(figure_id + "_" + policy, m, n);
      sc.eta_db_grid = grid(0.0, 2.0, 20.0);
      sc.gain = Distribution::uniform_interval(0.5, 1.0);
      sc.alloc = parse_policy_kind(policy);
      out.push_back(sc);
    }
  } else if (figure_id == "fig4") {
    Scenario tanaka = asymptotic_base("fig4_tanaka", 2.0);
    tanaka.bounds = {"tanaka"};

    Scenario gv_ideal = asymptotic_base("fig4_gv_ideal", 2.0);
    gv_ideal.bounds = {"guo_verdu"};

    Scenario gv_nearfar = asymptotic_base("fig4_gv_nearfar", 2.0);
    gv_nearfar.gain = Distribution::uniform_interval(0.5, 1.0);
    gv_nearfar.bounds = {"guo_verdu"};

    out = {tanaka, gv_ideal, gv_nearfar};
  } else if (figure_id == "fig5") {
    Scenario sc = asymptotic_base("fig5_bracket", 2.0);
    sc.cer_db = 20.0;
    sc.bounds = {"tanaka", "tanaka_lower", "tanaka_upper"};
    out = {sc};
  } else if (figure_id == "fig6") {
    for (double beta : {2.0, 3.0}) {
      Scenario sc = asymptotic_base("fig6_beta" + std::to_string(int(beta)), beta);
      sc.cer_db = 20.0;
      sc.bounds = {"tanaka_lower", "tanaka_upper"};
      out.push_back(sc);
    }
  } else {
    throw std::invalid_argument("unknown figure id '" + figure_id + "' (expected fig1..fig6)");
  }
  return out;
}

std::string gnuplot_script(const std::string& csv_path, const std::vector<SweepRow>& rows,
                           const std::string& title) {
  std::set<std::pair<std::string, std::string>> curves;
  for (const SweepRow& r : rows)
    if (r.status == "ok") curves.insert({r.scenario_id, r.bound_kind});
  std::ostringstream out;
  out << "set datafile separator ','\n";
  out << "set key below\n";
  out << "set xlabel 'eta (dB)'\n";
  out << "set ylabel 'bits per user'\n";
  out << "set title '" << title << "'\n";
  out << "set grid\n";
  out << "plot ";
  bool first = true;
  for (const auto& [sid, kind] : curves) {
    if (!first) out << ", \\\n     ";
    first = false;
    out << "'" << csv_path << "' using 2:(strcol(1) eq '" << sid << "' && strcol(3) eq '" << kind
        << "' ? $5 : NaN) with linespoints title '" << sid << " " << kind << "'";
  }
  out << "\n";
  return out.str();
}

}  // namespace cdmacap
