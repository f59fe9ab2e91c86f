#include "cdmacap/scenario_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace cdmacap {

// ---------------------------------------------------------------------------
// Scenario methods

double Scenario::alloc_second_moment() const {
  const double per_user_budget = alloc.budget < 0.0 ? 1.0 : (finite_dims() ? alloc.budget / double(n) : 1.0);
  switch (alloc.kind) {
    case PolicySpec::Kind::none:
      return 1.0;
    case PolicySpec::Kind::random:
      return alloc.normalize ? per_user_budget : alloc.law.second_moment();
    case PolicySpec::Kind::inversion:
    case PolicySpec::Kind::inversion_squared:
    case PolicySpec::Kind::waterfill:
      return per_user_budget;
  }
  return 1.0;
}

double Scenario::resolved_rho2() const { return cer_db ? cer_to_rho2(*cer_db, gain) : rho2; }

std::vector<std::string> Scenario::validation_errors() const {
  std::vector<std::string> errs;
  auto check_alphabet = [&](const Alphabet& a, const char* label) {
    try {
      a.check_valid();
    } catch (const std::exception& e) {
      errs.push_back(std::string(label) + ": " + e.what());
    }
  };
  if (id.empty()) errs.push_back("id must be nonempty");
  if (m < 0 || n < 0) errs.push_back("m and n must be nonnegative");
  if ((m > 0) != (n > 0)) errs.push_back("m and n must be given together");
  if (!finite_dims() && !(beta > 0.0)) errs.push_back("either finite m,n or a positive beta is required");
  if (finite_dims() && beta > 0.0 && std::abs(beta - double(n) / double(m)) > 1e-12)
    errs.push_back("beta conflicts with n/m");
  check_alphabet(input, "input");
  check_alphabet(signature, "signature");
  if (input.size() > 0 && input.variance() <= 0.0) errs.push_back("input alphabet must have positive variance");
  if (input.size() > 0 && !input.zero_mean())
    errs.push_back("input alphabet must have zero mean (nonzero-mean inputs are out of scope)");
  if (signature.size() > 0 && signature.second_moment() <= 0.0)
    errs.push_back("signature alphabet must have positive power");
  if (field == Field::real && (!input.is_real(1e-15) || !signature.is_real(1e-15)))
    errs.push_back("field=real requires real input and signature alphabets");
  if (rho2 < 0.0) errs.push_back("rho2 must be nonnegative");
  if (cer_db && rho2 != 0.0) errs.push_back("give either cer_db or rho2, not both");
  if (mc.samples < 0) errs.push_back("mc samples must be nonnegative");
  if (gv_snr_mode != "product" && gv_snr_mode != "additive")
    errs.push_back("gv_snr_mode must be 'product' or 'additive'");
  if (alloc.kind == PolicySpec::Kind::random && alloc.law.second_moment() <= 0.0)
    errs.push_back("random allocation law must have positive power");
  if (alloc.budget == 0.0 || std::isnan(alloc.budget))
    errs.push_back("allocation budget must be positive (or omitted)");
  for (double e : eta_db_grid)
    if (!std::isfinite(e)) errs.push_back("eta grid entries must be finite");
  return errs;
}

void Scenario::check_valid() const {
  std::vector<std::string> errs = validation_errors();
  if (errs.empty()) return;
  std::string joined = "invalid scenario '" + id + "': ";
  for (size_t i = 0; i < errs.size(); ++i) joined += (i ? "; " : "") + errs[i];
  throw std::invalid_argument(joined);
}

// ---------------------------------------------------------------------------
// INI parsing

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct IniError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_double(const std::string& tok, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw IniError("cannot parse number '" + tok + "' for " + what);
  }
}

uint64_t parse_u64(const std::string& tok, const std::string& what) {
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return static_cast<uint64_t>(v);
  } catch (const std::exception&) {
    throw IniError("cannot parse integer '" + tok + "' for " + what);
  }
}

int parse_int(const std::string& tok, const std::string& what) {
  try {
    size_t pos = 0;
    long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw IniError("cannot parse integer '" + tok + "' for " + what);
  }
}

bool parse_bool(const std::string& tok, const std::string& what) {
  std::string t = lower(tok);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw IniError("cannot parse boolean '" + tok + "' for " + what);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cur = trim(cur);
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  for (const std::string& t : out)
    if (t.empty()) throw IniError("empty entry in list '" + s + "'");
  return out;
}

// "a", "bi", "a+bi", "a-bi", "i", "-i"
cd parse_complex(const std::string& tok) {
  std::string s;
  for (char c : tok)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw IniError("empty symbol");
  if (s.back() != 'i' && s.back() != 'I') return cd(parse_double(s, "symbol"), 0.0);
  std::string body = s.substr(0, s.size() - 1);
  if (body.empty() || body == "+") return cd(0.0, 1.0);
  if (body == "-") return cd(0.0, -1.0);
  size_t split = std::string::npos;
  for (size_t k = body.size() - 1; k > 0; --k) {
    char c = body[k];
    if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return cd(0.0, parse_double(body, "symbol"));
  double re = parse_double(body.substr(0, split), "symbol");
  std::string imtok = body.substr(split);
  double im = imtok == "+" ? 1.0 : imtok == "-" ? -1.0 : parse_double(imtok, "symbol");
  return cd(re, im);
}

std::vector<double> parse_grid(const std::string& s) {
  // either "start:step:stop" or a comma list
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
      if (c == ':') {
        parts.push_back(trim(cur));
        cur.clear();
      } else
        cur += c;
    }
    parts.push_back(trim(cur));
    if (parts.size() != 3) throw IniError("grid '" + s + "' must be start:step:stop");
    double start = parse_double(parts[0], "grid start");
    double step = parse_double(parts[1], "grid step");
    double stop = parse_double(parts[2], "grid stop");
    if (!(step > 0.0)) throw IniError("grid step must be positive");
    std::vector<double> out;
    for (double v = start; v <= stop + 1e-9 * std::max(1.0, std::abs(step)); v += step)
      out.push_back(v);
    if (out.empty()) throw IniError("grid '" + s + "' is empty");
    return out;
  }
  std::vector<double> out;
  for (const std::string& t : split_list(s)) out.push_back(parse_double(t, "grid entry"));
  if (out.empty()) throw IniError("grid '" + s + "' is empty");
  return out;
}

using Section = std::map<std::string, std::string>;

Alphabet alphabet_from_section(const Section& sec, const std::string& label) {
  auto it = sec.find("symbols");
  if (it == sec.end()) throw IniError("[" + label + "] needs a 'symbols' key");
  std::vector<cd> symbols;
  for (const std::string& t : split_list(it->second)) symbols.push_back(parse_complex(t));
  Alphabet out;
  out.symbols = symbols;
  auto pt = sec.find("pmf");
  if (pt != sec.end()) {
    std::vector<std::string> probs = split_list(pt->second);
    if (probs.size() != symbols.size())
      throw IniError("[" + label + "] pmf size does not match symbols");
    out.pmf.resize(static_cast<int64_t>(probs.size()));
    for (size_t i = 0; i < probs.size(); ++i) out.pmf(static_cast<int64_t>(i)) = parse_double(probs[i], "pmf");
  } else {
    out.pmf = Eigen::VectorXd::Constant(static_cast<int64_t>(symbols.size()),
                                        1.0 / double(symbols.size()));
  }
  return out;
}

Distribution distribution_from_section(const Section& sec, const std::string& label,
                                       const std::string& prefix = "") {
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = sec.find(prefix + key);
    return it == sec.end() ? nullptr : &it->second;
  };
  const std::string* kind = get("kind");
  if (!kind) throw IniError("[" + label + "] needs a '" + prefix + "kind' key");
  std::string k = lower(*kind);
  if (k == "point") {
    const std::string* v = get("value");
    return Distribution::point(v ? parse_double(*v, "point value") : 1.0);
  }
  if (k == "point_masses" || k == "atoms") {
    const std::string* vs = get("values");
    const std::string* ps = get("probs");
    if (!vs || !ps) throw IniError("[" + label + "] point_masses needs 'values' and 'probs'");
    std::vector<double> values, probs;
    for (const std::string& t : split_list(*vs)) values.push_back(parse_double(t, "values"));
    for (const std::string& t : split_list(*ps)) probs.push_back(parse_double(t, "probs"));
    if (values.size() != probs.size()) throw IniError("[" + label + "] values/probs size mismatch");
    return Distribution::point_masses(values, probs);
  }
  if (k == "uniform") {
    const std::string* lo = get("lo");
    const std::string* hi = get("hi");
    if (!lo || !hi) throw IniError("[" + label + "] uniform needs 'lo' and 'hi'");
    return Distribution::uniform_interval(parse_double(*lo, "lo"), parse_double(*hi, "hi"));
  }
  if (k == "gaussian" || k == "normal") {
    const std::string* mu = get("mu");
    const std::string* s2 = get("sigma2");
    return Distribution::gaussian(mu ? parse_double(*mu, "mu") : 0.0,
                                  s2 ? parse_double(*s2, "sigma2") : 1.0);
  }
  if (k == "half_gaussian") {
    const std::string* s2 = get("sigma2");
    return Distribution::half_gaussian(s2 ? parse_double(*s2, "sigma2") : 1.0);
  }
  throw IniError("[" + label + "] unknown distribution kind '" + *kind + "'");
}

}  // namespace

Scenario parse_scenario_ini(const std::string& text, const std::string& source_name) {
  std::map<std::string, Section> doc;
  {
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto fail = [&](const std::string& msg) {
        throw std::runtime_error(source_name + ":" + std::to_string(lineno) + ": " + msg);
      };
      size_t cut = line.find_first_of("#;");
      if (cut != std::string::npos) line = line.substr(0, cut);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail("unterminated section header");
        section = lower(trim(line.substr(1, line.size() - 2)));
        if (section.empty()) fail("empty section name");
        continue;
      }
      size_t eq = line.find('=');
      if (eq == std::string::npos) fail("expected 'key = value'");
      if (section.empty()) fail("key outside any [section]");
      std::string key = lower(trim(line.substr(0, eq)));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty()) fail("empty key");
      if (!doc[section].emplace(key, value).second) fail("duplicate key '" + key + "'");
    }
  }

  Scenario sc;
  std::string where;  // last section resolved, for errors that do not name one
  auto section = [&](const char* name) -> const Section* {
    auto it = doc.find(name);
    if (it == doc.end()) return nullptr;
    where = name;
    return &it->second;
  };
  try {
    if (const Section* sp = section("system")) {
      const Section& sec = *sp;
      for (const auto& [key, value] : sec) {
        if (key == "id")
          sc.id = value;
        else if (key == "m")
          sc.m = parse_int(value, "m");
        else if (key == "n")
          sc.n = parse_int(value, "n");
        else if (key == "beta")
          sc.beta = parse_double(value, "beta");
        else if (key == "field") {
          std::string f = lower(value);
          if (f == "real")
            sc.field = Field::real;
          else if (f == "complex")
            sc.field = Field::complex;
          else
            throw IniError("field must be 'real' or 'complex'");
        } else if (key == "bounds")
          sc.bounds = split_list(value);
        else if (key == "gv_snr_mode")
          sc.gv_snr_mode = lower(value);
        else
          throw IniError("unknown [system] key '" + key + "'");
      }
    }
    if (sc.finite_dims() && sc.beta == 0.0) sc.beta = double(sc.n) / double(sc.m);

    if (const Section* sp = section("input")) sc.input = alphabet_from_section(*sp, "input");
    if (const Section* sp = section("signature"))
      sc.signature = alphabet_from_section(*sp, "signature");
    if (const Section* sp = section("gain")) sc.gain = distribution_from_section(*sp, "gain");

    if (const Section* sp = section("allocation")) {
      const Section& sec = *sp;
      auto kt = sec.find("kind");
      if (kt == sec.end()) throw IniError("[allocation] needs a 'kind' key");
      sc.alloc = parse_policy_kind(lower(kt->second));
      for (const auto& [key, value] : sec) {
        if (key == "kind") continue;
        if (key == "budget")
          sc.alloc.budget = parse_double(value, "budget");
        else if (key == "normalize")
          sc.alloc.normalize = parse_bool(value, "normalize");
        else if (key.rfind("law_", 0) == 0)
          continue;  // handled below as a group
        else
          throw IniError("unknown [allocation] key '" + key + "'");
      }
      if (sec.count("law_kind")) sc.alloc.law = distribution_from_section(sec, "allocation", "law_");
    }

    if (const Section* sp = section("estimation")) {
      const Section& sec = *sp;
      for (const auto& [key, value] : sec) {
        if (key == "cer_db")
          sc.cer_db = parse_double(value, "cer_db");
        else if (key == "rho2")
          sc.rho2 = parse_double(value, "rho2");
        else
          throw IniError("unknown [estimation] key '" + key + "'");
      }
    }

    if (const Section* sp = section("noise")) {
      const Section& sec = *sp;
      auto et = sec.find("eta_db");
      if (et == sec.end()) throw IniError("[noise] needs an 'eta_db' key");
      sc.eta_db_grid = parse_grid(et->second);
      for (const auto& [key, value] : sec) {
        (void)value;
        if (key != "eta_db") throw IniError("unknown [noise] key '" + key + "'");
      }
    }

    if (const Section* sp = section("mc")) {
      const Section& sec = *sp;
      for (const auto& [key, value] : sec) {
        if (key == "samples")
          sc.mc.samples = parse_int(value, "samples");
        else if (key == "master_seed")
          sc.mc.master_seed = parse_u64(value, "master_seed");
        else
          throw IniError("unknown [mc] key '" + key + "'");
      }
    }

    for (const auto& [name, sec] : doc) {
      (void)sec;
      if (name != "system" && name != "input" && name != "signature" && name != "gain" &&
          name != "allocation" && name != "estimation" && name != "noise" && name != "mc")
        throw IniError("unknown section [" + name + "]");
    }
  } catch (const std::exception& e) {
    // IniError and constructor invariants alike; helper messages name their
    // section already, bare ones get the section resolved last
    std::string msg = e.what();
    if (!where.empty() && msg.find('[') == std::string::npos) msg = "[" + where + "] " + msg;
    throw std::runtime_error(source_name + ": " + msg);
  }

  std::vector<std::string> errs = sc.validation_errors();
  if (!errs.empty()) {
    std::string joined = source_name + ": invalid scenario: ";
    for (size_t i = 0; i < errs.size(); ++i) joined += (i ? "; " : "") + errs[i];
    throw std::runtime_error(joined);
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_ini(buf.str(), path);
}

std::string validation_report(const Scenario& sc) {
  std::ostringstream out;
  out.precision(10);
  out << "scenario '" << sc.id << "'\n";
  if (sc.finite_dims())
    out << "  dimensions     m = " << sc.m << ", n = " << sc.n << " (loading " << sc.loading()
        << ")\n";
  else
    out << "  dimensions     asymptotic, beta = " << sc.beta << "\n";
  out << "  field          " << (sc.field == Field::real ? "real" : "complex") << "\n";

  auto alphabet_line = [&](const char* label, const Alphabet& a) {
    out << "  " << label << " ";
    for (int i = 0; i < a.size(); ++i) {
      const cd s = a.symbols[static_cast<size_t>(i)];
      if (i) out << ", ";
      out << s.real();
      if (std::abs(s.imag()) > 0) out << (s.imag() >= 0 ? "+" : "") << s.imag() << "i";
      out << " (p=" << a.pmf(i) << ")";
    }
    out << "\n";
  };
  alphabet_line("input        ", sc.input);
  alphabet_line("signature    ", sc.signature);
  out << "  input moments  mean " << std::abs(sc.input.mean()) << ", power "
      << sc.input.second_moment() << ", variance " << sc.input.variance() << "\n";

  DifferencePmf diff = difference_pmf(sc.input);
  out << "  diff support   ";
  for (int i = 0; i < diff.size(); ++i) {
    if (i) out << ", ";
    out << diff.values[static_cast<size_t>(i)].real();
    if (std::abs(diff.values[static_cast<size_t>(i)].imag()) > 0)
      out << (diff.values[static_cast<size_t>(i)].imag() >= 0 ? "+" : "")
          << diff.values[static_cast<size_t>(i)].imag() << "i";
    out << " (p=" << diff.pmf(i) << ")";
  }
  out << "\n";

  out << "  gain           " << sc.gain.describe() << " (E[G^2] = " << sc.gain.second_moment()
      << ")\n";
  out << "  allocation     " << sc.alloc.name() << " (E[C^2] = " << sc.alloc_second_moment()
      << ")\n";
  out << "  estimation     rho2 = " << sc.resolved_rho2();
  if (sc.cer_db) out << " (from cer_db = " << *sc.cer_db << ")";
  out << "\n";
  out << "  mc             samples = " << (sc.mc.samples > 0 ? std::to_string(sc.mc.samples) : std::string("engine default"))
      << ", master_seed = " << sc.mc.master_seed << "\n";
  if (!sc.bounds.empty()) {
    out << "  bounds        ";
    for (size_t i = 0; i < sc.bounds.size(); ++i) out << (i ? ", " : " ") << sc.bounds[i];
    out << "\n";
  }
  if (!sc.eta_db_grid.empty()) {
    out << "  eta grid (dB) ";
    for (size_t i = 0; i < sc.eta_db_grid.size(); ++i) out << (i ? ", " : " ") << sc.eta_db_grid[i];
    out << "\n";
    out << "  noise table    eta_db -> sigma^2\n";
    for (double db : sc.eta_db_grid) {
      double s2 = eta_to_sigma2(eta_db_to_linear(db), sc.input, sc.signature, sc.alloc_second_moment());
      out << "    " << db << " -> " << s2 << "\n";
    }
  }
  return out.str();
}

}  // namespace cdmacap
