#include "cubeforms/experiment.hpp"

#include "cubeforms/dofs.hpp"
#include "cubeforms/linalg.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace cubeforms {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

int parse_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected an integer, got '" + s + "'");
  }
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected a number, got '" + s + "'");
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// One term of a form: coefficient * monomial * dx^(sequence).
DiffForm parse_term(const std::string& term, int n, int sign) {
  Rational coeff = sign;
  std::vector<int> exps(n, 0);
  std::vector<int> dxs;
  auto parse_index = [&](const std::string& digits, const std::string& tok) {
    const int i = parse_int(digits, "form factor '" + tok + "'");
    if (i < 1 || i > n)
      throw ConfigError("form factor '" + tok + "': index out of range 1.." + std::to_string(n));
    return i - 1;
  };
  for (const auto& raw : split(term, '*')) {
    std::string tok;
    for (char c : raw)
      if (!std::isspace(static_cast<unsigned char>(c))) tok += c;
    if (tok.empty()) throw ConfigError("form: empty factor in '" + term + "'");
    if (tok.rfind("dx", 0) == 0) {
      for (const auto& part : split(tok, '^')) {
        if (part.rfind("dx", 0) != 0) throw ConfigError("form: bad wedge factor '" + tok + "'");
        dxs.push_back(parse_index(part.substr(2), tok));
      }
    } else if (tok[0] == 'x') {
      const auto parts = split(tok, '^');
      if (parts.size() > 2) throw ConfigError("form: bad power '" + tok + "'");
      const int i = parse_index(parts[0].substr(1), tok);
      const int e = parts.size() == 2 ? parse_int(parts[1], "exponent in '" + tok + "'") : 1;
      if (e < 0) throw ConfigError("form: negative exponent in '" + tok + "'");
      exps[i] += e;
    } else {
      try {
        coeff *= Rational(tok);
      } catch (const std::exception&) {
        throw ConfigError("form: cannot parse factor '" + tok + "'");
      }
    }
  }
  DiffForm f = DiffForm::scalar(Polynomial::monomial(Monomial{exps}, coeff));
  for (int i : dxs) {
    IndexMap dx{{i}, n};
    f = wedge(f, DiffForm::basis(dx, Polynomial::constant(n, 1)));
  }
  // wedge of repeated differentials collapses to a zero form of degree 0
  if (f.is_zero() && static_cast<int>(dxs.size()) <= n) return DiffForm(n, static_cast<int>(dxs.size()));
  if (static_cast<int>(dxs.size()) > n) throw ConfigError("form: degree exceeds dimension");
  return f;
}

}  // namespace

// ------------------------------------------------------------------ config

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::string section;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool have_shear = false;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "space" && section != "mesh" && section != "target" && section != "run")
        throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qualified = section + "." + key;

    if (section == "space") {
      if (key == "kind") cfg.space.kind = value;
      else if (key == "r") cfg.space.r = parse_int(value, qualified);
      else if (key == "k") cfg.space.k = parse_int(value, qualified);
      else if (key == "n") cfg.space.n = parse_int(value, qualified);
      else if (key == "basis") cfg.space.basis = value;
      else throw ConfigError(where + "unknown key " + qualified);
    } else if (section == "mesh") {
      if (key == "family") {
        try {
          cfg.mesh.family = parse_mesh_family(value);
        } catch (const std::domain_error& e) {
          throw ConfigError(where + e.what());
        }
      } else if (key == "N") {
        cfg.subdivisions.clear();
        for (const auto& v : split(value, ',')) cfg.subdivisions.push_back(parse_int(v, qualified));
      } else if (key == "d") {
        cfg.mesh.distortion = parse_double(value, qualified);
      } else if (key == "shear") {
        cfg.mesh.shear.clear();
        have_shear = true;
        for (const auto& v : split(value, ',')) cfg.mesh.shear.push_back(parse_double(v, qualified));
      } else {
        throw ConfigError(where + "unknown key " + qualified);
      }
    } else if (section == "target") {
      if (key == "id") cfg.target.id = value;
      else if (key == "form") cfg.target.form = value;
      else throw ConfigError(where + "unknown key " + qualified);
    } else if (section == "run") {
      if (key == "name") cfg.name = value;
      else if (key == "quad") cfg.quadrature_order = parse_int(value, qualified);
      else if (key == "out") cfg.out_dir = value;
      else throw ConfigError(where + "unknown key " + qualified);
    } else {
      throw ConfigError(where + "key outside of a section");
    }
  }

  cfg.mesh.n = cfg.space.n;
  if (cfg.subdivisions.empty()) throw ConfigError("mesh.N: empty list");
  for (std::size_t i = 0; i < cfg.subdivisions.size(); ++i) {
    if (cfg.subdivisions[i] < 1) throw ConfigError("mesh.N: entries must be >= 1");
    if (i > 0 && cfg.subdivisions[i] <= cfg.subdivisions[i - 1])
      throw ConfigError("mesh.N: entries must increase");
  }
  if (cfg.mesh.family == MeshFamily::parallelotope) {
    if (!have_shear) cfg.mesh.shear.assign(cfg.mesh.n * cfg.mesh.n, 0.0);
    if (static_cast<int>(cfg.mesh.shear.size()) != cfg.mesh.n * cfg.mesh.n)
      throw ConfigError("mesh.shear: expected n*n entries");
  }
  if (cfg.mesh.family == MeshFamily::trapezoidal && cfg.mesh.n != 2)
    throw ConfigError("mesh.family trapezoidal requires n = 2");
  if (cfg.mesh.family == MeshFamily::trilinear3d && cfg.mesh.n != 3)
    throw ConfigError("mesh.family trilinear3d requires n = 3");
  if (cfg.quadrature_order < 0 || cfg.quadrature_order > 20)
    throw ConfigError("run.quad: expected 0 (default) or 1..20");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[run]\n"
     << "name = " << cfg.name << "\n"
     << "quad = " << cfg.quadrature_order << "\n"
     << "out = " << cfg.out_dir << "\n\n"
     << "[space]\n"
     << "kind = " << cfg.space.kind << "\n"
     << "r = " << cfg.space.r << "\n"
     << "k = " << cfg.space.k << "\n"
     << "n = " << cfg.space.n << "\n";
  if (!cfg.space.basis.empty()) os << "basis = " << cfg.space.basis << "\n";
  os << "\n[mesh]\n"
     << "family = " << to_string(cfg.mesh.family) << "\n"
     << "N = " << join_ints(cfg.subdivisions) << "\n"
     << "d = " << format_double(cfg.mesh.distortion) << "\n";
  if (!cfg.mesh.shear.empty()) os << "shear = " << join_doubles(cfg.mesh.shear) << "\n";
  os << "\n[target]\n"
     << "id = " << cfg.target.id << "\n";
  if (!cfg.target.form.empty()) os << "form = " << cfg.target.form << "\n";
  return os.str();
}

// ------------------------------------------------------------ space specs

DiffForm parse_form(const std::string& text, int n) {
  std::vector<std::pair<int, std::string>> terms;
  std::string cur;
  int sign = 1;
  for (char c : text) {
    const bool separator = (c == '+' || c == '-') && !trim(cur).empty();
    if (separator) {
      terms.emplace_back(sign, cur);
      cur.clear();
      sign = (c == '-') ? -1 : 1;
    } else if ((c == '+' || c == '-') && trim(cur).empty()) {
      if (c == '-') sign = -sign;
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) terms.emplace_back(sign, cur);
  if (terms.empty()) throw ConfigError("form: empty expression");

  std::optional<DiffForm> total;
  for (const auto& [s, t] : terms) {
    const DiffForm term = parse_term(t, n, s);
    if (!total) total = term;
    else if (total->k() != term.k())
      throw ConfigError("form: terms of different degree in '" + text + "'");
    else *total += term;
  }
  return *total;
}

FormSpace make_space(const SpaceSpec& spec) {
  try {
    if (spec.n < 1 || spec.n > 4) throw ConfigError("space.n: expected 1..4");
    if (spec.k < 0 || spec.k > spec.n) throw ConfigError("space.k: expected 0..n");
    if (spec.kind == "P") {
      if (spec.r < 0) throw ConfigError("space.r: expected r >= 0");
      return build_P(spec.r, spec.k, spec.n);
    }
    if (spec.kind == "Qminus") {
      if (spec.r < 0) throw ConfigError("space.r: expected r >= 0");
      return build_Qminus(spec.r, spec.k, spec.n);
    }
    if (spec.kind == "serendipity") {
      if (spec.k != 0) throw ConfigError("serendipity spaces are 0-forms (k = 0)");
      return build_serendipity(spec.r, spec.n);
    }
    if (spec.kind == "SLambda1_2d") {
      if (spec.n != 2 || spec.k != 1) throw ConfigError("SLambda1_2d requires n = 2, k = 1");
      return build_SrLambda1_2d(spec.r);
    }
    if (spec.kind == "custom") {
      FormSpace space{spec.n, spec.k, 0, {}, ""};
      for (const auto& entry : split(spec.basis, ';')) {
        if (entry.empty()) continue;
        DiffForm f = parse_form(entry, spec.n);
        if (f.is_zero()) throw ConfigError("space.basis: zero form '" + entry + "'");
        if (f.k() != spec.k)
          throw ConfigError("space.basis: '" + entry + "' is not a " + std::to_string(spec.k) + "-form");
        space.r = std::max(space.r, f.total_degree());
        space.basis.push_back(std::move(f));
      }
      if (space.basis.empty()) throw ConfigError("space.basis: empty custom basis");
      space.label = "custom dim=" + std::to_string(space.dim()) + " k=" + std::to_string(spec.k) +
                    " n=" + std::to_string(spec.n);
      return space;
    }
    throw ConfigError("space.kind: unknown kind '" + spec.kind + "'");
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
}

TargetForm make_target(const TargetSpec& spec, int n, int k) {
  if (spec.id == "trig") return trig_target(n, k);
  if (spec.id == "poly") {
    const DiffForm f = parse_form(spec.form, n);
    if (!f.is_zero() && f.k() != k)
      throw ConfigError("target.form: degree does not match the space");
    DiffForm g(n, k);
    g += f.is_zero() ? DiffForm(n, k) : f;
    return polynomial_target(g);
  }
  throw ConfigError("target.id: unknown target '" + spec.id + "'");
}

RunRecord run_experiment(const ExperimentConfig& config, int threads) {
  const FormSpace space = make_space(config.space);
  if (space.is_zero()) throw ConfigError("space is the zero space; nothing to approximate with");
  if (config.mesh.n != space.n) throw ConfigError("mesh and space dimensions differ");
  const TargetForm target = make_target(config.target, space.n, space.k);
  RunRecord rec;
  rec.config = config;
  rec.version = kVersion;
  rec.timestamp = utc_timestamp();
  try {
    rec.report = convergence_study(config.mesh, space, target, config.subdivisions,
                                   config.quadrature_order, threads);
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  return rec;
}

// ------------------------------------------------------------------ output

void write_csv(const ConvergenceReport& report, std::ostream& os) {
  os << kCsvHeader << "\n";
  char buf[64];
  auto rate = [&](const std::optional<double>& v) -> std::string {
    if (!v) return "";
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
  };
  for (const auto& row : report.rows) {
    os << to_string(report.mesh.family) << ',' << report.n << ',' << report.k << ','
       << report.r << ',' << report.space_label << ',' << row.subdivisions << ','
       << format_double(row.h) << ',' << format_double(row.error) << ','
       << rate(row.rate_pair) << ',' << rate(row.rate_lsq) << ','
       << report.prediction.s_affine << ',' << report.prediction.s_multilinear << "\n";
  }
}

std::string format_table(const ConvergenceReport& report) {
  std::ostringstream os;
  os << report.space_label << " on " << to_string(report.mesh.family) << " mesh";
  if (report.mesh.family == MeshFamily::trapezoidal || report.mesh.family == MeshFamily::trilinear3d)
    os << " (d = " << report.mesh.distortion << ")";
  os << ", " << report.quadrature_order << "-point Gauss per axis\n";
  os << std::setw(6) << "N" << std::setw(12) << "h" << std::setw(16) << "L2 error"
     << std::setw(12) << "rate" << std::setw(12) << "rate(lsq)" << "\n";
  for (const auto& row : report.rows) {
    os << std::setw(6) << row.subdivisions << std::setw(12) << std::scientific
       << std::setprecision(3) << row.h << std::setw(16) << std::setprecision(6) << row.error
       << std::fixed << std::setprecision(3);
    if (row.rate_pair) os << std::setw(12) << *row.rate_pair;
    else os << std::setw(12) << "-";
    if (row.rate_lsq) os << std::setw(12) << *row.rate_lsq;
    else os << std::setw(12) << "-";
    os << std::defaultfloat << "\n";
  }
  os << "predicted rate: " << report.prediction.s_affine << " (parallelotope), "
     << report.prediction.s_multilinear << " (multilinear); this family -> "
     << report.predicted_rate() << "\n";
  return os.str();
}

std::string record_json(const RunRecord& rec) {
  nlohmann::json j;
  j["version"] = rec.version;
  j["timestamp"] = rec.timestamp;
  j["config"] = serialize_config(rec.config);
  const auto& rep = rec.report;
  j["space"] = rep.space_label;
  j["family"] = to_string(rep.mesh.family);
  j["n"] = rep.n;
  j["k"] = rep.k;
  j["r"] = rep.r;
  j["quadrature_order"] = rep.quadrature_order;
  j["prediction"] = {{"affine", rep.prediction.s_affine},
                     {"multilinear", rep.prediction.s_multilinear}};
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& row : rep.rows) {
    nlohmann::json r{{"N", row.subdivisions}, {"h", row.h}, {"error", row.error}};
    r["rate_pair"] = row.rate_pair ? nlohmann::json(*row.rate_pair) : nlohmann::json();
    r["rate_lsq"] = row.rate_lsq ? nlohmann::json(*row.rate_lsq) : nlohmann::json();
    rows.push_back(std::move(r));
  }
  return j.dump(2);
}

bool rates_meet_prediction(const ConvergenceReport& report, double tol) {
  const double rate = report.last_rate();
  return std::isfinite(rate) && rate >= report.predicted_rate() - tol;
}

// ------------------------------------------------------------------ checks

FormSpace build_Qminus_corrupted(int r, int k, int n) {
  FormSpace space = build_Qminus(r, k, n);
  if (!space.basis.empty()) space.basis.pop_back();
  return space;
}

MultilinearMap random_multilinear_map(int n, unsigned seed, bool affine) {
  std::mt19937 gen(seed);
  std::uniform_int_distribution<int> num(-4, 4);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    MultilinearMap f;
    if (affine) {
      std::vector<Rational> a(n * n), b(n);
      for (int i = 0; i < n * n; ++i) a[i] = ratio(num(gen), 20) + (i / n == i % n ? 1 : 0);
      for (int i = 0; i < n; ++i) b[i] = ratio(num(gen), 7);
      f = MultilinearMap::affine(n, a, b);
    } else {
      std::vector<std::vector<Rational>> verts(1u << n, std::vector<Rational>(n));
      for (unsigned c = 0; c < verts.size(); ++c)
        for (int i = 0; i < n; ++i)
          verts[c][i] = Rational(static_cast<int>((c >> i) & 1u)) + ratio(num(gen), 20);
      f = MultilinearMap::from_vertices(n, verts);
      if (f.is_affine()) continue;
    }
    if (check_diffeo(f)) return f;
  }
  throw std::logic_error("random_multilinear_map: no valid map found");
}

std::vector<CheckResult> run_checks(const CheckOptions& opt,
                                    const std::function<void(const CheckResult&)>& on_result) {
  std::vector<CheckResult> results;
  auto tag = [](int r, int k, int n) {
    return "r=" + std::to_string(r) + " k=" + std::to_string(k) + " n=" + std::to_string(n);
  };
  auto finish = [&](CheckResult res) {
    res.passed = res.failures.empty();
    if (on_result) on_result(res);
    results.push_back(std::move(res));
  };

  {
    CheckResult res{"dimension", true, 0, {}};
    for (int n = 1; n <= opt.max_n; ++n)
      for (int k = 0; k <= n; ++k)
        for (int r = 0; r <= opt.max_r; ++r) {
          ++res.cases;
          const FormSpace space = opt.qminus(r, k, n);
          const long long expected = dim_Qminus(r, k, n);
          if (space.dim() != expected)
            res.failures.push_back(tag(r, k, n) + ": basis size " + std::to_string(space.dim()) +
                                   " != " + std::to_string(expected));
          else if (rank(space) != space.dim())
            res.failures.push_back(tag(r, k, n) + ": basis is linearly dependent");
        }
    finish(std::move(res));
  }
  {
    CheckResult res{"dof_count", true, 0, {}};
    for (int n = 1; n <= opt.max_n; ++n)
      for (int k = 0; k <= n; ++k)
        for (int r = 1; r <= opt.max_r; ++r) {
          ++res.cases;
          const long long dim = opt.qminus(r, k, n).dim();
          const long long built = build_dofs(r, k, n).size();
          const long long summed = dof_count_formula(r, k, n);
          if (built != dim || summed != dim)
            res.failures.push_back(tag(r, k, n) + ": dofs " + std::to_string(built) +
                                   ", face sum " + std::to_string(summed) + ", dim " +
                                   std::to_string(dim));
        }
    finish(std::move(res));
  }
  {
    CheckResult res{"unisolvence", true, 0, {}};
    for (int n = 1; n <= std::min(opt.max_n, opt.unisolvence_max_n); ++n)
      for (int k = 0; k <= n; ++k)
        for (int r = 1; r <= opt.max_r; ++r) {
          ++res.cases;
          const DofSet dofs = build_dofs(r, k, n);
          const FormSpace space = opt.qminus(r, k, n);
          if (dofs.size() != space.dim()) {
            res.failures.push_back(tag(r, k, n) + ": matrix is not square");
            continue;
          }
          RationalMatrix m(dofs.size(), space.dim());
          for (int i = 0; i < dofs.size(); ++i)
            for (int j = 0; j < space.dim(); ++j)
              m(i, j) = apply_dof(dofs.functionals[i], space.basis[j]);
          if (rank(m) != space.dim()) res.failures.push_back(tag(r, k, n) + ": singular");
        }
    finish(std::move(res));
  }
  {
    CheckResult res{"subcomplex", true, 0, {}};
    for (int n = 1; n <= opt.max_n; ++n)
      for (int k = 0; k < n; ++k)
        for (int r = 0; r <= opt.max_r; ++r) {
          ++res.cases;
          const FormSpace next = opt.qminus(r, k + 1, n);
          FormSpace images{n, k + 1, r, {}, "d(" + tag(r, k, n) + ")"};
          for (const auto& f : opt.qminus(r, k, n).basis)
            images.basis.push_back(exterior_derivative(f));
          if (!contains(next, images))
            res.failures.push_back(tag(r, k, n) + ": d(Qminus) not in Qminus^{k+1}");
        }
    finish(std::move(res));
  }
  {
    CheckResult res{"pullback", true, 0, {}};
    unsigned seed = opt.seed;
    for (int n = 2; n <= std::min(opt.max_n, 3); ++n)
      for (int m = 0; m < opt.pullback_maps; ++m) {
        const MultilinearMap multi = random_multilinear_map(n, seed++, false);
        const MultilinearMap aff = random_multilinear_map(n, seed++, true);
        for (int k = 0; k <= n; ++k)
          for (int r = 0; r <= opt.max_r; ++r) {
            ++res.cases;
            const FormSpace source = build_P(r, k, n);
            FormSpace multi_img{n, k, r, {}, ""}, aff_img{n, k, r, {}, ""};
            for (const auto& v : source.basis) {
              multi_img.basis.push_back(pullback_polynomial(multi, v));
              aff_img.basis.push_back(pullback_polynomial(aff, v));
            }
            if (!contains(opt.qminus(r + k, k, n), multi_img))
              res.failures.push_back(tag(r, k, n) + ": multilinear pullback escapes Qminus_{r+k}");
            if (!contains(build_P(r, k, n), aff_img))
              res.failures.push_back(tag(r, k, n) + ": affine pullback escapes P_r");
          }
      }
    finish(std::move(res));
  }
  return results;
}

}  // namespace cubeforms
