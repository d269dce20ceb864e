#include "cubeforms/forms.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cubeforms {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::domain_error(what);
}

void next_subset(std::vector<int>& idx, int n, bool& done) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) {
    done = true;
    return;
  }
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
}

}  // namespace

// ---------------------------------------------------------------- IndexMap

bool IndexMap::contains(int i) const {
  return std::binary_search(entries.begin(), entries.end(), i);
}

std::string IndexMap::to_string() const {
  if (entries.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) out += '^';
    out += "dx" + std::to_string(entries[i] + 1);
  }
  return out;
}

std::vector<IndexMap> enumerate_sigma(int k, int n) {
  require(n >= 0 && k >= 0, "enumerate_sigma: need n, k >= 0");
  std::vector<IndexMap> out;
  if (k > n) return out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  bool done = false;
  while (!done) {
    out.push_back(IndexMap{idx, n});
    next_subset(idx, n, done);
  }
  return out;
}

int merge_sign(std::span<const int> a, std::span<const int> b,
               std::vector<int>& merged) {
  merged.clear();
  merged.reserve(a.size() + b.size());
  int inversions = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      merged.push_back(a[i++]);
    } else if (i == a.size() || b[j] < a[i]) {
      // b[j] jumps over the remaining a entries
      inversions += static_cast<int>(a.size() - i);
      merged.push_back(b[j++]);
    } else {
      return 0;
    }
  }
  return (inversions % 2) ? -1 : 1;
}

// ---------------------------------------------------------------- Monomial

int Monomial::total_degree() const {
  int s = 0;
  for (int e : exponents) s += e;
  return s;
}

std::string Monomial::to_string() const {
  std::string out;
  for (int i = 0; i < nvars(); ++i) {
    if (exponents[i] == 0) continue;
    if (!out.empty()) out += '*';
    out += "x" + std::to_string(i + 1);
    if (exponents[i] > 1) out += "^" + std::to_string(exponents[i]);
  }
  return out.empty() ? "1" : out;
}

// -------------------------------------------------------------- Polynomial

Polynomial Polynomial::constant(int nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(Monomial{std::vector<int>(nvars, 0)}, c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
  require(i >= 0 && i < nvars, "Polynomial::variable: index out of range");
  Monomial m{std::vector<int>(nvars, 0)};
  m.exponents[i] = 1;
  return monomial(m);
}

Polynomial Polynomial::monomial(const Monomial& m, const Rational& c) {
  Polynomial p(m.nvars());
  p.add_term(m, c);
  return p;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  require(m.nvars() == nvars_, "Polynomial: monomial arity mismatch");
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

int Polynomial::total_degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m.total_degree());
  return d;
}

int Polynomial::degree_in(int i) const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m.exponents[i]);
  return d;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) {
    if (m.exponents[i] == 0) continue;
    Monomial dm = m;
    --dm.exponents[i];
    out.add_term(dm, c * m.exponents[i]);
  }
  return out;
}

Polynomial Polynomial::restrict(std::span<const int> free_vars,
                                std::span<const int> fixed) const {
  require(static_cast<int>(fixed.size()) == nvars_,
          "Polynomial::restrict: pattern arity mismatch");
  Polynomial out(static_cast<int>(free_vars.size()));
  for (const auto& [m, c] : terms_) {
    Rational coeff = c;
    for (int i = 0; i < nvars_ && sgn(coeff) != 0; ++i) {
      if (fixed[i] < 0 || m.exponents[i] == 0) continue;
      if (fixed[i] == 0) coeff = 0;
      else if (fixed[i] != 1) {
        Rational v = fixed[i];
        for (int e = 0; e < m.exponents[i]; ++e) coeff *= v;
      }
    }
    if (sgn(coeff) == 0) continue;
    Monomial rm{std::vector<int>(free_vars.size())};
    for (std::size_t j = 0; j < free_vars.size(); ++j)
      rm.exponents[j] = m.exponents[free_vars[j]];
    out.add_term(rm, coeff);
  }
  return out;
}

Polynomial Polynomial::compose(std::span<const Polynomial> subs) const {
  require(static_cast<int>(subs.size()) == nvars_,
          "Polynomial::compose: wrong number of substitutes");
  const int target = subs.empty() ? 0 : subs[0].nvars();
  for (const auto& s : subs)
    require(s.nvars() == target, "Polynomial::compose: mixed arities");

  // powers[i][e] = subs[i]^e, built lazily
  std::vector<std::vector<Polynomial>> powers(nvars_);
  auto power = [&](int i, int e) -> const Polynomial& {
    auto& pw = powers[i];
    if (pw.empty()) pw.push_back(Polynomial::constant(target, 1));
    while (static_cast<int>(pw.size()) <= e) pw.push_back(pw.back() * subs[i]);
    return pw[e];
  };

  Polynomial out(target);
  for (const auto& [m, c] : terms_) {
    Polynomial term = Polynomial::constant(target, c);
    for (int i = 0; i < nvars_; ++i)
      if (m.exponents[i] > 0) term = term * power(i, m.exponents[i]);
    out += term;
  }
  return out;
}

Rational Polynomial::evaluate(std::span<const Rational> x) const {
  require(static_cast<int>(x.size()) == nvars_, "Polynomial::evaluate: arity");
  Rational sum = 0;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (int i = 0; i < nvars_; ++i)
      for (int e = 0; e < m.exponents[i]; ++e) t *= x[i];
    sum += t;
  }
  return sum;
}

double Polynomial::evaluate(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == nvars_, "Polynomial::evaluate: arity");
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c.get_d();
    for (int i = 0; i < nvars_; ++i)
      for (int e = 0; e < m.exponents[i]; ++e) t *= x[i];
    sum += t;
  }
  return sum;
}

Rational Polynomial::integrate_unit_cube() const {
  Rational sum = 0;
  for (const auto& [m, c] : terms_) {
    mpz_class den = 1;
    for (int e : m.exponents) den *= (e + 1);
    sum += c / Rational(den);
  }
  return sum;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << (sgn(c) < 0 ? " - " : " + ");
    else if (sgn(c) < 0) os << "-";
    first = false;
    Rational a = abs(c);
    const bool unit_monomial = m.total_degree() == 0;
    if (a != 1 || unit_monomial) {
      os << a.get_str();
      if (!unit_monomial) os << '*';
    }
    if (!unit_monomial) os << m.to_string();
  }
  return os.str();
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  require(nvars_ == o.nvars_, "Polynomial: arity mismatch in +");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  require(nvars_ == o.nvars_, "Polynomial: arity mismatch in -");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (sgn(c) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  require(a.nvars_ == b.nvars_, "Polynomial: arity mismatch in *");
  Polynomial out(a.nvars_);
  Monomial m{std::vector<int>(a.nvars_)};
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      for (int i = 0; i < a.nvars_; ++i)
        m.exponents[i] = ma.exponents[i] + mb.exponents[i];
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

// ---------------------------------------------------------------- DiffForm

DiffForm::DiffForm(int n, int k) : n_(n), k_(k) {
  require(n >= 0 && k >= 0, "DiffForm: need n, k >= 0");
}

DiffForm DiffForm::scalar(const Polynomial& p) {
  DiffForm f(p.nvars(), 0);
  f.add(IndexMap{{}, p.nvars()}, p);
  return f;
}

DiffForm DiffForm::basis(const IndexMap& sigma, const Polynomial& p) {
  DiffForm f(p.nvars(), sigma.degree());
  f.add(sigma, p);
  return f;
}

DiffForm DiffForm::top(const Polynomial& p) {
  const int n = p.nvars();
  IndexMap all{std::vector<int>(n), n};
  for (int i = 0; i < n; ++i) all.entries[i] = i;
  return basis(all, p);
}

Polynomial DiffForm::component(const IndexMap& sigma) const {
  auto it = components_.find(sigma);
  return it == components_.end() ? Polynomial(n_) : it->second;
}

void DiffForm::add(const IndexMap& sigma, const Polynomial& p) {
  require(sigma.degree() == k_, "DiffForm::add: index map degree mismatch");
  require(p.nvars() == n_, "DiffForm::add: coefficient arity mismatch");
  for (std::size_t i = 0; i < sigma.entries.size(); ++i) {
    require(sigma.entries[i] >= 0 && sigma.entries[i] < n_,
            "DiffForm::add: index out of range");
    require(i == 0 || sigma.entries[i - 1] < sigma.entries[i],
            "DiffForm::add: index map not increasing");
  }
  if (p.is_zero()) return;
  IndexMap key{sigma.entries, n_};
  auto [it, inserted] = components_.try_emplace(key, p);
  if (!inserted) {
    it->second += p;
    if (it->second.is_zero()) components_.erase(it);
  }
}

int DiffForm::total_degree() const {
  int d = -1;
  for (const auto& [s, p] : components_) d = std::max(d, p.total_degree());
  return d;
}

std::string DiffForm::to_string() const {
  if (components_.empty()) return "0";
  std::string out;
  for (const auto& [s, p] : components_) {
    if (!out.empty()) out += " + ";
    out += "(" + p.to_string() + ")";
    if (k_ > 0) out += " " + s.to_string();
  }
  return out;
}

DiffForm& DiffForm::operator+=(const DiffForm& o) {
  require(n_ == o.n_ && k_ == o.k_, "DiffForm: shape mismatch in +");
  for (const auto& [s, p] : o.components_) add(s, p);
  return *this;
}

DiffForm& DiffForm::operator-=(const DiffForm& o) {
  require(n_ == o.n_ && k_ == o.k_, "DiffForm: shape mismatch in -");
  for (const auto& [s, p] : o.components_) add(s, -p);
  return *this;
}

DiffForm& DiffForm::operator*=(const Rational& c) {
  if (sgn(c) == 0) {
    components_.clear();
    return *this;
  }
  for (auto& [s, p] : components_) p *= c;
  return *this;
}

DiffForm operator*(const Polynomial& p, const DiffForm& f) {
  DiffForm out(f.n(), f.k());
  for (const auto& [s, q] : f.components()) out.add(s, p * q);
  return out;
}

// -------------------------------------------------------------------- Face

std::vector<int> Face::pattern() const {
  std::vector<int> pat(n, -1);
  for (const auto& [c, v] : fixed) pat[c] = v;
  return pat;
}

std::string Face::to_string() const {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < n; ++i) {
    auto it = fixed.find(i);
    if (it == fixed.end()) continue;
    if (!first) out += ",";
    first = false;
    out += "x" + std::to_string(i + 1) + "=" + std::to_string(it->second);
  }
  if (first) out += "interior";
  return out + "}";
}

// -------------------------------------------------------------- operations

DiffForm wedge(const DiffForm& f, const DiffForm& g) {
  require(f.n() == g.n(), "wedge: ambient dimension mismatch");
  const int n = f.n();
  const int deg = f.k() + g.k();
  if (deg > n) return DiffForm(n, deg);
  DiffForm out(n, deg);
  std::vector<int> merged;
  for (const auto& [sf, pf] : f.components()) {
    for (const auto& [sg, pg] : g.components()) {
      int sign = merge_sign(sf.entries, sg.entries, merged);
      if (sign == 0) continue;
      Polynomial prod = pf * pg;
      if (sign < 0) prod = -prod;
      out.add(IndexMap{merged, n}, prod);
    }
  }
  return out;
}

DiffForm exterior_derivative(const DiffForm& f) {
  const int n = f.n();
  if (f.k() == n) return DiffForm(n, n + 1);
  DiffForm out(n, f.k() + 1);
  std::vector<int> merged;
  for (const auto& [s, p] : f.components()) {
    for (int i = 0; i < n; ++i) {
      if (s.contains(i)) continue;
      Polynomial dp = p.derivative(i);
      if (dp.is_zero()) continue;
      const int one[1] = {i};
      int sign = merge_sign(one, s.entries, merged);
      if (sign < 0) dp = -dp;
      out.add(IndexMap{merged, n}, dp);
    }
  }
  return out;
}

DiffForm trace(const DiffForm& f, const Face& face) {
  require(face.n == f.n(), "trace: face belongs to a different cube");
  const int d = face.dim();
  if (f.k() > d) return DiffForm(d, f.k());
  const std::vector<int> pattern = face.pattern();
  std::vector<int> position(f.n(), -1);
  for (int j = 0; j < d; ++j) position[face.free[j]] = j;

  DiffForm out(d, f.k());
  for (const auto& [s, p] : f.components()) {
    IndexMap local{{}, d};
    bool tangent = true;
    for (int e : s.entries) {
      if (position[e] < 0) {
        tangent = false;
        break;
      }
      local.entries.push_back(position[e]);
    }
    if (!tangent) continue;
    out.add(local, p.restrict(face.free, pattern));
  }
  return out;
}

Rational l2_inner_reference(const DiffForm& f, const DiffForm& g) {
  require(f.n() == g.n() && f.k() == g.k(),
          "l2_inner_reference: degree or dimension mismatch");
  Rational sum = 0;
  for (const auto& [s, pf] : f.components()) {
    auto it = g.components().find(s);
    if (it == g.components().end()) continue;
    sum += (pf * it->second).integrate_unit_cube();
  }
  return sum;
}

Rational integrate_unit_cube(const DiffForm& top_form) {
  require(top_form.k() == top_form.n() || top_form.is_zero(),
          "integrate_unit_cube: not a top-degree form");
  Rational sum = 0;
  for (const auto& [s, p] : top_form.components()) sum += p.integrate_unit_cube();
  return sum;
}

std::map<IndexMap, double> evaluate(const DiffForm& f,
                                    std::span<const double> point) {
  require(static_cast<int>(point.size()) == f.n(), "evaluate: point arity");
  std::map<IndexMap, double> out;
  for (const auto& [s, p] : f.components()) out.emplace(s, p.evaluate(point));
  return out;
}

}  // namespace cubeforms
