#include "cubeforms/mapping.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace cubeforms {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::domain_error(what);
}

std::string point_string(std::span<const double> x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------- MultilinearMap

void MultilinearMap::finalize() {
  const unsigned corners = 1u << n_;
  coeffs_f_.assign(corners * n_, 0.0);
  components_.assign(n_, Polynomial(n_));
  for (unsigned a = 0; a < corners; ++a) {
    Monomial m{std::vector<int>(n_)};
    for (int i = 0; i < n_; ++i) m.exponents[i] = (a >> i) & 1u;
    for (int i = 0; i < n_; ++i) {
      coeffs_f_[a * n_ + i] = coeffs_[a][i].get_d();
      components_[i].add_term(m, coeffs_[a][i]);
    }
  }
}

MultilinearMap MultilinearMap::identity(int n) { return dilation(n, 1); }

MultilinearMap MultilinearMap::dilation(int n, const Rational& h) {
  std::vector<Rational> a(n * n), b(n);
  for (int i = 0; i < n; ++i) a[i * n + i] = h;
  return affine(n, a, b);
}

MultilinearMap MultilinearMap::affine(int n, std::span<const Rational> a,
                                      std::span<const Rational> b) {
  require(n >= 0 && static_cast<int>(a.size()) == n * n &&
              static_cast<int>(b.size()) == n,
          "MultilinearMap::affine: shape mismatch");
  MultilinearMap f;
  f.n_ = n;
  f.coeffs_.assign(1u << n, std::vector<Rational>(n));
  for (int i = 0; i < n; ++i) {
    f.coeffs_[0][i] = b[i];
    for (int j = 0; j < n; ++j) f.coeffs_[1u << j][i] = a[i * n + j];
  }
  f.finalize();
  return f;
}

MultilinearMap MultilinearMap::from_vertices(
    int n, const std::vector<std::vector<Rational>>& vertices) {
  require(n >= 0, "map_from_vertices: negative dimension");
  const unsigned corners = 1u << n;
  require(vertices.size() == corners,
          "map_from_vertices: expected " + std::to_string(corners) + " corners, got " +
              std::to_string(vertices.size()));
  for (const auto& v : vertices)
    require(static_cast<int>(v.size()) == n, "map_from_vertices: corner arity mismatch");

  MultilinearMap f;
  f.n_ = n;
  f.coeffs_.assign(corners, std::vector<Rational>(n));
  // Moebius inversion over the subset lattice of corner masks
  for (unsigned a = 0; a < corners; ++a) {
    for (unsigned b = a;; b = (b - 1) & a) {
      const int sign = (std::popcount(a ^ b) % 2) ? -1 : 1;
      for (int i = 0; i < n; ++i) {
        if (sign > 0) f.coeffs_[a][i] += vertices[b][i];
        else f.coeffs_[a][i] -= vertices[b][i];
      }
      if (b == 0) break;
    }
  }
  f.finalize();
  return f;
}

MultilinearMap MultilinearMap::from_vertices(
    int n, const std::vector<std::vector<double>>& vertices) {
  std::vector<std::vector<Rational>> exact;
  exact.reserve(vertices.size());
  for (const auto& v : vertices) {
    std::vector<Rational> p;
    for (double x : v) {
      require(std::isfinite(x), "map_from_vertices: non-finite coordinate");
      p.emplace_back(x);
    }
    exact.push_back(std::move(p));
  }
  return from_vertices(n, exact);
}

bool MultilinearMap::is_affine() const {
  for (unsigned a = 0; a < coeffs_.size(); ++a) {
    if (std::popcount(a) < 2) continue;
    for (const auto& c : coeffs_[a])
      if (sgn(c) != 0) return false;
  }
  return true;
}

MultilinearMap MultilinearMap::compose_affine(std::span<const Rational> a,
                                              std::span<const Rational> b) const {
  require(static_cast<int>(a.size()) == n_ * n_ && static_cast<int>(b.size()) == n_,
          "compose_affine: shape mismatch");
  MultilinearMap g;
  g.n_ = n_;
  g.coeffs_.assign(coeffs_.size(), std::vector<Rational>(n_));
  for (unsigned al = 0; al < coeffs_.size(); ++al)
    for (int i = 0; i < n_; ++i) {
      Rational s = (al == 0) ? Rational(b[i]) : Rational(0);
      for (int j = 0; j < n_; ++j) s += a[i * n_ + j] * coeffs_[al][j];
      g.coeffs_[al][i] = s;
    }
  g.finalize();
  return g;
}

void MultilinearMap::eval(std::span<const double> xhat, std::span<double> x) const {
  for (int i = 0; i < n_; ++i) x[i] = 0.0;
  const unsigned corners = 1u << n_;
  for (unsigned a = 0; a < corners; ++a) {
    double prod = 1.0;
    for (int i = 0; i < n_; ++i)
      if ((a >> i) & 1u) prod *= xhat[i];
    for (int i = 0; i < n_; ++i) x[i] += coeffs_f_[a * n_ + i] * prod;
  }
}

void MultilinearMap::jacobian_at(std::span<const double> xhat, std::span<double> jac) const {
  for (int i = 0; i < n_ * n_; ++i) jac[i] = 0.0;
  const unsigned corners = 1u << n_;
  for (unsigned a = 1; a < corners; ++a) {
    for (int j = 0; j < n_; ++j) {
      if (!((a >> j) & 1u)) continue;
      double prod = 1.0;
      for (int i = 0; i < n_; ++i)
        if (i != j && ((a >> i) & 1u)) prod *= xhat[i];
      for (int i = 0; i < n_; ++i) jac[i * n_ + j] += coeffs_f_[a * n_ + i] * prod;
    }
  }
}

// -------------------------------------------------------------- operations

MultilinearMap map_from_vertices(int n, const std::vector<std::vector<Rational>>& vertices) {
  return MultilinearMap::from_vertices(n, vertices);
}

Polynomial polynomial_det(std::span<const Polynomial> m, int size) {
  require(static_cast<int>(m.size()) == size * size, "polynomial_det: shape mismatch");
  if (size == 0) return Polynomial::constant(0, 1);  // caller fixes arity
  const int nv = m[0].nvars();
  if (size == 1) return m[0];
  Polynomial det(nv);
  std::vector<Polynomial> sub((size - 1) * (size - 1), Polynomial(nv));
  for (int c = 0; c < size; ++c) {
    if (m[c].is_zero()) continue;
    for (int i = 1; i < size; ++i)
      for (int j = 0, jj = 0; j < size; ++j) {
        if (j == c) continue;
        sub[(i - 1) * (size - 1) + jj++] = m[i * size + j];
      }
    Polynomial term = m[c] * polynomial_det(sub, size - 1);
    if (c % 2) det -= term;
    else det += term;
  }
  return det;
}

JacobianPoly jacobian(const MultilinearMap& f) {
  const int n = f.n();
  JacobianPoly jp;
  jp.n = n;
  jp.entries.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) jp.entries.push_back(f.component(i).derivative(j));
  jp.det = (n == 0) ? Polynomial::constant(0, 1) : polynomial_det(jp.entries, n);
  return jp;
}

bool check_diffeo(const MultilinearMap& f) {
  const int n = f.n();
  const Polynomial det = jacobian(f).det;
  constexpr int kGrid = 5;  // points 0, 1/4, ..., 1; includes every corner
  std::vector<int> idx(n, 0);
  std::vector<Rational> x(n);
  while (true) {
    for (int i = 0; i < n; ++i) x[i] = ratio(idx[i], kGrid - 1);
    if (sgn(det.evaluate(std::span<const Rational>(x))) <= 0) return false;
    int i = n - 1;
    while (i >= 0 && idx[i] == kGrid - 1) idx[i--] = 0;
    if (i < 0) return true;
    ++idx[i];
  }
}

DiffForm pullback_polynomial(const MultilinearMap& f, const DiffForm& v) {
  const int n = f.n();
  require(v.n() == n, "pullback_polynomial: dimension mismatch");
  const int k = v.k();
  const JacobianPoly jp = jacobian(f);
  const auto sigmas = enumerate_sigma(k, n);

  DiffForm out(n, k);
  std::vector<Polynomial> sub(k * k, Polynomial(n));
  for (const auto& [rows, p] : v.components()) {
    const Polynomial composed = p.compose(f.components());
    for (const auto& cols : sigmas) {
      Polynomial minor = Polynomial::constant(n, 1);
      if (k > 0) {
        for (int a = 0; a < k; ++a)
          for (int b = 0; b < k; ++b) sub[a * k + b] = jp(rows.entries[a], cols.entries[b]);
        minor = polynomial_det(sub, k);
      }
      if (minor.is_zero()) continue;
      out.add(cols, composed * minor);
    }
  }
  return out;
}

double small_det(std::span<const double> m, int size) {
  std::vector<double> a(m.begin(), m.end());
  double det = 1.0;
  for (int c = 0; c < size; ++c) {
    int p = c;
    for (int i = c + 1; i < size; ++i)
      if (std::abs(a[i * size + c]) > std::abs(a[p * size + c])) p = i;
    if (a[p * size + c] == 0.0) return 0.0;
    if (p != c) {
      for (int j = 0; j < size; ++j) std::swap(a[p * size + j], a[c * size + j]);
      det = -det;
    }
    det *= a[c * size + c];
    for (int i = c + 1; i < size; ++i) {
      const double fct = a[i * size + c] / a[c * size + c];
      for (int j = c; j < size; ++j) a[i * size + j] -= fct * a[c * size + j];
    }
  }
  return det;
}

std::vector<double> small_inverse(std::span<const double> m, int size, double* det_out) {
  std::vector<double> a(m.begin(), m.end());
  std::vector<double> inv(size * size, 0.0);
  for (int i = 0; i < size; ++i) inv[i * size + i] = 1.0;
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  double det = 1.0;
  for (int c = 0; c < size; ++c) {
    int p = c;
    for (int i = c + 1; i < size; ++i)
      if (std::abs(a[i * size + c]) > std::abs(a[p * size + c])) p = i;
    if (std::abs(a[p * size + c]) <= 1e-14 * scale || scale == 0.0)
      throw NumericalError("singular Jacobian");
    if (p != c) {
      for (int j = 0; j < size; ++j) {
        std::swap(a[p * size + j], a[c * size + j]);
        std::swap(inv[p * size + j], inv[c * size + j]);
      }
      det = -det;
    }
    const double piv = a[c * size + c];
    det *= piv;
    for (int j = 0; j < size; ++j) {
      a[c * size + j] /= piv;
      inv[c * size + j] /= piv;
    }
    for (int i = 0; i < size; ++i) {
      if (i == c) continue;
      const double fct = a[i * size + c];
      if (fct == 0.0) continue;
      for (int j = 0; j < size; ++j) {
        a[i * size + j] -= fct * a[c * size + j];
        inv[i * size + j] -= fct * inv[c * size + j];
      }
    }
  }
  if (det_out) *det_out = det;
  return inv;
}

std::vector<double> compound_matrix(std::span<const double> m, int n, int k) {
  const auto sigmas = enumerate_sigma(k, n);
  const int count = static_cast<int>(sigmas.size());
  std::vector<double> out(count * count);
  std::vector<double> sub(k * k);
  for (int t = 0; t < count; ++t)
    for (int s = 0; s < count; ++s) {
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          sub[a * k + b] = m[sigmas[t].entries[a] * n + sigmas[s].entries[b]];
      out[t * count + s] = (k == 0) ? 1.0 : small_det(sub, k);
    }
  return out;
}

std::map<IndexMap, double> pushforward_eval(const MultilinearMap& f, const DiffForm& w,
                                            std::span<const double> xhat) {
  const int n = f.n();
  require(w.n() == n && static_cast<int>(xhat.size()) == n,
          "pushforward_eval: dimension mismatch");
  std::vector<double> jac(n * n);
  f.jacobian_at(xhat, jac);
  std::vector<double> inv;
  try {
    inv = small_inverse(jac, n, nullptr);
  } catch (const NumericalError&) {
    throw NumericalError("pushforward_eval: singular Jacobian at xhat = " + point_string(xhat));
  }
  const int k = w.k();
  const auto sigmas = enumerate_sigma(k, n);
  const int count = static_cast<int>(sigmas.size());
  const std::vector<double> minors = compound_matrix(inv, n, k);

  std::vector<double> ref(count, 0.0);
  for (int t = 0; t < count; ++t) ref[t] = w.component(sigmas[t]).evaluate(xhat);

  std::map<IndexMap, double> out;
  for (int s = 0; s < count; ++s) {
    double v = 0.0;
    for (int t = 0; t < count; ++t) v += ref[t] * minors[t * count + s];
    out.emplace(sigmas[s], v);
  }
  return out;
}

}  // namespace cubeforms
