#include "cubeforms/meshlab.hpp"

#include "cubeforms/linalg.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace cubeforms {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::domain_error(what);
}

// Calls fn(idx) for every idx in {0..N-1}^n, last coordinate fastest.
template <class Fn>
void for_each_cell(int n, int subdivisions, Fn fn) {
  std::vector<int> idx(n, 0);
  while (true) {
    fn(idx);
    int i = n - 1;
    while (i >= 0 && idx[i] == subdivisions - 1) idx[i--] = 0;
    if (i < 0) return;
    ++idx[i];
  }
}

using VertexFn = std::function<std::vector<Rational>(const std::vector<int>&)>;

Mesh mesh_from_vertices(const MeshSpec& spec, int subdivisions, const VertexFn& vertex) {
  require(subdivisions >= 1, "mesh: need N >= 1");
  const int n = spec.n;
  Mesh mesh;
  mesh.n = n;
  mesh.subdivisions = subdivisions;
  mesh.spec = spec;
  std::vector<int> corner(n);
  for_each_cell(n, subdivisions, [&](const std::vector<int>& cell) {
    std::vector<std::vector<Rational>> verts;
    verts.reserve(1u << n);
    for (unsigned a = 0; a < (1u << n); ++a) {
      for (int i = 0; i < n; ++i) corner[i] = cell[i] + static_cast<int>((a >> i) & 1u);
      verts.push_back(vertex(corner));
    }
    MultilinearMap f = MultilinearMap::from_vertices(n, verts);
    if (!check_diffeo(f)) {
      std::ostringstream os;
      os << "mesh: element " << mesh.elements.size() << " of family " << to_string(spec.family)
         << " is not an orientation-preserving diffeomorphism";
      throw std::domain_error(os.str());
    }
    mesh.elements.push_back(std::move(f));
  });
  return mesh;
}

// Interior offset (d/2)(-1)^parity / N, zero on the clamped rows.
Rational offset(const Rational& half_d, int parity, int j, int subdivisions) {
  if (j == 0 || j == subdivisions) return 0;
  return (parity % 2 == 0) ? half_d : Rational(-half_d);
}

void check_distortion(int subdivisions, double distortion, const char* who) {
  require(subdivisions >= 2 && subdivisions % 2 == 0,
          std::string(who) + ": N must be even and >= 2");
  require(distortion >= 0.0 && distortion < 1.0, std::string(who) + ": need 0 <= d < 1");
}

}  // namespace

std::string to_string(MeshFamily family) {
  switch (family) {
    case MeshFamily::uniform: return "uniform";
    case MeshFamily::parallelotope: return "parallelotope";
    case MeshFamily::trapezoidal: return "trapezoidal";
    case MeshFamily::trilinear3d: return "trilinear3d";
  }
  return "unknown";
}

MeshFamily parse_mesh_family(const std::string& name) {
  if (name == "uniform") return MeshFamily::uniform;
  if (name == "parallelotope") return MeshFamily::parallelotope;
  if (name == "trapezoidal") return MeshFamily::trapezoidal;
  if (name == "trilinear3d") return MeshFamily::trilinear3d;
  throw std::domain_error("unknown mesh family '" + name + "'");
}

Mesh mesh_uniform(int n, int subdivisions) {
  require(n >= 1, "mesh_uniform: need n >= 1");
  MeshSpec spec{MeshFamily::uniform, n, 0.0, {}};
  return mesh_from_vertices(spec, subdivisions, [&](const std::vector<int>& v) {
    std::vector<Rational> p(n);
    for (int i = 0; i < n; ++i) p[i] = ratio(v[i], subdivisions);
    return p;
  });
}

Mesh mesh_parallelotope(int n, int subdivisions, std::span<const double> shear) {
  require(n >= 1, "mesh_parallelotope: need n >= 1");
  require(static_cast<int>(shear.size()) == n * n, "mesh_parallelotope: shear must be n x n");
  std::vector<Rational> a(n * n);
  std::vector<double> af(n * n);
  for (int i = 0; i < n * n; ++i) {
    require(std::isfinite(shear[i]), "mesh_parallelotope: non-finite shear");
    a[i] = Rational(shear[i]);
    if (i / n == i % n) a[i] += 1;
    af[i] = a[i].get_d();
  }
  RationalMatrix am(n, n);
  for (int i = 0; i < n * n; ++i) am(i / n, i % n) = a[i];
  require(sgn(determinant(am)) > 0, "mesh_parallelotope: I + shear must have positive determinant");

  MeshSpec spec{MeshFamily::parallelotope, n, 0.0, std::vector<double>(shear.begin(), shear.end())};
  return mesh_from_vertices(spec, subdivisions, [&](const std::vector<int>& v) {
    std::vector<Rational> p(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) p[i] += a[i * n + j] * ratio(v[j], subdivisions);
    return p;
  });
}

Mesh mesh_trapezoidal(int subdivisions, double distortion) {
  check_distortion(subdivisions, distortion, "mesh_trapezoidal");
  const Rational half_d = Rational(distortion) / 2;
  MeshSpec spec{MeshFamily::trapezoidal, 2, distortion, {}};
  return mesh_from_vertices(spec, subdivisions, [&](const std::vector<int>& v) {
    const int i = v[0], j = v[1];
    return std::vector<Rational>{
        ratio(i, subdivisions),
        (Rational(j) + offset(half_d, i + j, j, subdivisions)) / subdivisions};
  });
}

Mesh mesh_trilinear_3d(int subdivisions, double distortion) {
  check_distortion(subdivisions, distortion, "mesh_trilinear_3d");
  const Rational half_d = Rational(distortion) / 2;
  MeshSpec spec{MeshFamily::trilinear3d, 3, distortion, {}};
  return mesh_from_vertices(spec, subdivisions, [&](const std::vector<int>& v) {
    const int i = v[0], j = v[1], l = v[2];
    const bool interior = i > 0 && i < subdivisions && j > 0 && j < subdivisions;
    return std::vector<Rational>{
        ratio(i, subdivisions),
        (Rational(j) + offset(half_d, i + j, j, subdivisions)) / subdivisions,
        (Rational(l) + (interior ? offset(half_d, i + j + l, l, subdivisions) : Rational(0))) /
            subdivisions};
  });
}

Mesh build_mesh(const MeshSpec& spec, int subdivisions) {
  switch (spec.family) {
    case MeshFamily::uniform: return mesh_uniform(spec.n, subdivisions);
    case MeshFamily::parallelotope: return mesh_parallelotope(spec.n, subdivisions, spec.shear);
    case MeshFamily::trapezoidal:
      require(spec.n == 2, "trapezoidal meshes are two-dimensional");
      return mesh_trapezoidal(subdivisions, spec.distortion);
    case MeshFamily::trilinear3d:
      require(spec.n == 3, "trilinear3d meshes are three-dimensional");
      return mesh_trilinear_3d(subdivisions, spec.distortion);
  }
  throw std::domain_error("build_mesh: unknown family");
}

Rational mesh_volume(const Mesh& mesh) {
  Rational total = 0;
  for (const auto& f : mesh.elements) total += jacobian(f).det.integrate_unit_cube();
  return total;
}

// -------------------------------------------------------------- quadrature

QuadratureRule gauss_rule(int n, int q) {
  require(n >= 0, "gauss_rule: need n >= 0");
  require(q >= 1 && q <= 20, "gauss_rule: need 1 <= q <= 20");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(q), &gsl_integration_glfixed_table_free);
  if (!table) throw std::runtime_error("gauss_rule: GSL table allocation failed");
  std::vector<double> x1(q), w1(q);
  for (int i = 0; i < q; ++i)
    gsl_integration_glfixed_point(0.0, 1.0, static_cast<std::size_t>(i), &x1[i], &w1[i], table.get());

  QuadratureRule rule;
  rule.n = n;
  rule.order = q;
  std::vector<int> idx(n, 0);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      rule.points.push_back(x1[idx[i]]);
      w *= w1[idx[i]];
    }
    rule.weights.push_back(w);
    int i = n - 1;
    while (i >= 0 && idx[i] == q - 1) idx[i--] = 0;
    if (i < 0) break;
    ++idx[i];
  }
  return rule;
}

// ----------------------------------------------------------------- targets

void TargetForm::evaluate(std::span<const double> x, std::span<double> out) const {
  for (std::size_t m = 0; m < components.size(); ++m) out[m] = components[m](x);
}

TargetForm trig_target(int n, int k) {
  require(k >= 0 && k <= n, "trig_target: need 0 <= k <= n");
  TargetForm t{n, k, "trig", {}};
  const int count = static_cast<int>(binomial(n, k));
  for (int m = 0; m < count; ++m) {
    const double phase = static_cast<double>(m) / (count + 1);
    t.components.emplace_back([n, phase](std::span<const double> x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += (i + 1) * x[i];
      return std::sin(std::numbers::pi * s + phase);
    });
  }
  return t;
}

TargetForm polynomial_target(const DiffForm& form) {
  TargetForm t{form.n(), form.k(), "poly", {}};
  for (const auto& sigma : enumerate_sigma(form.k(), form.n())) {
    auto p = std::make_shared<const Polynomial>(form.component(sigma));
    t.components.emplace_back([p](std::span<const double> x) { return p->evaluate(x); });
  }
  return t;
}

// ------------------------------------------------------------- tabulation

ReferenceTabulation::ReferenceTabulation(const FormSpace& space, QuadratureRule rule)
    : space_(space), rule_(std::move(rule)) {
  require(rule_.n == space_.n, "ReferenceTabulation: rule dimension mismatch");
  const auto sigmas = enumerate_sigma(space_.k, space_.n);
  components_ = static_cast<int>(sigmas.size());
  values_.assign(static_cast<std::size_t>(rule_.size()) * space_.dim() * components_, 0.0);
  for (int b = 0; b < space_.dim(); ++b)
    for (int t = 0; t < components_; ++t) {
      const Polynomial p = space_.basis[b].component(sigmas[t]);
      if (p.is_zero()) continue;
      for (int q = 0; q < rule_.size(); ++q)
        values_[(static_cast<std::size_t>(q) * space_.dim() + b) * components_ + t] =
            p.evaluate(rule_.point(q));
    }
}

LocalSystem assemble_local_system(const MultilinearMap& element,
                                  const ReferenceTabulation& tab, const TargetForm& target) {
  const int n = element.n();
  const FormSpace& space = tab.space();
  require(space.n == n && target.n == n && target.k == space.k,
          "assemble_local_system: (n, k) mismatch between element, space and target");
  const int comps = tab.components();
  const int dim = space.dim();
  const QuadratureRule& rule = tab.rule();

  LocalSystem sys;
  sys.matrix.setZero(static_cast<Eigen::Index>(rule.size()) * comps, dim);
  sys.rhs.setZero(static_cast<Eigen::Index>(rule.size()) * comps);

  std::vector<double> jac(n * n), x(n), u(comps);
  for (int q = 0; q < rule.size(); ++q) {
    const auto xhat = rule.point(q);
    element.jacobian_at(xhat, jac);
    double det = 0.0;
    std::vector<double> inv;
    try {
      inv = small_inverse(jac, n, &det);
    } catch (const NumericalError&) {
      det = 0.0;
    }
    if (!(det > 0.0)) {
      std::ostringstream os;
      os << "non-positive Jacobian determinant at quadrature point " << q;
      throw NumericalError(os.str());
    }
    const std::vector<double> minors = compound_matrix(inv, n, space.k);
    element.eval(xhat, x);
    target.evaluate(x, u);
    const double scale = std::sqrt(rule.weights[q] * det);
    for (int s = 0; s < comps; ++s) {
      const Eigen::Index row = static_cast<Eigen::Index>(q) * comps + s;
      for (int b = 0; b < dim; ++b) {
        double v = 0.0;
        for (int t = 0; t < comps; ++t) v += tab.value(q, b, t) * minors[t * comps + s];
        sys.matrix(row, b) = scale * v;
      }
      sys.rhs(row) = scale * u[s];
    }
  }
  return sys;
}

double element_l2_error(const MultilinearMap& element, const ReferenceTabulation& tab,
                        const TargetForm& target) {
  const LocalSystem sys = assemble_local_system(element, tab, target);
  if (sys.matrix.cols() == 0) return sys.rhs.norm();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys.matrix);
  if (qr.rank() < sys.matrix.cols()) {
    const auto diag = qr.matrixR().diagonal().cwiseAbs();
    std::ostringstream os;
    os << "rank-deficient local least-squares system (rank " << qr.rank() << " of "
       << sys.matrix.cols() << ", |R| diagonal ratio " << diag.minCoeff() / diag.maxCoeff()
       << "): basis dependent or quadrature too coarse";
    throw NumericalError(os.str());
  }
  const Eigen::VectorXd coeffs = qr.solve(sys.rhs);
  return (sys.matrix * coeffs - sys.rhs).norm();
}

double element_l2_error(const MultilinearMap& element, const FormSpace& space,
                        const TargetForm& target, const QuadratureRule& rule) {
  return element_l2_error(element, ReferenceTabulation(space, rule), target);
}

// ------------------------------------------------------------ convergence

int ConvergenceReport::predicted_rate() const {
  const bool affine = mesh.family == MeshFamily::uniform ||
                      mesh.family == MeshFamily::parallelotope;
  return affine ? prediction.s_affine : prediction.s_multilinear;
}

double ConvergenceReport::last_rate() const {
  if (rows.empty() || !rows.back().rate_pair) return std::nan("");
  return *rows.back().rate_pair;
}

int default_quadrature_order(const FormSpace& space) {
  int degree = space.r;
  for (const auto& f : space.basis)
    for (const auto& [s, p] : f.components())
      for (int i = 0; i < space.n; ++i) degree = std::max(degree, p.degree_in(i));
  return std::min(degree + 6, 20);
}

ConvergenceReport convergence_study(const MeshSpec& mesh_spec, const FormSpace& space,
                                    const TargetForm& target,
                                    const std::vector<int>& subdivisions,
                                    int quadrature_order, int threads) {
  require(!subdivisions.empty(), "convergence_study: empty N list");
  for (std::size_t i = 1; i < subdivisions.size(); ++i)
    require(subdivisions[i] > subdivisions[i - 1], "convergence_study: N list must increase");
  require(space.n == mesh_spec.n, "convergence_study: space and mesh dimensions differ");
  require(target.n == space.n && target.k == space.k,
          "convergence_study: target (n, k) does not match the space");
  if (quadrature_order <= 0) quadrature_order = default_quadrature_order(space);
  threads = std::max(threads, 1);

  ConvergenceReport report;
  report.mesh = mesh_spec;
  report.n = space.n;
  report.k = space.k;
  report.r = space.r;
  report.space_label = space.label;
  report.quadrature_order = quadrature_order;
  report.prediction = predict_rates(space);

  const ReferenceTabulation tab(space, gauss_rule(space.n, quadrature_order));

  for (int subdiv : subdivisions) {
    const Mesh mesh = build_mesh(mesh_spec, subdiv);
    const int count = static_cast<int>(mesh.elements.size());
    std::vector<double> err2(count, 0.0);
    std::vector<std::exception_ptr> failures(count);

    auto work = [&](int tid) {
      for (int e = tid; e < count; e += threads) {
        try {
          const double err = element_l2_error(mesh.elements[e], tab, target);
          err2[e] = err * err;
        } catch (...) {
          failures[e] = std::current_exception();
        }
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }
    for (int e = 0; e < count; ++e) {
      if (!failures[e]) continue;
      try {
        std::rethrow_exception(failures[e]);
      } catch (const std::exception& ex) {
        std::ostringstream os;
        os << "element " << e << " (N=" << subdiv << "): " << ex.what();
        throw NumericalError(os.str(), e);
      }
    }

    double total = 0.0;
    for (double v : err2) total += v;  // fixed element order
    ConvergenceRow row;
    row.subdivisions = subdiv;
    row.h = 1.0 / subdiv;
    row.error = std::sqrt(total);
    if (!(row.error > 0.0))
      throw NumericalError("convergence_study: zero error at N=" + std::to_string(subdiv) +
                           "; target lies in the discrete space");
    report.rows.push_back(row);
  }

  auto& rows = report.rows;
  for (std::size_t j = 1; j < rows.size(); ++j) {
    rows[j].rate_pair = std::log(rows[j - 1].error / rows[j].error) /
                        std::log(rows[j - 1].h / rows[j].h);
    const std::size_t first = j >= 2 ? j - 2 : 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(j - first + 1);
    for (std::size_t i = first; i <= j; ++i) {
      const double lx = std::log(rows[i].h), ly = std::log(rows[i].error);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    rows[j].rate_lsq = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return report;
}

}  // namespace cubeforms
