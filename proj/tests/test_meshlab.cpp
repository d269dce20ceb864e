#include "cubeforms/experiment.hpp"
#include "cubeforms/meshlab.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace cubeforms;

namespace {

using Point = std::vector<Rational>;

// Exact images of the reference corners of every element.
std::set<Point> mesh_vertices(const Mesh& mesh) {
  std::set<Point> out;
  for (const auto& f : mesh.elements)
    for (unsigned a = 0; a < (1u << mesh.n); ++a) {
      Point p(mesh.n, 0);
      for (unsigned b = 0; b < (1u << mesh.n); ++b)
        if ((b & ~a) == 0)
          for (int i = 0; i < mesh.n; ++i) p[i] += f.coefficient(b)[i];
      out.insert(p);
    }
  return out;
}

double l2_error_on(const MultilinearMap& f, const FormSpace& v, const DiffForm& u, int q) {
  return element_l2_error(f, v, polynomial_target(u), gauss_rule(v.n, q));
}

}  // namespace

TEST_CASE("uniform meshes") {
  const Mesh one = mesh_uniform(2, 1);
  REQUIRE(one.elements.size() == 1);
  CHECK(one.elements[0].component(0) == Polynomial::variable(2, 0));
  const Mesh four = mesh_uniform(2, 2);
  REQUIRE(four.elements.size() == 4);
  for (const auto& f : four.elements)
    CHECK(jacobian(f).det == Polynomial::constant(2, ratio(1, 4)));
  for (int n = 2; n <= 3; ++n) CHECK(mesh_volume(mesh_uniform(n, 3)) == 1);
}

TEST_CASE("parallelotope meshes") {
  const std::vector<double> zero(4, 0.0), shear{0.0, 0.5, 0.0, 0.0};
  CHECK(mesh_vertices(mesh_parallelotope(2, 2, zero)) == mesh_vertices(mesh_uniform(2, 2)));
  const Mesh m = mesh_parallelotope(2, 4, shear);
  for (const auto& f : m.elements) CHECK(f.is_affine());
  CHECK(mesh_volume(m) == 1);
  const std::vector<double> stretch{0.5, 0.25, 0.0, 0.0};
  CHECK(mesh_volume(mesh_parallelotope(2, 2, stretch)) == ratio(3, 2));
  const std::vector<double> bad{-2.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(mesh_parallelotope(2, 2, bad), std::domain_error);
}

TEST_CASE("trapezoidal meshes") {
  CHECK(mesh_vertices(mesh_trapezoidal(4, 0.0)) == mesh_vertices(mesh_uniform(2, 4)));
  const auto verts = mesh_vertices(mesh_trapezoidal(2, 0.5));
  std::set<Rational> interior_heights;
  for (const auto& p : verts)
    if (p[1] != 0 && p[1] != 1) interior_heights.insert(p[1]);
  CHECK(interior_heights == std::set<Rational>{ratio(3, 8), ratio(5, 8)});
  const Mesh strong = mesh_trapezoidal(4, 0.9);
  for (const auto& f : strong.elements) CHECK(check_diffeo(f));
  CHECK(mesh_volume(mesh_trapezoidal(8, 0.3)) == 1);
  int nonaffine = 0;
  for (const auto& f : mesh_trapezoidal(8, 0.3).elements) nonaffine += !f.is_affine();
  CHECK(nonaffine == 64);
  CHECK_THROWS_AS(mesh_trapezoidal(3, 0.3), std::domain_error);
  CHECK_THROWS_AS(mesh_trapezoidal(4, 1.0), std::domain_error);
}

TEST_CASE("trilinear meshes") {
  CHECK(mesh_vertices(mesh_trilinear_3d(2, 0.0)) == mesh_vertices(mesh_uniform(3, 2)));
  int moved = 0;
  for (const auto& p : mesh_vertices(mesh_trilinear_3d(2, 0.4))) {
    const double z = p[2].get_d();
    if (std::abs(z - std::round(2 * z) / 2) > 1e-15) {
      ++moved;
      CHECK(z == doctest::Approx(0.5 - 0.1));
    }
  }
  CHECK(moved == 1);
  const Mesh m = mesh_trilinear_3d(4, 0.3);
  CHECK(std::abs(mesh_volume(m).get_d() - 1.0) < 1e-10);
  CHECK(mesh_volume(m) == 1);
  int nonplanar = 0;
  for (const auto& f : m.elements) nonplanar += !f.coefficient(7).empty() && f.coefficient(7)[2] != 0;
  CHECK(nonplanar > 0);
}

TEST_CASE("Gauss rules") {
  const auto mid = gauss_rule(1, 1);
  REQUIRE(mid.size() == 1);
  CHECK(mid.weights[0] == doctest::Approx(1.0));
  CHECK(mid.points[0] == doctest::Approx(0.5));
  const auto two = gauss_rule(1, 2);
  double s = 0.0;
  for (int i = 0; i < two.size(); ++i) s += two.weights[i] * std::pow(two.points[i], 3);
  CHECK(s == doctest::Approx(0.25).epsilon(1e-15));
  for (int n = 1; n <= 3; ++n) {
    const auto r = gauss_rule(n, 4);
    double w = 0.0;
    for (double x : r.weights) w += x;
    CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gauss_rule(2, 0), std::domain_error);
  CHECK_THROWS_AS(gauss_rule(2, 21), std::domain_error);
}

TEST_CASE("Gauss rules integrate tensor polynomials exactly") {
  std::mt19937 gen(51);
  for (int n = 1; n <= 3; ++n)
    for (int q = 1; q <= 6; ++q) {
      const Polynomial p = cftest::random_polynomial(gen, n, 2 * q - 1, 6);
      const auto rule = gauss_rule(n, q);
      double s = 0.0;
      for (int i = 0; i < rule.size(); ++i) s += rule.weights[i] * p.evaluate(rule.point(i));
      CHECK(s == doctest::Approx(p.integrate_unit_cube().get_d()).epsilon(1e-13).scale(1.0));
    }
  // per-variable degree 5 integrand from the q = 3 rule
  const FormSpace q5 = build_Qminus(5, 0, 2);
  DiffForm f(2, 0);
  for (const auto& b : q5.basis) f += cftest::random_rational(gen) * b;
  const auto rule = gauss_rule(2, 3);
  double s = 0.0;
  for (int i = 0; i < rule.size(); ++i)
    s += rule.weights[i] * f.component(IndexMap{{}, 2}).evaluate(rule.point(i));
  CHECK(std::abs(s - integrate_unit_cube(DiffForm::top(f.component(IndexMap{{}, 2}))).get_d()) < 1e-13);
}

TEST_CASE("targets in the mapped space are reproduced") {
  std::mt19937 gen(52);
  for (int n = 2; n <= 3; ++n)
    for (int k : {0, n}) {
      const auto f = random_multilinear_map(n, 600 + n, false);
      const FormSpace v = build_Qminus(1, k, n);
      // k = 0: u o F in Q1 whenever u is an affine function of x
      if (k == 0) {
        DiffForm u = DiffForm::scalar(Polynomial::constant(n, cftest::random_rational(gen)));
        for (int i = 0; i < n; ++i)
          u += DiffForm::scalar(cftest::random_rational(gen) * Polynomial::variable(n, i));
        CHECK(l2_error_on(f, v, u, 6) <= 1e-12);
      }
      // constants are always in the span on affine elements
      const auto g = random_multilinear_map(n, 700 + n, true);
      DiffForm one = k == 0 ? DiffForm::scalar(Polynomial::constant(n, 1))
                            : DiffForm::top(Polynomial::constant(n, 1));
      CHECK(l2_error_on(g, v, one, 6) <= 1e-12);
    }
}

TEST_CASE("distance from x1^2 to bilinears on the unit square") {
  const DiffForm u = DiffForm::scalar(Polynomial::monomial(Monomial{{2, 0}}));
  const double err = l2_error_on(MultilinearMap::identity(2), build_Qminus(1, 0, 2), u, 8);
  CHECK(err == doctest::Approx(cftest::legendre_distance_x2_to_p1()).epsilon(1e-13));
  CHECK(err == doctest::Approx(0.0745).epsilon(1e-3));
}

TEST_CASE("constant density on a trapezoid is not in the mapped lowest-order space") {
  const double d = 0.5;
  const auto f = map_from_vertices(2, {{0, 0}, {1, 0}, {0, Rational(1) - Rational(d)},
                                       {1, Rational(1) + Rational(d)}});
  const DiffForm u = DiffForm::top(Polynomial::constant(2, 1));
  const double err = l2_error_on(f, build_Qminus(1, 2, 2), u, 20);

  // brute force: physical candidate c / J(xhat), error^2 = int (1 - c/J)^2 J
  auto err2 = [&](double c) {
    return cftest::simpson_2d(
        [&](double xh, double) {
          const double j = 1 - d + 2 * d * xh;
          return (1 - c / j) * (1 - c / j) * j;
        },
        400);
  };
  double lo = 0.0, hi = 2.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (err2(m1) < err2(m2)) hi = m2;
    else lo = m1;
  }
  const double oracle = std::sqrt(err2((lo + hi) / 2));
  CHECK(err > 0.01);
  CHECK(err == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("errors do not increase under uniform refinement") {
  const FormSpace v = build_Qminus(1, 1, 2);
  const auto rep = convergence_study(MeshSpec{MeshFamily::uniform, 2, 0.0, {}}, v,
                                     trig_target(2, 1), {1, 2, 3, 4, 6, 8});
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    CHECK(rep.rows[i].error <= rep.rows[i - 1].error);
  CHECK_FALSE(rep.rows[0].rate_pair);
  CHECK(rep.rows[1].rate_pair);
}

TEST_CASE("raising the quadrature order barely moves the errors") {
  const struct {
    MeshSpec mesh;
    FormSpace space;
  } cases[] = {
      {MeshSpec{MeshFamily::trapezoidal, 2, 0.3, {}}, build_Qminus(2, 2, 2)},
      {MeshSpec{MeshFamily::trapezoidal, 2, 0.3, {}}, build_SrLambda1_2d(2)},
      {MeshSpec{MeshFamily::trapezoidal, 2, 0.3, {}}, build_serendipity(3, 2)},
      {MeshSpec{MeshFamily::trilinear3d, 3, 0.3, {}}, build_Qminus(1, 2, 3)},
  };
  for (const auto& c : cases) {
    CAPTURE(c.space.label);
    const auto target = trig_target(c.space.n, c.space.k);
    const int q = default_quadrature_order(c.space);
    const auto a = convergence_study(c.mesh, c.space, target, {2, 4}, q);
    const auto b = convergence_study(c.mesh, c.space, target, {2, 4}, q + 2);
    for (std::size_t i = 0; i < a.rows.size(); ++i)
      CHECK(std::abs(a.rows[i].error - b.rows[i].error) < 1e-3 * b.rows[i].error);
  }
}

TEST_CASE("thread count does not change the result") {
  const FormSpace v = build_Qminus(2, 1, 2);
  const MeshSpec mesh{MeshFamily::trapezoidal, 2, 0.3, {}};
  const auto one = convergence_study(mesh, v, trig_target(2, 1), {4, 8}, 0, 1);
  const auto three = convergence_study(mesh, v, trig_target(2, 1), {4, 8}, 0, 3);
  const auto again = convergence_study(mesh, v, trig_target(2, 1), {4, 8}, 0, 1);
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(one.rows[i].error == again.rows[i].error);
    CHECK(std::abs(one.rows[i].error - three.rows[i].error) <= 1e-14 * one.rows[i].error);
  }
}

TEST_CASE("convergence studies reject bad input") {
  const FormSpace v = build_Qminus(1, 0, 2);
  const MeshSpec mesh{MeshFamily::uniform, 2, 0.0, {}};
  CHECK_THROWS_AS(convergence_study(mesh, v, trig_target(2, 1), {2, 4}), std::domain_error);
  CHECK_THROWS_AS(convergence_study(mesh, v, trig_target(2, 0), {4, 2}), std::domain_error);
  CHECK_THROWS_AS(convergence_study(MeshSpec{MeshFamily::uniform, 3, 0.0, {}}, v,
                                    trig_target(2, 0), {2}),
                  std::domain_error);
}
