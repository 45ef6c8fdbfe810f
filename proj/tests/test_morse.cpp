#include "doctest.h"

#include <cmath>

#include "eulerint/morse.hpp"

using namespace eulerint;

namespace {

Vec vec2(double a, double b) {
  Vec u(2);
  u << a, b;
  return u;
}

CriticalPointDecl decl(double a, double b, int patch = 0) {
  CriticalPointDecl d;
  d.u = vec2(a, b);
  d.patch = patch;
  return d;
}

/// height-field critical points of the two-patch sphere live on the
/// rotated patch, where they are interior chart points
std::vector<CriticalPointDecl> sphere_height_points() {
  return {decl(M_PI / 2, 0.0, 1), decl(M_PI / 2, M_PI, 1)};
}

std::vector<CriticalPointDecl> standing_torus_points() {
  return {decl(M_PI / 2, 0.0), decl(M_PI / 2, M_PI), decl(3 * M_PI / 2, 0.0),
          decl(3 * M_PI / 2, M_PI)};
}

CriticalStratum point_stratum(const Vec& u, int patch = 0) {
  CriticalStratum st;
  st.m = 0;
  st.patch = patch;
  st.embed = [u](const Vec&) { return u; };
  return st;
}

CriticalStratum circle_stratum(std::function<Vec(double)> curve, int patch = 0) {
  CriticalStratum st;
  st.m = 1;
  st.patch = patch;
  st.domain.axes = {Axis{0.0, 2 * M_PI, true, AxisRule::Trapezoid}};
  st.embed = [curve](const Vec& s) { return curve(s[0]); };
  return st;
}

}  // namespace

TEST_CASE("point_index on the sphere height field") {
  const ManifoldSpec spec = make_sphere(1.0, true);
  const auto& fields = spec.field("height");

  SUBCASE("south pole is a minimum (index 0), north a maximum (index 2)") {
    const PointIndex south = point_index(spec.patches[1], fields[1], vec2(M_PI / 2, 0.0));
    CHECK(south.nu == 0);
    CHECK(south.sign == 1);
    const PointIndex north = point_index(spec.patches[1], fields[1], vec2(M_PI / 2, M_PI));
    CHECK(north.nu == 2);
    CHECK(north.sign == 1);
  }
  SUBCASE("a non-zero is rejected") {
    CHECK_THROWS_WITH_AS(point_index(spec.patches[0], fields[0], vec2(1.0, 1.0)),
                         doctest::Contains("|xi|^2"), std::invalid_argument);
  }
  SUBCASE("a degenerate zero points to the stratum path") {
    const auto& zsq = spec.field("z_squared");
    CHECK_THROWS_WITH_AS(point_index(spec.patches[0], zsq[0], vec2(M_PI / 2, 0.3)),
                         doctest::Contains("degenerate"), std::invalid_argument);
  }
}

TEST_CASE("point_index table of the standing torus height") {
  const ManifoldSpec spec = make_embedded_torus(2.0, 1.0);
  const ScalarField& f = spec.field("height")[0];
  std::vector<int> nus;
  int sum = 0;
  for (const auto& d : standing_torus_points()) {
    const PointIndex pi = point_index(spec.patches[0], f, d.u);
    nus.push_back(pi.nu);
    sum += pi.sign;
  }
  std::sort(nus.begin(), nus.end());
  CHECK(nus == std::vector<int>{0, 1, 1, 2});
  CHECK(sum == 0);
}

TEST_CASE("poincare_hopf_sum") {
  SUBCASE("sphere with height: chi = 2") {
    const ManifoldSpec spec = make_sphere(1.0, true);
    const PhResult r =
        poincare_hopf_sum(spec, "height", sphere_height_points(), {64, 64});
    CHECK(r.sum == 2);
  }
  SUBCASE("standing torus with height: chi = 0") {
    const ManifoldSpec spec = make_embedded_torus(2.0, 1.0);
    const PhResult r = poincare_hopf_sum(spec, "height", standing_torus_points(), {64, 64});
    CHECK(r.sum == 0);
  }
  SUBCASE("missing declaration is caught with coordinates") {
    const ManifoldSpec spec = make_embedded_torus(2.0, 1.0);
    std::vector<CriticalPointDecl> partial = {decl(M_PI / 2, 0.0), decl(M_PI / 2, M_PI),
                                              decl(3 * M_PI / 2, 0.0)};
    CHECK_THROWS_WITH_AS(poincare_hopf_sum(spec, "height", partial, {64, 64}),
                         doctest::Contains("undeclared zero"), std::runtime_error);
  }
  SUBCASE("declared index mismatch is an error") {
    const ManifoldSpec spec = make_embedded_torus(2.0, 1.0);
    auto pts = standing_torus_points();
    pts[0].expected_index = 1;  // actually 2 (top point) or 0; wrong on purpose
    CHECK_THROWS_WITH_AS(poincare_hopf_sum(spec, "height", pts, {64, 64}),
                         doctest::Contains("does not match"), std::runtime_error);
  }
  SUBCASE("product of spheres with summed heights: chi = 4") {
    const ManifoldSpec spec = make_product(make_sphere(1.0, true), make_sphere(1.0, true));
    REQUIRE(spec.patches.size() == 4);
    // both factors regular in the rotated x rotated patch (index 3)
    std::vector<CriticalPointDecl> pts;
    for (double a : {0.0, M_PI})
      for (double b : {0.0, M_PI}) {
        CriticalPointDecl d;
        d.u = Vec(4);
        d.u << M_PI / 2, a, M_PI / 2, b;
        d.patch = 3;
        pts.push_back(d);
      }
    const PhResult r = poincare_hopf_sum(spec, "height", pts, {24, 24, 24, 24});
    CHECK(r.sum == 4);
    std::vector<int> nus;
    for (const auto& row : r.rows) nus.push_back(row.nu);
    std::sort(nus.begin(), nus.end());
    CHECK(nus == std::vector<int>{0, 2, 2, 4});
  }
}

TEST_CASE("stationary phase approaches the index sum") {
  SUBCASE("sphere with height") {
    const ManifoldSpec spec = make_sphere(1.0, true);
    const StationaryPhaseResult r = stationary_phase_check(
        spec, "height", sphere_height_points(), {4.0, 16.0, 64.0}, {192, 192});
    CHECK(std::abs(r.rows[2].value - 2.0) < 0.05);
    // monotone approach from below (value = 2 - 2/t + quadrature dust)
    CHECK(r.rows[0].value < r.rows[1].value);
    CHECK(r.rows[1].value < r.rows[2].value);
    CHECK(r.hessian_residual < 1e-5);
    CHECK(r.det_identity_residual < 1e-6);
  }
  SUBCASE("standing torus with height") {
    const ManifoldSpec spec = make_embedded_torus(2.0, 1.0);
    const StationaryPhaseResult r = stationary_phase_check(
        spec, "height", standing_torus_points(), {64.0}, {192, 192});
    CHECK(std::abs(r.rows[0].value - 0.0) < 0.05);
    CHECK(r.hessian_residual < 1e-4);
  }
}

TEST_CASE("stratum_index") {
  SUBCASE("z^2 on the sphere: equator stratum") {
    const ManifoldSpec spec = make_sphere(1.0, true);
    const CriticalStratum eq = circle_stratum([](double s) { return vec2(M_PI / 2, s); }, 0);
    const StratumIndex si = stratum_index(spec, "z_squared", eq);
    CHECK(si.nu == 0);
    CHECK(si.chi == 0);
  }
  SUBCASE("z^2 on the sphere: each pole is an index-2 point stratum") {
    const ManifoldSpec spec = make_sphere(1.0, true);
    for (double phi : {0.0, M_PI}) {
      const StratumIndex si =
          stratum_index(spec, "z_squared", point_stratum(vec2(M_PI / 2, phi), 1));
      CHECK(si.nu == 2);
      CHECK(si.chi == 1);
    }
  }
  SUBCASE("flat-lying torus height: two circles of index 0 and 1") {
    const ManifoldSpec spec = make_embedded_torus(2.0, 1.0);
    const CriticalStratum top = circle_stratum([](double s) { return vec2(s, M_PI / 2); });
    const CriticalStratum bot = circle_stratum([](double s) { return vec2(s, 3 * M_PI / 2); });
    const StratumIndex si_top = stratum_index(spec, "height_lying", top);
    const StratumIndex si_bot = stratum_index(spec, "height_lying", bot);
    CHECK(si_top.nu == 1);
    CHECK(si_bot.nu == 0);
    CHECK(si_top.chi == 0);
    CHECK(si_bot.chi == 0);
  }
  SUBCASE("declared index/chi are verified") {
    const ManifoldSpec spec = make_embedded_torus(2.0, 1.0);
    CriticalStratum top = circle_stratum([](double s) { return vec2(s, M_PI / 2); });
    top.declared_nu = 0;  // actually 1
    CHECK_THROWS_WITH_AS(stratum_index(spec, "height_lying", top),
                         doctest::Contains("does not match"), std::runtime_error);
  }
  SUBCASE("non-critical declaration is rejected") {
    const ManifoldSpec spec = make_embedded_torus(2.0, 1.0);
    const CriticalStratum wrong = circle_stratum([](double s) { return vec2(s, 1.0); });
    CHECK_THROWS_AS(stratum_index(spec, "height_lying", wrong), std::invalid_argument);
  }
  SUBCASE("nondegenerate point declared as stratum is rejected toward point path") {
    // a zero-dimensional stratum at a nondegenerate zero works and gives chi=1
    const ManifoldSpec spec = make_embedded_torus(2.0, 1.0);
    const StratumIndex si =
        stratum_index(spec, "height", point_stratum(vec2(M_PI / 2, 0.0)));
    CHECK(si.nu == 2);
    CHECK(si.chi == 1);
  }
}

TEST_CASE("stratum_index with recursive gauss-bonnet: sphere stratum in S2 x S2") {
  const ManifoldSpec spec = make_product(make_sphere(1.0, true), make_sphere(1.0));
  REQUIRE(spec.patches.size() == 2);
  // critical set of z1^2: two pole spheres {p} x S^2 and the equator x S^2.
  // The pole spheres are regular in the rotated-first-factor patch (index 1).
  CriticalStratum pole_sphere;
  pole_sphere.m = 2;
  pole_sphere.patch = 1;
  pole_sphere.domain.axes = {Axis{0.0, M_PI, false, AxisRule::GaussLegendreCos},
                             Axis{0.0, 2 * M_PI, true, AxisRule::Trapezoid}};
  pole_sphere.embed = [](const Vec& s) {
    Vec u(4);
    u << M_PI / 2, M_PI, s[0], s[1];
    return u;
  };
  const StratumIndex si = stratum_index(spec, "f1.z_squared", pole_sphere);
  CHECK(si.nu == 2);
  CHECK(si.chi == 2);
  CHECK(si.chi_estimate == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("morse_bott_sum") {
  SUBCASE("z^2 on the sphere: 1 + 1 + 0 = 2") {
    const ManifoldSpec spec = make_sphere(1.0, true);
    std::vector<CriticalStratum> strata = {
        circle_stratum([](double s) { return vec2(M_PI / 2, s); }, 0),
        point_stratum(vec2(M_PI / 2, 0.0), 1), point_stratum(vec2(M_PI / 2, M_PI), 1)};
    const MorseBottResult r = morse_bott_sum(spec, "z_squared", strata, {64, 64});
    CHECK(r.sum == 2);
  }
  SUBCASE("flat-lying torus height: 0 + 0 = 0") {
    const ManifoldSpec spec = make_embedded_torus(2.0, 1.0);
    std::vector<CriticalStratum> strata = {
        circle_stratum([](double s) { return vec2(s, M_PI / 2); }),
        circle_stratum([](double s) { return vec2(s, 3 * M_PI / 2); })};
    const MorseBottResult r = morse_bott_sum(spec, "height_lying", strata, {64, 64});
    CHECK(r.sum == 0);
    CHECK(r.rows[0].contribution == 0);
    CHECK(r.rows[1].contribution == 0);
  }
  SUBCASE("nondegenerate points as 0-strata agree with poincare_hopf_sum") {
    const ManifoldSpec spec = make_embedded_torus(2.0, 1.0);
    std::vector<CriticalStratum> strata;
    for (const auto& d : standing_torus_points()) strata.push_back(point_stratum(d.u));
    const MorseBottResult mb = morse_bott_sum(spec, "height", strata, {64, 64});
    const PhResult ph = poincare_hopf_sum(spec, "height", standing_torus_points(), {64, 64});
    CHECK(mb.sum == ph.sum);
  }
  SUBCASE("coverage failure is reported") {
    const ManifoldSpec spec = make_sphere(1.0, true);
    std::vector<CriticalStratum> strata = {
        circle_stratum([](double s) { return vec2(M_PI / 2, s); }, 0)};  // poles missing
    CHECK_THROWS_WITH_AS(morse_bott_sum(spec, "z_squared", strata, {64, 64}),
                         doctest::Contains("undeclared zero"), std::runtime_error);
  }
}

TEST_CASE("hessian identity on strata") {
  const ManifoldSpec spec = make_sphere(1.0, true);
  const ScalarField& f = spec.field("z_squared")[0];
  for (double s : {0.3, 1.7}) {
    const double r = hessian_identity_residual(spec.patches[0], f, vec2(M_PI / 2, s));
    CHECK(r < 1e-4);
  }
}

TEST_CASE("gauss_equation_check") {
  SUBCASE("equator of the round sphere under z^2: geodesic, flat stratum") {
    const ManifoldSpec spec = make_sphere(1.0, true);
    const CriticalStratum eq = circle_stratum([](double s) { return vec2(M_PI / 2, s); }, 0);
    const GaussEquationReport rep = gauss_equation_check(spec, "z_squared", eq);
    CHECK(rep.max_residual < 1e-3);
    CHECK(rep.frame_orthogonality < 1e-6);
    // great circles are geodesics: II vanishes along the equator
    CHECK(rep.ii_formula.cwiseAbs().maxCoeff() < 1e-4);
    CHECK(rep.ii_direct.cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("latitude circle: II from third derivatives matches direct covariant II") {
    // phi = (z - c)^2 vanishes to second order on the latitude z = c, which
    // has geodesic curvature cot(theta_c)
    const ManifoldSpec spec = make_sphere(1.0);
    ManifoldSpec mutable_spec = spec;
    const EmbedFn embed = spec.patches[0].embed;
    const double c = 0.36;
    mutable_spec.fields["band"] = {ScalarField{[embed, c](const Vec& u) {
      const double z = embed(u)[2];
      return (z - c) * (z - c);
    }}};
    const double theta_c = std::acos(c);
    const CriticalStratum lat =
        circle_stratum([theta_c](double s) { return vec2(theta_c, s); });
    const GaussEquationReport rep = gauss_equation_check(mutable_spec, "band", lat);
    REQUIRE(rep.ii_formula.rows() == 1);
    CHECK(rep.ii_formula(0, 0) == doctest::Approx(rep.ii_direct(0, 0)).epsilon(1e-3));
    CHECK(std::abs(rep.ii_formula(0, 0)) ==
          doctest::Approx(std::abs(std::cos(theta_c) / std::sin(theta_c))).epsilon(1e-3));
    CHECK(rep.max_residual < 1e-6);  // m = 1: all tangential curvature vanishes
  }
  SUBCASE("totally geodesic pole sphere in S2 x S2: R_tilde equals ambient R") {
    const ManifoldSpec spec = make_product(make_sphere(1.0, true), make_sphere(1.0));
    CriticalStratum pole_sphere;
    pole_sphere.m = 2;
    pole_sphere.patch = 1;
    pole_sphere.domain.axes = {Axis{0.0, M_PI, false, AxisRule::GaussLegendreCos},
                               Axis{0.0, 2 * M_PI, true, AxisRule::Trapezoid}};
    pole_sphere.embed = [](const Vec& s) {
      Vec u(4);
      u << M_PI / 2, M_PI, s[0], s[1];
      return u;
    };
    const GaussEquationReport rep = gauss_equation_check(spec, "f1.z_squared", pole_sphere);
    CHECK(rep.max_residual < 1e-3);
    CHECK(rep.ii_formula.cwiseAbs().maxCoeff() < 1e-3);
  }
  SUBCASE("flat stratum in a flat ambient: R = S = Rtilde = 0") {
    ManifoldSpec spec = make_flat_torus({2 * M_PI, 2 * M_PI, 2 * M_PI, 2 * M_PI});
    spec.fields["wells"] = {ScalarField{[](const Vec& u) {
      return 2.0 * (1.0 - std::cos(u[2])) + 2.0 * (1.0 - std::cos(u[3]));
    }}};
    CriticalStratum flat;
    flat.m = 2;
    flat.domain.axes = {Axis{0.0, 2 * M_PI, true, AxisRule::Trapezoid},
                        Axis{0.0, 2 * M_PI, true, AxisRule::Trapezoid}};
    flat.embed = [](const Vec& s) {
      Vec u(4);
      u << s[0], s[1], 0.0, 0.0;
      return u;
    };
    const GaussEquationReport rep = gauss_equation_check(spec, "wells", flat);
    CHECK(rep.max_residual < 1e-8);
    CHECK(rep.ii_formula.cwiseAbs().maxCoeff() < 1e-8);
    CHECK(rep.ii_direct.cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("curved graph torus in the flat 4-torus: nonzero S against intrinsic curvature") {
    // phi = 2(1 - cos(u3 - F)) + 2(1 - cos u4), F = a sin u1 sin u2: the
    // stratum {u3 = F, u4 = 0} is a curved graph torus in a flat ambient,
    // so R_tilde = -S nontrivially.
    ManifoldSpec spec = make_flat_torus({2 * M_PI, 2 * M_PI, 2 * M_PI, 2 * M_PI});
    const double a = 0.4;
    auto F = [a](double x, double y) { return a * std::sin(x) * std::sin(y); };
    spec.fields["graph"] = {ScalarField{[F](const Vec& u) {
      return 2.0 * (1.0 - std::cos(u[2] - F(u[0], u[1]))) + 2.0 * (1.0 - std::cos(u[3]));
    }}};
    CriticalStratum graph;
    graph.m = 2;
    graph.domain.axes = {Axis{0.0, 2 * M_PI, true, AxisRule::Trapezoid},
                         Axis{0.0, 2 * M_PI, true, AxisRule::Trapezoid}};
    graph.embed = [F](const Vec& s) {
      Vec u(4);
      u << s[0], s[1], F(s[0], s[1]), 0.0;
      return u;
    };
    const StratumIndex si = stratum_index(spec, "graph", graph);
    CHECK(si.nu == 0);
    CHECK(si.chi == 0);  // torus
    const GaussEquationReport rep = gauss_equation_check(spec, "graph", graph, 5);
    CHECK(rep.max_residual < 1e-3);
    // II really is nonzero here
    CHECK(rep.ii_formula.cwiseAbs().maxCoeff() > 0.05);
    CHECK((rep.ii_formula - rep.ii_direct).cwiseAbs().maxCoeff() < 1e-3);
  }
}
