#include "doctest.h"

#include <cmath>
#include <random>

#include "eulerint/geometry.hpp"

using namespace eulerint;

namespace {

Vec point2(double a, double b) {
  Vec u(2);
  u << a, b;
  return u;
}

/// Uniform random point in the interior band of a patch domain.
Vec random_point(const ManifoldPatch& p, std::mt19937& rng, double margin = 0.15) {
  std::uniform_real_distribution<double> dist(margin, 1.0 - margin);
  Vec u(p.n);
  for (int i = 0; i < p.n; ++i) {
    const Axis& a = p.domain.axes[i];
    u[i] = a.lo + dist(rng) * (a.hi - a.lo);
  }
  return u;
}

}  // namespace

TEST_CASE("christoffel symbols") {
  SUBCASE("flat torus: all zero") {
    const ManifoldSpec spec = make_flat_torus();
    const auto gam = christoffel(spec.patches[0], point2(1.0, 2.0));
    for (const Mat& g : gam) CHECK(g.cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("round sphere: Gamma^theta_{phi phi} = -sin(theta) cos(theta)") {
    const ManifoldSpec spec = make_sphere(1.0);
    const double theta = 1.1;
    const auto gam = christoffel(spec.patches[0], point2(theta, 0.7));
    CHECK(gam[0](1, 1) == doctest::Approx(-std::sin(theta) * std::cos(theta)).epsilon(1e-8));
    CHECK(gam[1](0, 1) == doctest::Approx(std::cos(theta) / std::sin(theta)).epsilon(1e-8));
  }
  SUBCASE("symmetric in the lower pair for a generic metric") {
    Domain dom;
    dom.axes = {Axis{0.0, 1.0, false, AxisRule::GaussLegendre},
                Axis{0.0, 1.0, false, AxisRule::GaussLegendre}};
    MetricFn metric = [](const Vec& u) {
      Mat g(2, 2);
      const double a = 2.0 + std::sin(u[0] + 2 * u[1]);
      const double b = 0.3 * std::cos(u[0] * u[1]);
      const double c = 1.5 + 0.5 * std::cos(u[1]);
      g << a, b, b, c;
      return g;
    };
    const ManifoldSpec spec = make_custom(2, dom, metric);
    const auto gam = christoffel(spec.patches[0], point2(0.4, 0.6));
    for (int k = 0; k < 2; ++k) CHECK((gam[k] - gam[k].transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("degenerate metric is rejected") {
    Domain dom;
    dom.axes = {Axis{0.0, 1.0, false, AxisRule::GaussLegendre},
                Axis{0.0, 1.0, false, AxisRule::GaussLegendre}};
    MetricFn metric = [](const Vec&) {
      Mat g(2, 2);
      g << 1.0, 1.0, 1.0, 1.0;
      return g;
    };
    const ManifoldSpec spec = make_custom(2, dom, metric);
    CHECK_THROWS_AS(christoffel(spec.patches[0], point2(0.5, 0.5)), std::runtime_error);
  }
}

TEST_CASE("riemann tensor in the orthonormal frame") {
  SUBCASE("flat torus: zero") {
    const ManifoldSpec spec = make_flat_torus();
    const Tensor4 R = riemann_frame(spec.patches[0], point2(1.0, 2.5));
    CHECK(R.max_abs() < 1e-9);
  }
  SUBCASE("unit sphere: R_1212 = -1 in this convention (frozen)") {
    const ManifoldSpec spec = make_sphere(1.0);
    for (double theta : {0.6, 1.2, 2.2}) {
      const Tensor4 R = riemann_frame(spec.patches[0], point2(theta, 1.0));
      CHECK(R(0, 1, 0, 1) == doctest::Approx(-1.0).epsilon(1e-7));
    }
  }
  SUBCASE("radius-2 sphere scales as 1/r^2") {
    const ManifoldSpec spec = make_sphere(2.0);
    const Tensor4 R = riemann_frame(spec.patches[0], point2(1.3, 0.4));
    CHECK(R(0, 1, 0, 1) == doctest::Approx(-0.25).epsilon(1e-7));
  }
  SUBCASE("product manifold: mixed-block components vanish") {
    const ManifoldSpec spec = make_product(make_sphere(1.0), make_sphere(1.0));
    Vec u(4);
    u << 1.0, 0.3, 1.9, 2.0;
    const Tensor4 R = riemann_frame(spec.patches[0], u);
    double mixed = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            const bool b1 = i < 2, b2 = j < 2, b3 = k < 2, b4 = l < 2;
            if (!(b1 == b2 && b2 == b3 && b3 == b4))
              mixed = std::max(mixed, std::abs(R(i, j, k, l)));
          }
    CHECK(mixed < 1e-8);
    CHECK(R(0, 1, 0, 1) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(R(2, 3, 2, 3) == doctest::Approx(-1.0).epsilon(1e-6));
  }
}

TEST_CASE("riemann symmetries and first bianchi identity at random points") {
  std::mt19937 rng(2024);
  const std::vector<ManifoldSpec> specs = {make_sphere(1.0), make_embedded_torus(2.0, 1.0)};
  for (const auto& spec : specs) {
    const ManifoldPatch& patch = spec.patches[0];
    for (int rep = 0; rep < 50; ++rep) {
      const Vec u = random_point(patch, rng);
      const Tensor4 R = riemann_frame(patch, u);
      const int n = R.dim();
      double worst = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              worst = std::max(worst, std::abs(R(i, j, k, l) + R(j, i, k, l)));
              worst = std::max(worst, std::abs(R(i, j, k, l) + R(i, j, l, k)));
              worst = std::max(worst, std::abs(R(i, j, k, l) - R(k, l, i, j)));
              worst = std::max(worst,
                               std::abs(R(i, j, k, l) + R(i, k, l, j) + R(i, l, j, k)));
            }
      CHECK(worst < 1e-6);
    }
  }
}

TEST_CASE("covariant derivative of gradient one-forms") {
  SUBCASE("constant field: w = 0, |xi|^2 = 0") {
    const ManifoldSpec spec = make_sphere(1.0);
    const ScalarField f{[](const Vec&) { return 3.25; }};
    const auto d = covariant_oneform(spec.patches[0], f, point2(1.0, 2.0));
    CHECK(d.w.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(d.xiNormSq) < 1e-18);
  }
  SUBCASE("flat torus, phi = cos(u1): w_11 = -cos(u1), others 0") {
    const ManifoldSpec spec = make_flat_torus();
    const ScalarField f = spec.field("cos_angle")[0];
    const double x = 1.234;
    const auto d = covariant_oneform(spec.patches[0], f, point2(x, 0.5));
    CHECK(d.w(0, 0) == doctest::Approx(-std::cos(x)).epsilon(1e-8));
    CHECK(std::abs(d.w(0, 1)) < 1e-10);
    CHECK(std::abs(d.w(1, 0)) < 1e-10);
    CHECK(std::abs(d.w(1, 1)) < 1e-10);
    CHECK(d.xiNormSq == doctest::Approx(std::sin(x) * std::sin(x)).epsilon(1e-8));
  }
  SUBCASE("hessians of random smooth fields on the sphere are symmetric") {
    const ManifoldSpec spec = make_sphere(1.0);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
      const double a = coef(rng), b = coef(rng), c = coef(rng);
      const EmbedFn embed = spec.patches[0].embed;
      const ScalarField f{[=](const Vec& u) {
        const Vec p = embed(u);
        return a * p[0] + b * p[1] * p[2] + c * p[2] * p[2];
      }};
      const Vec u = random_point(spec.patches[0], rng);
      const auto d = covariant_oneform(spec.patches[0], f, u);
      CHECK((d.w - d.w.transpose()).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("finite-difference curvature converges at second order in the base kernel") {
  // plain central differences (no Richardson): halving the step shrinks
  // the error against the constant-curvature value by about 4x
  const ManifoldSpec spec = make_sphere(1.0);
  ManifoldPatch patch = spec.patches[0];
  patch.fd.richardson = false;
  auto err_at = [&](double h) {
    patch.fd.h = {h, h};
    const Tensor4 R = riemann_frame(patch, point2(1.1, 0.8));
    return std::abs(R(0, 1, 0, 1) + 1.0);
  };
  const double e1 = err_at(1e-2);
  const double e2 = err_at(5e-3);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("catalog manifolds") {
  SUBCASE("sphere area = 4 pi r^2") {
    const ManifoldSpec spec = make_sphere(1.0);
    const ManifoldPatch& p = spec.patches[0];
    const QuadratureGrid grid(p.domain, {64, 64});
    const double area = integrate(grid, [&](const Vec& u) {
      return std::sqrt(p.metric(u).determinant());
    });
    CHECK(area == doctest::Approx(4 * M_PI).epsilon(1e-6 / (4 * M_PI)));
  }
  SUBCASE("embedded torus area = 4 pi^2 R r") {
    const ManifoldSpec spec = make_embedded_torus(2.0, 1.0);
    const ManifoldPatch& p = spec.patches[0];
    const QuadratureGrid grid(p.domain, {64, 64});
    const double area = integrate(grid, [&](const Vec& u) {
      return std::sqrt(p.metric(u).determinant());
    });
    CHECK(area == doctest::Approx(4 * M_PI * M_PI * 2.0).epsilon(1e-5 / 80.0));
  }
  SUBCASE("two-patch sphere: weights sum to one and area is preserved") {
    const ManifoldSpec spec = make_sphere(1.0, true);
    REQUIRE(spec.patches.size() == 2);
    // partition of unity along a meridian sample
    for (double theta : {0.1, 0.5, 1.0, 1.6, 2.4, 3.0}) {
      const Vec u0 = point2(theta, 0.9);
      const Vec p = spec.patches[0].embed(u0);
      // same global point in patch-1 coordinates
      const double tp = std::acos(std::clamp(p[0], -1.0, 1.0));
      const double pp = std::atan2(p[1], -p[2]);
      const Vec u1 = point2(tp, pp);
      const Vec q = spec.patches[1].embed(u1);
      REQUIRE((p - q).norm() < 1e-12);
      CHECK(spec.patches[0].weight_at(u0) + spec.patches[1].weight_at(u1) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
    double area = 0.0;
    for (const auto& patch : spec.patches) {
      const QuadratureGrid grid(patch.domain, {192, 192});
      area += integrate(grid, [&](const Vec& u) {
        return std::sqrt(patch.metric(u).determinant()) * patch.weight_at(u);
      });
    }
    CHECK(area == doctest::Approx(4 * M_PI).epsilon(1e-6));
  }
  SUBCASE("flat torus has cos fields instead of a height") {
    const ManifoldSpec spec = make_flat_torus();
    CHECK_THROWS_AS(spec.field("height"), std::invalid_argument);
    CHECK_NOTHROW(spec.field("cos_angle"));
    CHECK_NOTHROW(spec.field("cos_sum"));
  }
  SUBCASE("product of flat tori is a flat 4-torus") {
    const ManifoldSpec spec = make_product(make_flat_torus(), make_flat_torus());
    Vec u(4);
    u << 0.3, 1.7, 2.9, 4.4;
    const Tensor4 R = riemann_frame(spec.patches[0], u);
    CHECK(R.max_abs() < 1e-9);
  }
  SUBCASE("unknown field name errors") {
    CHECK_THROWS_WITH_AS(make_sphere(1.0).field("no_such_field"),
                         doctest::Contains("no field named"), std::invalid_argument);
  }
  SUBCASE("metric agrees with the first fundamental form of the embedding") {
    std::mt19937 rng(71);
    std::vector<ManifoldSpec> specs = {make_sphere(1.3), make_sphere(1.0, true),
                                       make_embedded_torus(2.0, 0.7), make_flat_torus()};
    for (const auto& spec : specs) {
      for (const auto& patch : spec.patches) {
        REQUIRE(patch.embed);
        for (int rep = 0; rep < 5; ++rep) {
          const Vec u = random_point(patch, rng);
          const Vec p0 = patch.embed(u);
          Mat jac(p0.size(), patch.n);
          for (int i = 0; i < patch.n; ++i)
            jac.col(i) = fd::d1(patch.embed, u, i, patch.fd.h[i], true);
          const Mat first_ff = jac.transpose() * jac;
          CHECK((first_ff - patch.metric(u)).cwiseAbs().maxCoeff() < 1e-8);
        }
      }
    }
  }
  SUBCASE("metric evaluators are periodic along periodic axes") {
    for (const auto& spec : {make_embedded_torus(2.0, 1.0), make_flat_torus()}) {
      const ManifoldPatch& p = spec.patches[0];
      Vec u(2);
      u << 1.234, 2.345;
      for (int i = 0; i < p.n; ++i) {
        if (!p.domain.axes[i].periodic) continue;
        Vec shifted = u;
        shifted[i] += p.domain.axes[i].hi - p.domain.axes[i].lo;
        CHECK((p.metric(u) - p.metric(shifted)).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }
}
