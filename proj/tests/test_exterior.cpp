#include "doctest.h"

#include <random>

#include "eulerint/exterior.hpp"

using namespace eulerint;

namespace {

ExteriorElement random_element(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ExteriorElement e(n);
  for (Mask m = 0; m < (1u << n); ++m) e.at(m) = dist(rng);
  return e;
}

BiForm random_biform(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  BiForm b(n);
  for (Mask l = 0; l < (1u << n); ++l)
    for (Mask r = 0; r < (1u << n); ++r) b.at(l, r) = dist(rng);
  return b;
}

BiForm random_nilpotent(int n, std::mt19937& rng) {
  BiForm b = random_biform(n, rng);
  b.at(0, 0) = 0.0;
  return b;
}

}  // namespace

TEST_CASE("wedge on basis elements") {
  const int n = 3;
  const auto e1 = ExteriorElement::basis(n, 0b001);
  const auto e2 = ExteriorElement::basis(n, 0b010);

  SUBCASE("e1 ^ e2 = +e12") {
    const auto w = wedge(e1, e2);
    CHECK(w.coeff(0b011) == doctest::Approx(1.0));
  }
  SUBCASE("e2 ^ e1 = -e12") {
    const auto w = wedge(e2, e1);
    CHECK(w.coeff(0b011) == doctest::Approx(-1.0));
  }
  SUBCASE("v ^ v = 0") {
    const auto v = e1 + e2;
    CHECK(wedge(v, v).is_zero(1e-15));
  }
  SUBCASE("dimension mismatch rejected") {
    CHECK_THROWS_AS(wedge(e1, ExteriorElement::basis(2, 1)), std::invalid_argument);
  }
}

TEST_CASE("wedge supercommutativity, exhaustive basis, n <= 4") {
  for (int n = 1; n <= 4; ++n) {
    for (Mask a = 0; a < (1u << n); ++a)
      for (Mask b = 0; b < (1u << n); ++b) {
        const auto ea = ExteriorElement::basis(n, a);
        const auto eb = ExteriorElement::basis(n, b);
        const auto ab = wedge(ea, eb);
        auto ba = wedge(eb, ea);
        const int sign = ((std::popcount(a) * std::popcount(b)) % 2) ? -1 : 1;
        ba *= sign;
        auto diff = ab - ba;
        CHECK(diff.is_zero(0.0));
      }
  }
}

TEST_CASE("biform product basics") {
  const int n = 2;
  const auto e1_left = BiForm::basis(n, 0b01, 0);   // e1 (x) 1
  const auto e1_right = BiForm::basis(n, 0, 0b01);  // 1 (x) e1

  SUBCASE("(e1 (x) 1)(1 (x) e1) = e1 (x) e1, no sign") {
    const auto p = biform_mul(e1_left, e1_right);
    CHECK(p.coeff(0b01, 0b01) == doctest::Approx(1.0));
  }
  SUBCASE("(1 (x) e1)(e1 (x) 1) = -(e1 (x) e1)") {
    const auto p = biform_mul(e1_right, e1_left);
    CHECK(p.coeff(0b01, 0b01) == doctest::Approx(-1.0));
  }
  SUBCASE("unit is neutral") {
    std::mt19937 rng(7);
    const auto x = random_biform(n, rng);
    const auto u = BiForm::unit(n);
    auto d1 = biform_mul(u, x) - x;
    auto d2 = biform_mul(x, u) - x;
    CHECK(d1.is_zero(0.0));
    CHECK(d2.is_zero(0.0));
  }
}

TEST_CASE("biform product is associative") {
  std::mt19937 rng(11);
  for (int n = 2; n <= 4; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto x = random_biform(n, rng);
      const auto y = random_biform(n, rng);
      const auto z = random_biform(n, rng);
      const auto left = biform_mul(biform_mul(x, y), z);
      const auto right = biform_mul(x, biform_mul(y, z));
      auto diff = left - right;
      CHECK(diff.max_abs() < 1e-12 * std::max(1.0, left.max_abs()));
    }
  }
}

TEST_CASE("biform_exp") {
  SUBCASE("exp(0) = unit") {
    const auto e = biform_exp(BiForm::zero(2));
    auto d = e - BiForm::unit(2);
    CHECK(d.is_zero(0.0));
  }
  SUBCASE("n=1: exp(e1 (x) e1) = unit + e1 (x) e1") {
    const auto x = BiForm::basis(1, 1, 1);
    const auto e = biform_exp(x);
    auto d = e - (BiForm::unit(1) + x);
    CHECK(d.is_zero(0.0));
  }
  SUBCASE("matches brute-force truncated series, n=3") {
    std::mt19937 rng(3);
    for (int rep = 0; rep < 10; ++rep) {
      const auto x = random_nilpotent(3, rng);
      const auto e = biform_exp(x);
      // independent truncated series: sum_{k<=6} x^k / k!
      BiForm sum = BiForm::unit(3);
      BiForm p = BiForm::unit(3);
      double fact = 1.0;
      for (int k = 1; k <= 6; ++k) {
        p = biform_mul(p, x);
        fact *= k;
        sum += (1.0 / fact) * p;
      }
      auto d = e - sum;
      CHECK(d.max_abs() < 1e-12 * std::max(1.0, sum.max_abs()));
    }
  }
  SUBCASE("nonzero scalar part rejected") {
    auto x = BiForm::unit(2);
    CHECK_THROWS_AS(biform_exp(x), std::invalid_argument);
  }
  SUBCASE("exp(x+y) = exp(x) exp(y) for commuting x, y") {
    // commuting pair of the integrand type: a (2,2) and a (1,1) square
    const int n = 4;
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    BiForm f(n), w(n);
    for (Mask l = 0; l < 16u; ++l)
      for (Mask r = 0; r < 16u; ++r) {
        if (std::popcount(l) == 2 && std::popcount(r) == 2) f.at(l, r) = dist(rng);
        if (std::popcount(l) == 1 && std::popcount(r) == 1) w.at(l, r) = dist(rng);
      }
    const auto w2 = biform_mul(w, w);
    auto comm = biform_mul(f, w2) - biform_mul(w2, f);
    REQUIRE(comm.is_zero(1e-13));
    const auto lhs = biform_exp(f + w2);
    const auto rhs = biform_mul(biform_exp(f), biform_exp(w2));
    auto d = lhs - rhs;
    CHECK(d.max_abs() < 1e-12 * std::max(1.0, rhs.max_abs()));
  }
}

TEST_CASE("top_pairing and part") {
  const int n = 2;
  const Mask full = 0b11;

  SUBCASE("vol (x) vol pairs to 1") {
    CHECK(top_pairing(BiForm::basis(n, full, full)) == doctest::Approx(1.0));
  }
  SUBCASE("below top degree pairs to 0") {
    CHECK(top_pairing(BiForm::basis(n, 0b01, 0b01)) == doctest::Approx(0.0));
  }
  SUBCASE("part selects bidegree") {
    auto u = BiForm::unit(n);
    auto p00 = part(u, 0, 0);
    auto d0 = p00 - u;
    CHECK(d0.is_zero(0.0));
    const auto x = BiForm::basis(n, 0b01, 0b10);
    auto p11 = part(x, 1, 1);
    auto d1 = p11 - x;
    CHECK(d1.is_zero(0.0));
    CHECK(part(x, 2, 2).is_zero(0.0));
  }
  SUBCASE("parts partition any element") {
    std::mt19937 rng(23);
    for (int dim = 1; dim <= 4; ++dim) {
      const auto x = random_biform(dim, rng);
      BiForm sum(dim);
      for (int k = 0; k <= dim; ++k)
        for (int l = 0; l <= dim; ++l) sum += part(x, k, l);
      auto d = sum - x;
      CHECK(d.is_zero(0.0));
    }
  }
}

TEST_CASE("exterior exp and even matrices") {
  SUBCASE("exterior_exp terminates and matches series") {
    std::mt19937 rng(5);
    auto x = random_element(3, rng);
    x.at(0) = 0.0;
    const auto e = exterior_exp(x);
    ExteriorElement sum = ExteriorElement::unit(3);
    ExteriorElement p = ExteriorElement::unit(3);
    double fact = 1.0;
    for (int k = 1; k <= 3; ++k) {
      p = wedge(p, x);
      fact *= k;
      sum += (1.0 / fact) * p;
    }
    auto d = e - sum;
    CHECK(d.max_abs() < 1e-14);
  }
  SUBCASE("EvenFormMatrix rejects odd entries") {
    EvenFormMatrix m(2, 2);
    CHECK_THROWS_AS(m.set(0, 0, ExteriorElement::basis(2, 0b01)), std::invalid_argument);
    CHECK_NOTHROW(m.set(0, 1, ExteriorElement::basis(2, 0b11)));
  }
}
