#pragma once

// Built-in oracle suites behind the `selftest` command. Each check pits a
// production code path against an independent brute-force route (matrix
// algebra on End(Lambda V), truncated series, finite differences) with
// fixed seeds, and reports the worst residual against its tolerance.

#include <random>
#include <string>
#include <vector>

#include "eulerint/clifford.hpp"
#include "eulerint/exterior.hpp"
#include "eulerint/integrand.hpp"
#include "eulerint/oscillator.hpp"

namespace eulerint {
namespace selfcheck {

inline Mat random_matrix(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
  return m;
}

inline Mat random_rotation(int n, std::mt19937& rng) {
  const Mat m = random_matrix(n, rng);
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

inline Mat random_antisymmetric(int n, std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Mat a = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = dist(rng);
      a(j, i) = -a(i, j);
    }
  return a;
}

/// Random tensor with the (anti)symmetries of a curvature tensor.
inline Tensor4 random_curvature_like(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor4 B(n), R(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) B(i, j, k, l) = dist(rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          R(i, j, k, l) = 0.125 * (B(i, j, k, l) - B(j, i, k, l) - B(i, j, l, k) +
                                   B(j, i, l, k) + B(k, l, i, j) - B(l, k, i, j) -
                                   B(k, l, j, i) + B(l, k, j, i));
  return R;
}

inline Tensor4 s2_curvature(double r1212) {
  Tensor4 R(2);
  R(0, 1, 0, 1) = r1212;
  R(1, 0, 0, 1) = -r1212;
  R(0, 1, 1, 0) = -r1212;
  R(1, 0, 1, 0) = r1212;
  return R;
}

/// Coefficients of exp(-t (h W + h^2 F)) on End(Lambda V), graded by the
/// semiclassical parameter h and truncated beyond h^n. Exact: the
/// h-valuation of (hW + h^2 F)^k is at least k.
inline std::vector<Mat> graded_witten_exp(const Mat& W, const Mat& F, double t, int n) {
  const long d = W.rows();
  std::vector<Mat> E(n + 1, Mat::Zero(d, d)), P(n + 1, Mat::Zero(d, d));
  E[0] = Mat::Identity(d, d);
  P[0] = Mat::Identity(d, d);
  double coef = 1.0;
  for (int k = 1; k <= n; ++k) {
    std::vector<Mat> Q(n + 1, Mat::Zero(d, d));
    for (int m = k; m <= n; ++m) {
      Q[m] += P[m - 1] * W;
      if (m >= 2) Q[m] += P[m - 2] * F;
    }
    P.swap(Q);
    coef *= -t / k;
    for (int m = k; m <= n; ++m) E[m] += coef * P[m];
  }
  return E;
}

/// alpha_j read off the End(Lambda V) route: the h^n coefficient of
/// str exp(-t(V + hW + h^2F)) equals e^{-tV} 2^n t^{n/2} sum_j t^j alpha_j.
/// In the graded truncation that coefficient is the exact t-polynomial
/// sum_k (-t)^k/k! str(P_k[n]) over the graded powers P_k = (hW + h^2F)^k,
/// so matching t-powers gives
///   alpha_j = (-1)^{n/2+j} str(P_{n/2+j}[n]) / (2^n (n/2+j)!).
inline std::vector<double> alpha_from_matrix_exponential(const Tensor4& R, const Mat& w) {
  const int n = R.dim();
  const int half = n / 2;
  const Mat W = witten_w_matrix(w).matrix();
  const Mat F = curvature_f_matrix(R).matrix();
  const long d = W.rows();

  std::vector<Mat> P(n + 1, Mat::Zero(d, d));
  P[0] = Mat::Identity(d, d);
  std::vector<double> s(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) {
    std::vector<Mat> Q(n + 1, Mat::Zero(d, d));
    for (int m = k; m <= n; ++m) {
      Q[m] += P[m - 1] * W;
      if (m >= 2) Q[m] += P[m - 2] * F;
    }
    P.swap(Q);
    s[k] = supertrace(CliffordEnd(n, P[n]));
  }
  std::vector<double> out(half + 1);
  for (int j = 0; j <= half; ++j) {
    const int k = half + j;
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    out[j] = sign * s[k] / (std::pow(2.0, n) * fact);
  }
  return out;
}

struct CheckRow {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline CheckRow row(const std::string& name, double residual, double tol) {
  return {name, residual, tol, residual < tol};
}

/// The full suite. Deterministic; a fresh checkout passes every row.
inline std::vector<CheckRow> run_selfchecks() {
  std::vector<CheckRow> rows;

  {  // Clifford anticommutation relations
    std::mt19937 rng(101);
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n) {
      const Mat id = Mat::Identity(1 << n, 1 << n);
      for (int rep = 0; rep < 100; ++rep) {
        Vec v(n), w(n);
        for (int i = 0; i < n; ++i) {
          v[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
          w[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
        }
        const auto cv = c_op(n, v), cw = c_op(n, w), bv = b_op(n, v), bw = b_op(n, w);
        worst = std::max(worst, ((cv * cw + cw * cv).matrix() + 2 * v.dot(w) * id)
                                    .cwiseAbs()
                                    .maxCoeff());
        worst = std::max(worst, ((bv * bw + bw * bv).matrix() - 2 * v.dot(w) * id)
                                    .cwiseAbs()
                                    .maxCoeff());
        worst = std::max(worst, (cv * bw + bw * cv).matrix().cwiseAbs().maxCoeff());
      }
    }
    rows.push_back(row("clifford anticommutation relations (n=1..4)", worst, 1e-12));
  }

  {  // grading product formula, exact
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n) {
      CliffordEnd prod = CliffordEnd::identity(n);
      for (int i = 0; i < n; ++i) prod = prod * c_basis(n, i);
      for (int i = 0; i < n; ++i) prod = prod * b_basis(n, i);
      worst = std::max(worst, (grading(n).matrix() -
                               grading_product_sign(n) * prod.matrix())
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    rows.push_back(row("grading monomial product formula (n=1..4)", worst, 1e-15));
  }

  {  // supertrace vs top bi-symbol
    std::mt19937 rng(202);
    double worst = 0.0;
    for (int n = 2; n <= 4; ++n)
      for (int rep = 0; rep < 200; ++rep) {
        const Mat m = random_matrix(1 << n, rng);
        const CliffordEnd a(n, m);
        worst = std::max(worst, std::abs(supertrace(a) - supertrace_via_symbol(a)));
      }
    rows.push_back(row("supertrace vs top bi-symbol (600 random)", worst, 1e-9));
  }

  {  // monomial expansion round trip
    std::mt19937 rng(303);
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n)
      for (int rep = 0; rep < 20; ++rep) {
        const Mat m = random_matrix(1 << n, rng);
        const CliffordEnd a(n, m);
        const CliffordEnd rec = monomial_reconstruct(monomial_expand(a));
        worst = std::max(worst, (rec.matrix() - a.matrix()).cwiseAbs().maxCoeff());
      }
    rows.push_back(row("monomial expansion round trip", worst, 1e-10));
  }

  {  // biform exponential vs brute-force series
    std::mt19937 rng(404);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      BiForm x(3);
      for (Mask l = 0; l < 8u; ++l)
        for (Mask r = 0; r < 8u; ++r)
          if (l || r) x.at(l, r) = dist(rng);
      const BiForm e = biform_exp(x);
      BiForm sum = BiForm::unit(3);
      BiForm p = BiForm::unit(3);
      double fact = 1.0;
      for (int k = 1; k <= 6; ++k) {
        p = biform_mul(p, x);
        fact *= k;
        sum += (1.0 / fact) * p;
      }
      BiForm d = e - sum;
      worst = std::max(worst, d.max_abs());
    }
    rows.push_back(row("biform exp vs truncated series", worst, 1e-11));
  }

  {  // alpha: biform path vs graded End(Lambda V) exponential
    std::mt19937 rng(505);
    double worst = 0.0;
    for (int n : {2, 4})
      for (int rep = 0; rep < 5; ++rep) {
        const Tensor4 R = random_curvature_like(n, rng);
        const Mat w = random_matrix(n, rng);
        const AlphaVector a = alpha(f_biform(R), w_biform(w));
        const std::vector<double> o = alpha_from_matrix_exponential(R, w);
        for (std::size_t j = 0; j < a.values.size(); ++j)
          worst = std::max(worst, std::abs(a.values[j] - o[j]));
      }
    rows.push_back(row("alpha biform path vs matrix exponential path", worst, 1e-8));
  }

  {  // mehler kernel solves its heat equation at second order
    std::mt19937 rng(606);
    double worst_ratio_defect = 0.0;
    for (int n : {2, 4}) {
      const Mat r = random_antisymmetric(n, rng);
      Vec x = Vec::Zero(n);
      for (int i = 0; i < n; ++i) x[i] = 0.3 + 0.1 * i;
      const double r1 = heat_residual(r, x, 0.4, 0.8, 2e-2);
      const double r2 = heat_residual(r, x, 0.4, 0.8, 1e-2);
      worst_ratio_defect = std::max(worst_ratio_defect, std::abs(r1 / r2 - 4.0));
    }
    rows.push_back(row("mehler heat residual h^2 convergence (|ratio-4|)",
                       worst_ratio_defect, 0.5));
  }

  {  // a-hat degree-2 part vanishes identically in form mode
    std::mt19937 rng(707);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int n = 4;
    EvenFormMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        ExteriorElement e(n);
        for (int k = 0; k < n; ++k)
          for (int l = k + 1; l < n; ++l) e.at((1u << k) | (1u << l)) = dist(rng);
        m.at(i, j) = e;
        m.at(j, i) = -1.0 * e;
      }
    const ExteriorElement ahat = a_hat_form(m);
    ExteriorElement deg2 = ahat.degree_part(2);
    rows.push_back(row("a-hat degree-2 part vanishes (form mode, exact)",
                       deg2.max_abs(), 1e-300));
  }

  {  // top pairing insensitive to a-hat corrections
    std::mt19937 rng(808);
    double worst = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
      const Tensor4 R = random_curvature_like(4, rng);
      const Mat w = random_matrix(4, rng);
      worst = std::max(worst, top_symbol_consistency(R, w, 0.3, 0.8));
    }
    rows.push_back(row("top symbol insensitive to a-hat corrections", worst, 1e-10));
  }

  return rows;
}

}  // namespace selfcheck
}  // namespace eulerint
