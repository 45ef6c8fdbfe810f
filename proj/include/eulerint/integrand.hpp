#pragma once

// Assembly of the curvature (2,2)-form, the (1,1)-form of grad xi, the
// alpha_j coefficient functions, the Lipschitz-Killing curvature, and the
// full interpolation integrand
//
//   pi^{-n/2} (sum_j t^j alpha_j) e^{-t |xi|^2} * volume density,
//
// whose integral over a closed even-dimensional manifold equals the Euler
// characteristic for every t > 0. Matrix counterparts of the two Witten
// endomorphisms are provided for oracle tests against End(Lambda V).

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "eulerint/clifford.hpp"
#include "eulerint/exterior.hpp"
#include "eulerint/geometry.hpp"

namespace eulerint {

/// sigma_{2,2} of the curvature endomorphism:
///   -1/8 sum_{ijkl} R_ijkl e^i e^j (x) e^k e^l.
inline BiForm f_biform(const Tensor4& R) {
  const int n = R.dim();
  BiForm out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Mask left = (1u << i) | (1u << j);
      const int sl = (i < j) ? +1 : -1;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          if (k == l) continue;
          const double r = R(i, j, k, l);
          if (r == 0.0) continue;
          const Mask right = (1u << k) | (1u << l);
          const int sr = (k < l) ? +1 : -1;
          out.at(left, right) += -0.125 * sl * sr * r;
        }
    }
  return out;
}

/// sigma_{1,1} of the grad-xi endomorphism: sum_ij w_ij e^i (x) e^j.
inline BiForm w_biform(const Mat& w) {
  const int n = static_cast<int>(w.rows());
  if (w.cols() != n) throw std::invalid_argument("w_biform: square matrix required");
  BiForm out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (w(i, j) != 0.0) out.at(1u << i, 1u << j) = w(i, j);
  return out;
}

/// Matrix counterpart sum_ij w_ij c^i b^j acting on Lambda V.
inline CliffordEnd witten_w_matrix(const Mat& w) {
  const int n = static_cast<int>(w.rows());
  CliffordEnd out = CliffordEnd::zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (w(i, j) != 0.0) out = out + w(i, j) * (c_basis(n, i) * b_basis(n, j));
  return out;
}

/// Matrix counterpart -1/8 sum R_ijkl c^i c^j b^k b^l.
inline CliffordEnd curvature_f_matrix(const Tensor4& R) {
  const int n = R.dim();
  CliffordEnd out = CliffordEnd::zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          if (k == l) continue;
          const double r = R(i, j, k, l);
          if (r == 0.0) continue;
          out = out + (-0.125 * r) * (c_basis(n, i) * c_basis(n, j) * b_basis(n, k) * b_basis(n, l));
        }
    }
  return out;
}

/// t-polynomial coefficients of the interpolation integrand at one point.
struct AlphaVector {
  int n = 0;
  std::vector<double> values;  // alpha_0 .. alpha_{n/2}
};

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// alpha_j = (-1)^j / ((n/2-j)! (2j)!) <F2^{n/2-j} W1^{2j}, vol (x) vol>.
/// F2 and W1 must commute (both are checked to do so); this is what lets
/// the exponential split into the t-polynomial times e^{-t|xi|^2}.
inline AlphaVector alpha(const BiForm& F2, const BiForm& W1) {
  const int n = F2.dim();
  if (W1.dim() != n) throw std::invalid_argument("alpha: dimension mismatch");
  if (n % 2 != 0) throw std::invalid_argument("alpha: even dimension required");

  const BiForm fw = biform_mul(F2, W1);
  const BiForm wf = biform_mul(W1, F2);
  BiForm comm = fw;
  comm -= wf;
  const double scale = std::max({1.0, F2.max_abs(), W1.max_abs()});
  if (comm.max_abs() > 1e-10 * scale * scale)
    throw std::logic_error("alpha: inputs do not commute (are they homogeneous of bidegree "
                           "(2,2) and (1,1)?)");

  const int half = n / 2;
  std::vector<BiForm> fpow, wpow;
  fpow.reserve(half + 1);
  wpow.reserve(n + 1);
  fpow.push_back(BiForm::unit(n));
  for (int k = 1; k <= half; ++k) fpow.push_back(biform_mul(fpow[k - 1], F2));
  wpow.push_back(BiForm::unit(n));
  for (int k = 1; k <= n; ++k) wpow.push_back(biform_mul(wpow[k - 1], W1));

  AlphaVector out;
  out.n = n;
  out.values.resize(half + 1);
  for (int j = 0; j <= half; ++j) {
    const BiForm prod = biform_mul(fpow[half - j], wpow[2 * j]);
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    out.values[j] = sign / (factorial(half - j) * factorial(2 * j)) * top_pairing(prod);
  }
  return out;
}

inline AlphaVector alpha_at(const FramePointData& d) {
  return alpha(f_biform(d.R), w_biform(d.w));
}

/// Pointwise interpolation integrand (chart density included).
inline double interpolation_integrand(const FramePointData& d, double t) {
  if (t < 0.0) throw std::invalid_argument("interpolation_integrand: t must be >= 0");
  const AlphaVector a = alpha_at(d);
  double poly = 0.0, tp = 1.0;
  for (double aj : a.values) {
    poly += tp * aj;
    tp *= t;
  }
  return std::pow(M_PI, -d.n / 2.0) * poly * std::exp(-t * d.xiNormSq) * d.volDensity;
}

/// Lipschitz-Killing curvature 2^{n/2} alpha_0 (the Gauss-Bonnet integrand;
/// chi = (2 pi)^{-n/2} integral of it).
inline double lipschitz_killing(const FramePointData& d) {
  if (d.n % 2 != 0) throw std::invalid_argument("lipschitz_killing: even dimension required");
  const AlphaVector a = alpha_at(d);
  return std::pow(2.0, d.n / 2.0) * a.values[0];
}

/// det of the frame grad-xi matrix; equals alpha_{n/2}.
inline double det_grad_field(const FramePointData& d) { return d.w.determinant(); }

}  // namespace eulerint
