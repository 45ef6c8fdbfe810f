#pragma once

// Closed-form heat kernel of the curvature-twisted harmonic oscillator
//   (d/dt - hbar^2 sum_i (d/dX^i + 1/4 (R X)_i)^2) u = 0,  u_0 = delta_0,
// namely
//   u(X,t) = (4 pi t hbar^2)^{-n/2} Ahat(t hbar^2 R)
//            exp(-<X, (A/2) coth(A/2) X> / (4 t hbar^2)),  A = t hbar^2 R,
// with Ahat(A) = det^{1/2}((A/2)/sinh(A/2)). Numeric mode evaluates the
// even matrix functions through the eigen-angles of the antisymmetric
// matrix; form mode evaluates the same power series in a commutative ring
// of even-degree forms, where nilpotency truncates them exactly.
//
// The residual check heat_residual is the arbiter for every constant here.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "eulerint/exterior.hpp"
#include "eulerint/geometry.hpp"
#include "eulerint/integrand.hpp"

namespace eulerint {

namespace series {

// x coth x = sum c_k x^{2k}
inline constexpr double kXCothX[] = {1.0,
                                     1.0 / 3.0,
                                     -1.0 / 45.0,
                                     2.0 / 945.0,
                                     -1.0 / 4725.0,
                                     2.0 / 93555.0,
                                     -1382.0 / 638512875.0};

// (x/2) coth(x/2) - 1 = sum_{k>=1} m_k x^{2k}
inline constexpr double kHalfCothHalf[] = {0.0,
                                           1.0 / 12.0,
                                           -1.0 / 720.0,
                                           1.0 / 30240.0,
                                           -1.0 / 1209600.0,
                                           1.0 / 47900160.0,
                                           -691.0 / 1307674368000.0};

// log((x/2)/sinh(x/2)) = sum_{k>=1} l_k x^{2k}
inline constexpr double kLogHalfSinh[] = {0.0,
                                          -1.0 / 24.0,
                                          1.0 / 2880.0,
                                          -1.0 / 181440.0,
                                          1.0 / 9676800.0,
                                          -1.0 / 479001600.0,
                                          691.0 / 15692092416000.0};

inline constexpr int kOrder = 6;  // truncation degree 12

}  // namespace series

namespace detail {

inline void require_antisymmetric(const Mat& a, const char* who) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument(std::string(who) + ": matrix is not antisymmetric");
}

/// Eigen-angles of an antisymmetric matrix: A has eigenvalues +-i theta_k;
/// returns the n nonnegative angles (with multiplicity) and the orthogonal
/// basis diagonalizing -A^2.
struct EigenAngles {
  Vec theta;
  Mat q;
};

inline EigenAngles eigen_angles(const Mat& a) {
  const Mat s = -(a * a);  // symmetric PSD with eigenvalues theta^2
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigen_angles: eigensolver failed");
  EigenAngles out;
  out.q = es.eigenvectors();
  out.theta = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return out;
}

inline double theta_over_sin(double theta) {
  if (theta == 0.0) return 1.0;
  return 0.5 * theta / std::sin(0.5 * theta);
}

inline double theta_cot(double theta) {
  if (theta == 0.0) return 1.0;
  return 0.5 * theta * std::cos(0.5 * theta) / std::sin(0.5 * theta);
}

}  // namespace detail

/// Ahat of a real antisymmetric matrix: on a rotation block of angle theta
/// the eigenvalues are +-i theta, so one block contributes
/// (theta/2)/sin(theta/2). Requires spectral radius < pi.
inline double a_hat(const Mat& a) {
  detail::require_antisymmetric(a, "a_hat");
  const detail::EigenAngles ea = detail::eigen_angles(a);
  double logdet = 0.0;
  for (int i = 0; i < ea.theta.size(); ++i) {
    const double th = ea.theta[i];
    if (th >= M_PI)
      throw std::invalid_argument("a_hat: spectral radius " + std::to_string(th) +
                                  " is outside the domain (< pi)");
    logdet += std::log(detail::theta_over_sin(th));
  }
  return std::exp(0.5 * logdet);
}

/// Gaussian exponent matrix (A/2) coth(A/2), symmetric.
inline Mat coth_matrix(const Mat& a) {
  detail::require_antisymmetric(a, "coth_matrix");
  const detail::EigenAngles ea = detail::eigen_angles(a);
  Vec f(ea.theta.size());
  for (int i = 0; i < ea.theta.size(); ++i) {
    if (ea.theta[i] >= M_PI)
      throw std::invalid_argument("coth_matrix: spectral radius outside the domain (< pi)");
    f[i] = detail::theta_cot(ea.theta[i]);
  }
  return ea.q * f.asDiagonal() * ea.q.transpose();
}

/// Numeric Mehler kernel; R antisymmetric, t, hbar > 0, |t hbar^2 R| < pi.
inline double mehler_u(const Mat& r, const Vec& x, double t, double hbar) {
  if (!(t > 0.0) || !(hbar > 0.0))
    throw std::invalid_argument("mehler_u: t and hbar must be positive");
  const int n = static_cast<int>(r.rows());
  if (x.size() != n) throw std::invalid_argument("mehler_u: point dimension mismatch");
  const double s = t * hbar * hbar;
  const Mat a = s * r;
  const double pref = std::pow(4.0 * M_PI * s, -0.5 * n) * a_hat(a);
  const Mat c = coth_matrix(a);
  return pref * std::exp(-x.dot(c * x) / (4.0 * s));
}

// ---------------------------------------------------------------------------
// Form mode: the same series over a commutative nilpotent ring
// ---------------------------------------------------------------------------

namespace detail {

inline void require_form_input(const EvenFormMatrix& m, const char* who) {
  if (!m.is_antisymmetric(1e-12))
    throw std::invalid_argument(std::string(who) + ": matrix is not antisymmetric");
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j)
      if (std::abs(m.at(i, j).scalar_part()) > 1e-14)
        throw std::invalid_argument(std::string(who) + ": entries must have zero scalar part");
}

}  // namespace detail

/// Ahat of a form-valued antisymmetric matrix with nilpotent entries:
/// exp(1/2 tr log((M/2)/sinh(M/2))), the series truncating exactly. Only
/// degrees divisible by four appear (tr M^{2k} has degree 4k).
inline ExteriorElement a_hat_form(const EvenFormMatrix& m) {
  detail::require_form_input(m, "a_hat_form");
  const int nf = m.form_dim();
  ExteriorElement logsum(nf);
  const EvenFormMatrix m2 = m * m;
  EvenFormMatrix p = m2;
  for (int k = 1; k <= series::kOrder; ++k) {
    ExteriorElement tr = p.trace();
    logsum += series::kLogHalfSinh[k] * tr;
    if (4 * (k + 1) > nf) break;
    p = p * m2;
  }
  return exterior_exp(0.5 * logsum);
}

/// Form-mode Mehler kernel: an even-degree exterior element whose scalar
/// part is the flat Euclidean kernel.
inline ExteriorElement mehler_u_form(const EvenFormMatrix& r, const Vec& x, double t,
                                     double hbar) {
  if (!(t > 0.0) || !(hbar > 0.0))
    throw std::invalid_argument("mehler_u_form: t and hbar must be positive");
  const int n = r.size();
  if (x.size() != n) throw std::invalid_argument("mehler_u_form: point dimension mismatch");
  const int nf = r.form_dim();
  const double s = t * hbar * hbar;
  const EvenFormMatrix a = s * r;
  detail::require_form_input(a, "mehler_u_form");

  // nilpotent part of (A/2) coth(A/2)
  EvenFormMatrix cnil(n, nf);
  const EvenFormMatrix a2 = a * a;
  EvenFormMatrix p = a2;
  for (int k = 1; k <= series::kOrder; ++k) {
    cnil += series::kHalfCothHalf[k] * p;
    if (2 * (k + 1) * 2 > nf) break;
    p = p * a2;
  }
  ExteriorElement qnil(nf);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) qnil += (x[i] * x[j]) * cnil.at(i, j);

  const double scalar =
      std::pow(4.0 * M_PI * s, -0.5 * n) * std::exp(-x.squaredNorm() / (4.0 * s));
  qnil *= -1.0 / (4.0 * s);
  ExteriorElement out = wedge(a_hat_form(a), exterior_exp(qnil));
  out *= scalar;
  return out;
}

/// |(d/dt + hbar^2 H) u| at (X, t) by central differences of step h, for
/// H = -sum_i (d/dX^i + 1/4 (R X)_i)^2. O(h^2) for the true kernel.
inline double heat_residual(const Mat& r, const Vec& x, double t, double hbar, double h) {
  const int n = static_cast<int>(r.rows());
  auto u = [&](const Vec& y, double s) { return mehler_u(r, y, s, hbar); };

  const double dudt = (u(x, t + h) - u(x, t - h)) / (2.0 * h);
  const double u0 = u(x, t);
  const Vec a = 0.25 * (r * x);

  double hu = 0.0;
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double up = u(xp, t), um = u(xm, t);
    const double d2 = (up - 2.0 * u0 + um) / (h * h);
    const double d1 = (up - um) / (2.0 * h);
    hu -= d2 + 2.0 * a[i] * d1 + a[i] * a[i] * u0;
  }
  return std::abs(dudt + hbar * hbar * hu);
}

/// Verifies that multiplying the exponential bi-form of the interpolation
/// exponent by the Ahat corrections (carried on the left factor only) does
/// not move its top (n,n) pairing: the corrections have bi-order (k, 0)
/// with k >= 4, so they cannot fill the right factor. Returns the absolute
/// difference of the two top pairings.
inline double top_symbol_consistency(const Tensor4& r_frame, const Mat& w, double xiNormSq,
                                     double t) {
  const int n = r_frame.dim();
  if (n % 2 != 0)
    throw std::invalid_argument("top_symbol_consistency: even dimension required");

  BiForm expo = w_biform(w) + f_biform(r_frame);
  expo *= -t;
  const BiForm e = biform_exp(expo);

  // curvature two-form matrix R_ij = sum_{k<l} R_ijkl e^k e^l
  EvenFormMatrix rform(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ExteriorElement entry(n);
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l)
          entry.at((1u << k) | (1u << l)) = r_frame(i, j, k, l);
      rform.at(i, j) = entry;
    }
  const ExteriorElement ahat = a_hat_form(t * rform);

  BiForm ahat_bi(n);
  for (Mask m = 0; m < (1u << n); ++m)
    if (ahat.coeff(m) != 0.0) ahat_bi.at(m, 0) = ahat.coeff(m);

  const double scalar = std::exp(-t * xiNormSq);
  return std::abs(top_pairing(biform_mul(ahat_bi, e)) - top_pairing(e)) * scalar;
}

}  // namespace eulerint
