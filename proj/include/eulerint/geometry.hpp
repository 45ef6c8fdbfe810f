#pragma once

// Chart-based compact Riemannian manifolds. Metrics are arbitrary smooth
// evaluators on rectangular parameter boxes; Christoffel symbols, the
// Riemann tensor, covariant derivatives of gradient one-forms and third
// covariant derivatives all come from central finite differences with one
// Richardson extrapolation. Orthonormal frames come from the Cholesky
// factor of the metric.
//
// Curvature sign convention: R(d_i, d_j) d_k = [grad_i, grad_j] d_k and
// R_ijkl = <R(d_i, d_j) d_k, d_l>. In this convention the unit round
// 2-sphere has frame component R_1212 = -1; the Gauss-Bonnet command is
// normalized against it and returns chi(S^2) = +2 (pinned by a regression
// test).

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "eulerint/quadrature.hpp"

namespace eulerint {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Rank-4 tensor on R^n, dense.
// ---------------------------------------------------------------------------

class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), v_(std::size_t(n) * n * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int i, int j, int k, int l) {
    return v_[((std::size_t(i) * n_ + j) * n_ + k) * n_ + l];
  }
  double operator()(int i, int j, int k, int l) const {
    return v_[((std::size_t(i) * n_ + j) * n_ + k) * n_ + l];
  }
  double max_abs() const {
    double r = 0.0;
    for (double x : v_) r = std::max(r, std::abs(x));
    return r;
  }

 private:
  int n_ = 0;
  std::vector<double> v_;
};

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

struct FdSteps {
  std::vector<double> h;   // first/second derivative step per axis
  std::vector<double> h3;  // third derivative step per axis
  bool richardson = true;
};

inline FdSteps fd_steps_for(const Domain& domain, double scale = 1e-4, double scale3 = 1e-3) {
  FdSteps s;
  for (const Axis& a : domain.axes) {
    const double len = a.hi - a.lo;
    s.h.push_back(scale * len);
    s.h3.push_back(scale3 * len);
  }
  return s;
}

namespace fd {

template <class F>
auto central_d1(const F& f, Vec u, int i, double h) -> decltype(f(u)) {
  u[i] += h;
  auto fp = f(u);
  u[i] -= 2 * h;
  auto fm = f(u);
  return (fp - fm) * (1.0 / (2 * h));
}

template <class F>
auto d1(const F& f, const Vec& u, int i, double h, bool richardson = true) -> decltype(f(u)) {
  if (!richardson) return central_d1(f, u, i, h);
  return (4.0 * central_d1(f, u, i, h / 2) - central_d1(f, u, i, h)) * (1.0 / 3.0);
}

template <class F>
double central_d2(const F& f, Vec u, int i, int j, double hi, double hj) {
  if (i == j) {
    const double f0 = f(u);
    u[i] += hi;
    const double fp = f(u);
    u[i] -= 2 * hi;
    const double fm = f(u);
    return (fp - 2 * f0 + fm) / (hi * hi);
  }
  u[i] += hi;
  u[j] += hj;
  const double fpp = f(u);
  u[j] -= 2 * hj;
  const double fpm = f(u);
  u[i] -= 2 * hi;
  const double fmm = f(u);
  u[j] += 2 * hj;
  const double fmp = f(u);
  return (fpp - fpm - fmp + fmm) / (4 * hi * hj);
}

template <class F>
double d2(const F& f, const Vec& u, int i, int j, double hi, double hj, bool richardson = true) {
  if (!richardson) return central_d2(f, u, i, j, hi, hj);
  return (4.0 * central_d2(f, u, i, j, hi / 2, hj / 2) - central_d2(f, u, i, j, hi, hj)) / 3.0;
}

/// Third partial derivative; outer difference over axis i of the inner
/// Hessian entry (j,k).
template <class F>
double d3(const F& f, const Vec& u, int i, int j, int k, double hi, double hj, double hk,
          bool richardson = true) {
  auto inner = [&](const Vec& v) { return d2(f, v, j, k, hj, hk, richardson); };
  return d1(inner, u, i, hi, richardson);
}

}  // namespace fd

// ---------------------------------------------------------------------------
// Patches, fields, specs
// ---------------------------------------------------------------------------

using MetricFn = std::function<Mat(const Vec&)>;
using ScalarFn = std::function<double(const Vec&)>;
using EmbedFn = std::function<Vec(const Vec&)>;

struct ManifoldPatch {
  int n = 0;
  Domain domain;
  MetricFn metric;
  ScalarFn weight;  // partition-of-unity weight; empty means 1
  EmbedFn embed;    // optional embedding, used for distances and x,y,z fields
  FdSteps fd;

  double weight_at(const Vec& u) const { return weight ? weight(u) : 1.0; }
};

/// A scalar field on one patch, differentiable by finite differences.
struct ScalarField {
  ScalarFn phi;
};

struct ManifoldSpec {
  std::string name;
  int n = 0;
  std::vector<ManifoldPatch> patches;
  std::map<std::string, std::vector<ScalarField>> fields;  // one entry per patch
  std::vector<int> default_nodes;                          // per axis

  const std::vector<ScalarField>& field(const std::string& fname) const {
    auto it = fields.find(fname);
    if (it == fields.end())
      throw std::invalid_argument("manifold '" + name + "' has no field named '" + fname + "'");
    return it->second;
  }
};

/// Per-quadrature-point geometric payload.
struct FramePointData {
  int n = 0;
  Tensor4 R;       // orthonormal-frame Riemann components
  Mat w;           // frame components of grad(xi), xi = d(phi)
  double xiNormSq = 0.0;
  double volDensity = 0.0;  // sqrt(det g) * patch weight
  Vec u;
};

// ---------------------------------------------------------------------------
// Levi-Civita data
// ---------------------------------------------------------------------------

inline Mat metric_checked(const ManifoldPatch& patch, const Vec& u) {
  Mat g = patch.metric(u);
  if (g.rows() != patch.n || g.cols() != patch.n)
    throw std::runtime_error("metric evaluator returned wrong shape");
  return g;
}

/// Christoffel symbols Gamma^k_ij; result[k](i,j).
inline std::vector<Mat> christoffel(const ManifoldPatch& patch, const Vec& u) {
  const int n = patch.n;
  const Mat g = metric_checked(patch, u);
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("christoffel: metric is not positive definite at the queried point");
  const Mat ginv = llt.solve(Mat::Identity(n, n));

  std::vector<Mat> dg(n);
  for (int k = 0; k < n; ++k)
    dg[k] = fd::d1(patch.metric, u, k, patch.fd.h[k], patch.fd.richardson);

  std::vector<Mat> gamma(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma[k](i, j) = 0.5 * s;
        gamma[k](j, i) = gamma[k](i, j);
      }
  return gamma;
}

/// Lowered coordinate Riemann tensor R_ijkl = <R(d_i,d_j) d_k, d_l>.
inline Tensor4 riemann_chart(const ManifoldPatch& patch, const Vec& u) {
  const int n = patch.n;
  const Mat g = metric_checked(patch, u);
  const std::vector<Mat> gam = christoffel(patch, u);

  // dgam[i][m](j,k) = d_i Gamma^m_jk, by differencing whole Christoffel
  // evaluations (each of which runs its own metric differences).
  std::vector<std::vector<Mat>> dgam(n);
  for (int i = 0; i < n; ++i) {
    auto gam_at = [&](const Vec& v) {
      const std::vector<Mat> gv = christoffel(patch, v);
      Mat stacked(n * n, n);
      for (int m = 0; m < n; ++m) stacked.block(m * n, 0, n, n) = gv[m];
      return stacked;
    };
    const Mat d = fd::d1(gam_at, u, i, patch.fd.h[i], patch.fd.richardson);
    dgam[i].resize(n);
    for (int m = 0; m < n; ++m) dgam[i][m] = d.block(m * n, 0, n, n);
  }

  Tensor4 upper(n);  // R^m_ijk
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = dgam[i][m](j, k) - dgam[j][m](i, k);
          for (int p = 0; p < n; ++p)
            s += gam[m](i, p) * gam[p](j, k) - gam[m](j, p) * gam[p](i, k);
          upper(m, i, j, k) = s;
        }

  Tensor4 lower(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int m = 0; m < n; ++m) s += g(l, m) * upper(m, i, j, k);
          lower(i, j, k, l) = s;
        }
  return lower;
}

/// Columns of the returned matrix are the chart components of a smooth
/// orthonormal frame (inverse transpose of the Cholesky factor of g).
inline Mat cholesky_frame(const Mat& g) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("cholesky_frame: metric is not positive definite");
  const Mat L = llt.matrixL();
  return L.transpose().inverse();
}

/// Push a lowered chart tensor into the frame with chart components E.
inline Tensor4 push_tensor4(const Tensor4& t, const Mat& E) {
  const int n = t.dim();
  Tensor4 a(n), b(n), c(n), out(n);
  for (int a1 = 0; a1 < n; ++a1)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) s += t(i, j, k, l) * E(i, a1);
          a(a1, j, k, l) = s;
        }
  for (int a1 = 0; a1 < n; ++a1)
    for (int b1 = 0; b1 < n; ++b1)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int j = 0; j < n; ++j) s += a(a1, j, k, l) * E(j, b1);
          b(a1, b1, k, l) = s;
        }
  for (int a1 = 0; a1 < n; ++a1)
    for (int b1 = 0; b1 < n; ++b1)
      for (int c1 = 0; c1 < n; ++c1)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += b(a1, b1, k, l) * E(k, c1);
          c(a1, b1, c1, l) = s;
        }
  for (int a1 = 0; a1 < n; ++a1)
    for (int b1 = 0; b1 < n; ++b1)
      for (int c1 = 0; c1 < n; ++c1)
        for (int d1 = 0; d1 < n; ++d1) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) s += c(a1, b1, c1, l) * E(l, d1);
          out(a1, b1, c1, d1) = s;
        }
  return out;
}

/// Riemann tensor in the Cholesky orthonormal frame.
inline Tensor4 riemann_frame(const ManifoldPatch& patch, const Vec& u) {
  const Tensor4 chart = riemann_chart(patch, u);
  const Mat E = cholesky_frame(metric_checked(patch, u));
  return push_tensor4(chart, E);
}

/// Chart components of the covariant Hessian of phi (= grad xi for xi = d phi).
inline Mat covariant_hessian_chart(const ManifoldPatch& patch, const ScalarField& field,
                                   const Vec& u) {
  const int n = patch.n;
  const std::vector<Mat> gam = christoffel(patch, u);
  Vec grad(n);
  for (int i = 0; i < n; ++i)
    grad[i] = fd::d1(field.phi, u, i, patch.fd.h[i], patch.fd.richardson);
  Mat hess(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double v = fd::d2(field.phi, u, i, j, patch.fd.h[i], patch.fd.h[j], patch.fd.richardson);
      for (int k = 0; k < n; ++k) v -= gam[k](i, j) * grad[k];
      hess(i, j) = v;
      hess(j, i) = v;
    }
  return hess;
}

struct OneFormData {
  Mat w;  // frame components of grad xi
  double xiNormSq = 0.0;
};

/// |d phi|^2 alone, cheaper than the full one-form data.
inline double xi_norm_sq(const ManifoldPatch& patch, const ScalarField& field, const Vec& u) {
  const int n = patch.n;
  const Mat g = metric_checked(patch, u);
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("xi_norm_sq: metric not positive definite");
  Vec grad(n);
  for (int i = 0; i < n; ++i)
    grad[i] = fd::d1(field.phi, u, i, patch.fd.h[i], patch.fd.richardson);
  return grad.dot(llt.solve(grad));
}

inline OneFormData covariant_oneform(const ManifoldPatch& patch, const ScalarField& field,
                                     const Vec& u) {
  const int n = patch.n;
  const Mat g = metric_checked(patch, u);
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("covariant_oneform: metric not positive definite");
  Vec grad(n);
  for (int i = 0; i < n; ++i)
    grad[i] = fd::d1(field.phi, u, i, patch.fd.h[i], patch.fd.richardson);
  const Mat hess = covariant_hessian_chart(patch, field, u);
  const Mat E = cholesky_frame(g);
  OneFormData out;
  out.w = E.transpose() * hess * E;
  out.xiNormSq = grad.dot(llt.solve(grad));
  return out;
}

/// Frame components of the third covariant derivative of phi. At critical
/// points this tensor is fully symmetric and matches the plain third
/// partials of a geodesic chart.
inline Tensor4 covariant_third_chart(const ManifoldPatch& patch, const ScalarField& field,
                                     const Vec& u) {
  const int n = patch.n;
  const std::vector<Mat> gam = christoffel(patch, u);
  Vec grad(n);
  for (int i = 0; i < n; ++i)
    grad[i] = fd::d1(field.phi, u, i, patch.fd.h3[i], patch.fd.richardson);
  Mat pd2(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      pd2(i, j) = fd::d2(field.phi, u, i, j, patch.fd.h3[i], patch.fd.h3[j], patch.fd.richardson);
      pd2(j, i) = pd2(i, j);
    }
  const Mat hess = covariant_hessian_chart(patch, field, u);

  // dgam[i][m](j,k) = d_i Gamma^m_jk at the third-derivative step size.
  std::vector<std::vector<Mat>> dgam(n);
  for (int i = 0; i < n; ++i) {
    auto gam_at = [&](const Vec& v) {
      const std::vector<Mat> gv = christoffel(patch, v);
      Mat stacked(n * n, n);
      for (int m = 0; m < n; ++m) stacked.block(m * n, 0, n, n) = gv[m];
      return stacked;
    };
    const Mat d = fd::d1(gam_at, u, i, patch.fd.h3[i], patch.fd.richardson);
    dgam[i].resize(n);
    for (int m = 0; m < n; ++m) dgam[i][m] = d.block(m * n, 0, n, n);
  }

  Tensor4 t3(n);  // stored with last index unused (set l = 0): use (i,j,k,0)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = fd::d3(field.phi, u, i, j, k, patch.fd.h3[i], patch.fd.h3[j], patch.fd.h3[k],
                          patch.fd.richardson);
        for (int l = 0; l < n; ++l) {
          v -= dgam[i][l](j, k) * grad[l];
          v -= gam[l](j, k) * pd2(i, l);
          v -= gam[l](i, j) * hess(l, k);
          v -= gam[l](i, k) * hess(j, l);
        }
        t3(i, j, k, 0) = v;
      }
  return t3;
}

/// Push the third-derivative tensor (stored as above) into a frame.
inline Tensor4 push_third(const Tensor4& t3, const Mat& E) {
  const int n = t3.dim();
  Tensor4 out(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
              s += t3(i, j, k, 0) * E(i, a) * E(j, b) * E(k, c);
        out(a, b, c, 0) = s;
      }
  return out;
}

inline FramePointData frame_point_data(const ManifoldPatch& patch, const ScalarField* field,
                                       const Vec& u) {
  FramePointData d;
  d.n = patch.n;
  d.u = u;
  d.R = riemann_frame(patch, u);
  const Mat g = metric_checked(patch, u);
  const double det = g.determinant();
  if (!(det > 0.0)) throw std::runtime_error("frame_point_data: metric determinant <= 0");
  d.volDensity = std::sqrt(det) * patch.weight_at(u);
  if (field) {
    const OneFormData of = covariant_oneform(patch, *field, u);
    d.w = of.w;
    d.xiNormSq = of.xiNormSq;
  } else {
    d.w = Mat::Zero(patch.n, patch.n);
    d.xiNormSq = 0.0;
  }
  return d;
}

/// Replace the orthonormal frame by frame * Q for a rotation Q.
inline FramePointData rotate_frame(const FramePointData& d, const Mat& Q) {
  FramePointData out = d;
  out.R = push_tensor4(d.R, Q);
  out.w = Q.transpose() * d.w * Q;
  return out;
}

// ---------------------------------------------------------------------------
// Built-in catalog
// ---------------------------------------------------------------------------

namespace detail {

inline double smooth_step01(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

/// 1 on the equatorial band, 0 on both polar caps, smooth in between.
inline double sphere_band_weight(double theta) {
  const double lo = M_PI / 8, hi = M_PI / 4;
  const double up = smooth_step01((theta - lo) / (hi - lo));
  const double dn = smooth_step01((M_PI - theta - lo) / (hi - lo));
  return up * dn;
}

}  // namespace detail

inline std::vector<int> default_nodes_for(int n, int axes) {
  const int per_axis = (n <= 2) ? 64 : (n == 3) ? 40 : 24;
  return std::vector<int>(std::size_t(axes), per_axis);
}

/// Round sphere of radius r in polar coordinates (theta, phi). With
/// two_patches a rotated copy (pole on the x-axis) is added together with a
/// partition of unity, so that every point of the sphere is interior to a
/// chart where its local data can be computed.
inline ManifoldSpec make_sphere(double r = 1.0, bool two_patches = false) {
  if (!(r > 0.0)) throw std::invalid_argument("sphere: radius must be positive");
  ManifoldSpec spec;
  spec.name = "sphere";
  spec.n = 2;

  Domain dom;
  dom.axes = {Axis{0.0, M_PI, false, AxisRule::GaussLegendreCos},
              Axis{0.0, 2 * M_PI, true, AxisRule::Trapezoid}};

  MetricFn metric = [r](const Vec& u) {
    Mat g(2, 2);
    const double s = std::sin(u[0]);
    g << r * r, 0.0, 0.0, r * r * s * s;
    return g;
  };

  EmbedFn embed0 = [r](const Vec& u) {
    Vec p(3);
    p << r * std::sin(u[0]) * std::cos(u[1]), r * std::sin(u[0]) * std::sin(u[1]),
        r * std::cos(u[0]);
    return p;
  };
  // Same chart rotated so its pole sits on the x-axis.
  EmbedFn embed1 = [r](const Vec& u) {
    Vec p(3);
    p << r * std::cos(u[0]), r * std::sin(u[0]) * std::sin(u[1]),
        -r * std::sin(u[0]) * std::cos(u[1]);
    return p;
  };

  ManifoldPatch p0{2, dom, metric, nullptr, embed0, fd_steps_for(dom)};
  if (!two_patches) {
    spec.patches = {p0};
  } else {
    p0.weight = [](const Vec& u) { return detail::sphere_band_weight(u[0]); };
    ManifoldPatch p1{2, dom, metric, nullptr, embed1, fd_steps_for(dom)};
    p1.weight = [r, embed1](const Vec& u) {
      const Vec p = embed1(u);
      const double c = std::clamp(p[2] / r, -1.0, 1.0);
      return 1.0 - detail::sphere_band_weight(std::acos(c));
    };
    spec.patches = {p0, p1};
  }

  auto field_from_embed = [&](const std::function<double(const Vec&)>& fxyz) {
    std::vector<ScalarField> fs;
    for (const auto& patch : spec.patches) {
      const EmbedFn e = patch.embed;
      fs.push_back(ScalarField{[e, fxyz](const Vec& u) { return fxyz(e(u)); }});
    }
    return fs;
  };
  spec.fields["height"] = field_from_embed([](const Vec& p) { return p[2]; });
  spec.fields["z_squared"] = field_from_embed([](const Vec& p) { return p[2] * p[2]; });
  spec.fields["cos_angle"] = field_from_embed([r](const Vec& p) { return p[2] / r; });

  spec.default_nodes = default_nodes_for(2, 2);
  return spec;
}

/// Torus of revolution with radii (R, r), standing on edge: the symmetry
/// axis is horizontal, so the ambient height z has four nondegenerate
/// critical points. The classic flat-lying height (two critical circles)
/// is available as the field "height_lying".
inline ManifoldSpec make_embedded_torus(double R = 2.0, double r = 1.0) {
  if (!(R > r && r > 0.0))
    throw std::invalid_argument("embedded_torus: need R > r > 0");
  ManifoldSpec spec;
  spec.name = "embedded_torus";
  spec.n = 2;

  Domain dom;
  dom.axes = {Axis{0.0, 2 * M_PI, true, AxisRule::Trapezoid},
              Axis{0.0, 2 * M_PI, true, AxisRule::Trapezoid}};

  MetricFn metric = [R, r](const Vec& u) {
    Mat g(2, 2);
    const double w = R + r * std::cos(u[1]);
    g << w * w, 0.0, 0.0, r * r;
    return g;
  };
  EmbedFn embed = [R, r](const Vec& u) {
    Vec p(3);
    const double w = R + r * std::cos(u[1]);
    p << w * std::cos(u[0]), r * std::sin(u[1]), w * std::sin(u[0]);
    return p;
  };

  spec.patches = {ManifoldPatch{2, dom, metric, nullptr, embed, fd_steps_for(dom)}};
  spec.fields["height"] = {ScalarField{[R, r](const Vec& u) {
    return (R + r * std::cos(u[1])) * std::sin(u[0]);
  }}};
  spec.fields["height_lying"] = {ScalarField{[r](const Vec& u) { return r * std::sin(u[1]); }}};
  spec.fields["z_squared"] = {ScalarField{[R, r](const Vec& u) {
    const double z = (R + r * std::cos(u[1])) * std::sin(u[0]);
    return z * z;
  }}};
  spec.fields["cos_angle"] = {ScalarField{[](const Vec& u) { return std::cos(u[0]); }}};
  spec.default_nodes = default_nodes_for(2, 2);
  return spec;
}

/// Flat torus with the given side lengths (identity metric on periodic
/// axes). There is no global height function; cos fields stand in.
inline ManifoldSpec make_flat_torus(std::vector<double> lengths = {2 * M_PI, 2 * M_PI}) {
  const int n = static_cast<int>(lengths.size());
  if (n < 1 || n > 4) throw std::invalid_argument("flat_torus: 1 to 4 axes supported");
  for (double L : lengths)
    if (!(L > 0.0)) throw std::invalid_argument("flat_torus: lengths must be positive");
  ManifoldSpec spec;
  spec.name = "flat_torus";
  spec.n = n;

  Domain dom;
  for (double L : lengths) dom.axes.push_back(Axis{0.0, L, true, AxisRule::Trapezoid});

  MetricFn metric = [n](const Vec&) { return Mat::Identity(n, n); };
  EmbedFn embed = [lengths, n](const Vec& u) {
    Vec p(2 * n);
    for (int i = 0; i < n; ++i) {
      const double rr = lengths[i] / (2 * M_PI);
      p[2 * i] = rr * std::cos(2 * M_PI * u[i] / lengths[i]);
      p[2 * i + 1] = rr * std::sin(2 * M_PI * u[i] / lengths[i]);
    }
    return p;
  };

  spec.patches = {ManifoldPatch{n, dom, metric, nullptr, embed, fd_steps_for(dom)}};
  const double L0 = lengths[0];
  spec.fields["cos_angle"] = {
      ScalarField{[L0](const Vec& u) { return std::cos(2 * M_PI * u[0] / L0); }}};
  spec.fields["cos_sum"] = {ScalarField{[lengths, n](const Vec& u) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::cos(2 * M_PI * u[i] / lengths[i]);
    return s;
  }}};
  spec.default_nodes = default_nodes_for(n, n);
  return spec;
}

/// Riemannian product. Patches multiply pairwise (block metric, product
/// weights, concatenated embeddings); named fields present in both factors
/// add, and each factor's fields are lifted as "f1.<name>" / "f2.<name>".
inline ManifoldSpec make_product(const ManifoldSpec& a, const ManifoldSpec& b) {
  ManifoldSpec spec;
  spec.name = "product(" + a.name + "," + b.name + ")";
  spec.n = a.n + b.n;

  for (const auto& pa : a.patches)
    for (const auto& pb : b.patches) {
      ManifoldPatch p;
      p.n = spec.n;
      p.domain.axes = pa.domain.axes;
      p.domain.axes.insert(p.domain.axes.end(), pb.domain.axes.begin(), pb.domain.axes.end());
      const int na = pa.n, nb = pb.n;
      MetricFn ma = pa.metric, mb = pb.metric;
      p.metric = [na, nb, ma, mb](const Vec& u) {
        Mat g = Mat::Zero(na + nb, na + nb);
        g.topLeftCorner(na, na) = ma(u.head(na));
        g.bottomRightCorner(nb, nb) = mb(u.tail(nb));
        return g;
      };
      if (pa.weight || pb.weight) {
        ScalarFn wa = pa.weight, wb = pb.weight;
        p.weight = [na, nb, wa, wb](const Vec& u) {
          const double va = wa ? wa(u.head(na)) : 1.0;
          const double vb = wb ? wb(u.tail(nb)) : 1.0;
          return va * vb;
        };
      }
      if (pa.embed && pb.embed) {
        EmbedFn ea = pa.embed, eb = pb.embed;
        p.embed = [na, nb, ea, eb](const Vec& u) {
          const Vec qa = ea(u.head(na)), qb = eb(u.tail(nb));
          Vec q(qa.size() + qb.size());
          q << qa, qb;
          return q;
        };
      }
      p.fd = fd_steps_for(p.domain);
      spec.patches.push_back(p);
    }

  auto lift = [&](const std::vector<ScalarField>& fs, bool first) {
    std::vector<ScalarField> out;
    const int na = a.n;
    std::size_t idx = 0;
    for (const auto& pa : a.patches)
      for (const auto& pb : b.patches) {
        (void)pa;
        (void)pb;
        const std::size_t src = first ? idx / b.patches.size() : idx % b.patches.size();
        const ScalarFn f = fs[src].phi;
        if (first)
          out.push_back(ScalarField{[f, na](const Vec& u) { return f(u.head(na)); }});
        else
          out.push_back(ScalarField{[f, na](const Vec& u) { return f(u.tail(u.size() - na)); }});
        ++idx;
      }
    return out;
  };

  for (const auto& [fname, fa] : a.fields) {
    spec.fields["f1." + fname] = lift(fa, true);
    auto it = b.fields.find(fname);
    if (it != b.fields.end()) {
      const auto l1 = lift(fa, true), l2 = lift(it->second, false);
      std::vector<ScalarField> sum;
      for (std::size_t i = 0; i < l1.size(); ++i) {
        const ScalarFn f1 = l1[i].phi, f2 = l2[i].phi;
        sum.push_back(ScalarField{[f1, f2](const Vec& u) { return f1(u) + f2(u); }});
      }
      spec.fields[fname] = sum;
    }
  }
  for (const auto& [fname, fb] : b.fields) spec.fields["f2." + fname] = lift(fb, false);

  spec.default_nodes = default_nodes_for(spec.n, static_cast<int>(spec.patches[0].domain.axes.size()));
  return spec;
}

/// Custom chart manifold from evaluators (used by the JSON config).
inline ManifoldSpec make_custom(int n, Domain domain, MetricFn metric, EmbedFn embed = nullptr) {
  ManifoldSpec spec;
  spec.name = "custom";
  spec.n = n;
  ManifoldPatch p{n, std::move(domain), std::move(metric), nullptr, std::move(embed),
                  FdSteps{}};
  p.fd = fd_steps_for(p.domain);
  spec.patches = {p};
  spec.default_nodes = default_nodes_for(n, n);
  return spec;
}

}  // namespace eulerint
