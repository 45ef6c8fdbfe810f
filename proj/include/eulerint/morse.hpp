#pragma once

// Critical-point and critical-submanifold evaluation: indices of
// nondegenerate zeros of d(phi), Poincare-Hopf sums, the stationary-phase
// limit of the interpolation integral, indices and Euler characteristics
// of declared critical strata (degenerate Poincare-Hopf), and the
// second-fundamental-form / Gauss-equation verifications on strata.
//
// Strata are declared, not detected: the tool verifies each declaration
// and machine-checks that the declarations cover every zero of the field
// on the quadrature grid.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "eulerint/geometry.hpp"
#include "eulerint/integrand.hpp"
#include "eulerint/quadrature.hpp"

namespace eulerint {

struct MorseOptions {
  double zero_tol = 1e-10;        // |xi|^2 at a declared zero
  double stratum_zero_tol = 1e-8;  // |xi|^2 along a declared stratum
  double degenerate_tol = 1e-8;   // Hessian eigenvalue considered zero at a point
  double stratum_eig_tol = 1e-6;  // tangential/normal split threshold on strata
  double coverage_xi_sq = 1e-6;   // |xi|^2 must exceed this away from declared sets
  double coverage_radius = 0.1;   // chart/embedding ball around declared sets
  int stratum_samples = 10;  // verification points per stratum
};

struct CriticalPointDecl {
  Vec u;
  int patch = 0;
  std::optional<int> expected_index;
};

struct CriticalStratum {
  int m = 0;  // stratum dimension; 0 = isolated point treated as stratum
  int patch = 0;
  Domain domain;                         // parameter box (empty for m = 0)
  std::function<Vec(const Vec&)> embed;  // s -> chart coordinates
  std::optional<int> declared_nu;
  std::optional<int> declared_chi;
};

// ---------------------------------------------------------------------------
// Nondegenerate points
// ---------------------------------------------------------------------------

struct PointIndex {
  int nu = 0;
  int sign = 0;
};

/// Index of a nondegenerate zero: number of negative eigenvalues of the
/// symmetric part of grad xi. Eigenvalues near zero route the user to the
/// degenerate (stratum) path.
inline PointIndex point_index(const ManifoldPatch& patch, const ScalarField& field,
                              const Vec& u, const MorseOptions& opt = {}) {
  const OneFormData of = covariant_oneform(patch, field, u);
  if (of.xiNormSq >= opt.zero_tol) {
    std::ostringstream os;
    os << "point_index: |xi|^2 = " << of.xiNormSq
       << " at the declared zero exceeds " << opt.zero_tol;
    throw std::invalid_argument(os.str());
  }
  const Mat sym = 0.5 * (of.w + of.w.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  PointIndex out;
  for (int i = 0; i < sym.rows(); ++i) {
    const double lam = es.eigenvalues()[i];
    if (std::abs(lam) < opt.degenerate_tol)
      throw std::invalid_argument(
          "point_index: Hessian eigenvalue within tolerance of zero; the zero is "
          "degenerate, declare a critical stratum instead");
    if (lam < 0.0) ++out.nu;
  }
  out.sign = (out.nu % 2 == 0) ? +1 : -1;
  return out;
}

// ---------------------------------------------------------------------------
// Coverage scan
// ---------------------------------------------------------------------------

namespace detail {

struct DeclaredSite {
  int patch;
  Vec u;        // chart coordinates
  Vec embedded;  // empty when the patch has no embedding
};

inline double chart_distance(const Domain& dom, const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    double d = std::abs(a[i] - b[i]);
    if (dom.axes[i].periodic) {
      const double len = dom.axes[i].hi - dom.axes[i].lo;
      d = std::fmod(d, len);
      d = std::min(d, len - d);
    }
    s += d * d;
  }
  return std::sqrt(s);
}

inline std::vector<DeclaredSite> stratum_sites(const ManifoldSpec& spec,
                                               const CriticalStratum& st, double radius) {
  std::vector<DeclaredSite> sites;
  const ManifoldPatch& patch = spec.patches.at(st.patch);
  if (st.m == 0) {
    Vec u = st.embed(Vec::Zero(0));
    sites.push_back({st.patch, u, patch.embed ? patch.embed(u) : Vec()});
    return sites;
  }
  // sample spacing about radius/2 along each axis, so that every point of
  // the stratum image sits within the coverage ball of some site
  const int cap = (st.m <= 2) ? 512 : 48;
  std::vector<int> counts(st.m);
  for (int a = 0; a < st.m; ++a) {
    const Axis& ax = st.domain.axes[a];
    const int want = static_cast<int>(std::ceil(2.0 * (ax.hi - ax.lo) / radius));
    counts[a] = std::clamp(want, 8, cap);
  }
  std::size_t total = 1;
  for (int c : counts) total *= c;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vec s(st.m);
    std::size_t rest = idx;
    for (int a = st.m - 1; a >= 0; --a) {
      const int c = counts[a];
      const Axis& ax = st.domain.axes[a];
      const int pos = static_cast<int>(rest % c);
      rest /= c;
      // interior samples for bounded axes, uniform for periodic ones
      s[a] = ax.periodic ? ax.lo + (ax.hi - ax.lo) * pos / c
                         : ax.lo + (ax.hi - ax.lo) * (pos + 0.5) / c;
    }
    Vec u = st.embed(s);
    sites.push_back({st.patch, u, patch.embed ? patch.embed(u) : Vec()});
  }
  return sites;
}

}  // namespace detail

namespace detail {

inline bool site_covers(const ManifoldSpec& spec, int patch_index, const Vec& u,
                        const std::vector<DeclaredSite>& sites, double radius) {
  const ManifoldPatch& patch = spec.patches[patch_index];
  const Vec pu = patch.embed ? patch.embed(u) : Vec();
  for (const auto& site : sites) {
    if (site.patch == patch_index &&
        chart_distance(patch.domain, u, site.u) <= radius)
      return true;
    if (pu.size() > 0 && site.embedded.size() == pu.size() &&
        (pu - site.embedded).norm() <= radius)
      return true;
  }
  return false;
}

/// A few damped Newton steps on |xi|^2 from a grid local minimum; wraps
/// periodic axes, gives up silently at chart edges or on stalls.
inline Vec polish_minimum(const ManifoldPatch& patch, const ScalarField& field, Vec u,
                          int iterations = 12) {
  const int n = patch.n;
  auto psi = [&](const Vec& v) { return xi_norm_sq(patch, field, v); };
  auto wrap = [&](Vec v) {
    for (int i = 0; i < n; ++i) {
      const Axis& ax = patch.domain.axes[i];
      if (ax.periodic) {
        const double len = ax.hi - ax.lo;
        v[i] = ax.lo + std::fmod(std::fmod(v[i] - ax.lo, len) + len, len);
      } else {
        const double margin = 4.0 * patch.fd.h[i];
        v[i] = std::clamp(v[i], ax.lo + margin, ax.hi - margin);
      }
    }
    return v;
  };
  double val = psi(u);
  for (int it = 0; it < iterations; ++it) {
    Vec grad(n);
    Mat hess(n, n);
    for (int i = 0; i < n; ++i)
      grad[i] = fd::d1(psi, u, i, patch.fd.h3[i], true);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        hess(i, j) = fd::d2(psi, u, i, j, patch.fd.h3[i], patch.fd.h3[j], true);
        hess(j, i) = hess(i, j);
      }
    Vec step = hess.ldlt().solve(grad);
    if (!step.allFinite() || step.norm() > 1.0) step = grad;  // fall back to descent
    double scale = 1.0;
    Vec next = u;
    double nextval = val;
    for (int bt = 0; bt < 8; ++bt) {
      const Vec cand = wrap(u - scale * step);
      const double cv = psi(cand);
      if (cv < val) {
        next = cand;
        nextval = cv;
        break;
      }
      scale *= 0.5;
    }
    if (nextval >= val) break;
    u = next;
    val = nextval;
    if (val < 1e-18) break;
  }
  return u;
}

}  // namespace detail

/// Scans the quadrature grid of every patch (where its weight dominates)
/// and demands |xi|^2 > coverage_xi_sq outside balls around the declared
/// sites; grid-local minima of |xi|^2 are additionally polished by Newton
/// steps so that zeros falling between grid nodes are found too. Distance
/// is chart distance (periodic-aware) within the declaring patch and
/// embedding distance across patches.
inline void check_zero_coverage(const ManifoldSpec& spec, const std::string& field_name,
                                const std::vector<detail::DeclaredSite>& sites,
                                const std::vector<int>& nodes, const MorseOptions& opt = {}) {
  const auto& fields = spec.field(field_name);
  for (std::size_t pi = 0; pi < spec.patches.size(); ++pi) {
    const ManifoldPatch& patch = spec.patches[pi];
    const QuadratureGrid grid(patch.domain, nodes);
    const std::size_t total = grid.size();
    std::vector<double> xisq(total);
    Vec u;
    for (std::size_t i = 0; i < total; ++i) {
      grid.node(i, u);
      xisq[i] = (patch.weight_at(u) < 0.5)
                    ? std::numeric_limits<double>::infinity()
                    : xi_norm_sq(patch, fields[pi], u);
    }

    auto report = [&](const Vec& at, double value) {
      std::ostringstream os;
      os << "undeclared zero of the field: |xi|^2 = " << value << " at patch " << pi
         << " point (";
      for (int a = 0; a < at.size(); ++a) os << (a ? ", " : "") << at[a];
      os << ") is not near any declared critical point or stratum";
      throw std::runtime_error(os.str());
    };

    for (std::size_t i = 0; i < total; ++i) {
      if (xisq[i] > opt.coverage_xi_sq) continue;
      grid.node(i, u);
      if (!detail::site_covers(spec, static_cast<int>(pi), u, sites, opt.coverage_radius))
        report(u, xisq[i]);
    }

    // grid-local minima: candidate zeros between nodes
    const int n = patch.n;
    std::vector<std::size_t> strides(n, 1);
    std::vector<std::size_t> extents(n);
    for (int a = 0; a < n; ++a) extents[a] = static_cast<std::size_t>(nodes[a]);
    for (int a = n - 2; a >= 0; --a) strides[a] = strides[a + 1] * extents[a + 1];
    int polished = 0;
    for (std::size_t i = 0; i < total && polished < 4096; ++i) {
      const double v = xisq[i];
      if (!std::isfinite(v) || v > 0.05) continue;
      if (v <= opt.coverage_xi_sq) continue;  // already handled above
      bool is_min = true;
      for (int a = n - 1; a >= 0 && is_min; --a) {
        const std::size_t pos = (i / strides[a]) % extents[a];
        const bool periodic = patch.domain.axes[a].periodic;
        for (int dir : {-1, +1}) {
          std::size_t q;
          if (pos == 0 && dir < 0) {
            if (!periodic) continue;
            q = i + (extents[a] - 1) * strides[a];
          } else if (pos + 1 == extents[a] && dir > 0) {
            if (!periodic) continue;
            q = i - (extents[a] - 1) * strides[a];
          } else {
            q = i + dir * strides[a];
          }
          if (xisq[q] < v) {
            is_min = false;
            break;
          }
        }
      }
      if (!is_min) continue;
      ++polished;
      grid.node(i, u);
      const Vec z = detail::polish_minimum(patch, fields[pi], u);
      const double zv = xi_norm_sq(patch, fields[pi], z);
      if (zv > opt.coverage_xi_sq) continue;
      if (!detail::site_covers(spec, static_cast<int>(pi), z, sites, opt.coverage_radius))
        report(z, zv);
    }
  }
}

// ---------------------------------------------------------------------------
// Poincare-Hopf
// ---------------------------------------------------------------------------

struct PhRow {
  CriticalPointDecl decl;
  int nu = 0;
  int sign = 0;
};

struct PhResult {
  std::vector<PhRow> rows;
  int sum = 0;
};

inline PhResult poincare_hopf_sum(const ManifoldSpec& spec, const std::string& field_name,
                                  const std::vector<CriticalPointDecl>& decls,
                                  const std::vector<int>& nodes, const MorseOptions& opt = {}) {
  const auto& fields = spec.field(field_name);
  PhResult out;
  std::vector<detail::DeclaredSite> sites;
  for (const auto& d : decls) {
    const ManifoldPatch& patch = spec.patches.at(d.patch);
    const PointIndex pi = point_index(patch, fields[d.patch], d.u, opt);
    if (d.expected_index && *d.expected_index != pi.nu) {
      std::ostringstream os;
      os << "declared index " << *d.expected_index << " does not match computed index "
         << pi.nu;
      throw std::runtime_error(os.str());
    }
    out.rows.push_back({d, pi.nu, pi.sign});
    out.sum += pi.sign;
    sites.push_back({d.patch, d.u, patch.embed ? patch.embed(d.u) : Vec()});
  }
  check_zero_coverage(spec, field_name, sites, nodes, opt);
  return out;
}

// ---------------------------------------------------------------------------
// Stationary phase
// ---------------------------------------------------------------------------

/// Max residual of the critical-point identity
/// Hess(|d phi|^2) = 2 w w^T  (frame components) at u.
inline double hessian_identity_residual(const ManifoldPatch& patch, const ScalarField& field,
                                        const Vec& u) {
  const OneFormData of = covariant_oneform(patch, field, u);
  const ScalarField xisq{[&patch, &field](const Vec& v) { return xi_norm_sq(patch, field, v); }};
  // third-derivative step: |xi|^2 evaluations carry their own FD noise
  ManifoldPatch coarse = patch;
  coarse.fd.h = patch.fd.h3;
  const Mat hess_chart = covariant_hessian_chart(coarse, xisq, u);
  const Mat E = cholesky_frame(metric_checked(patch, u));
  const Mat lhs = E.transpose() * hess_chart * E;
  const Mat rhs = 2.0 * of.w * of.w.transpose();
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

struct StationaryPhaseRow {
  double t = 0.0;
  double value = 0.0;
};

struct StationaryPhaseResult {
  std::vector<StationaryPhaseRow> rows;
  double hessian_residual = 0.0;  // max over the declared zeros
  double det_identity_residual = 0.0;  // |det Hess(|xi|^2) - 2^n det(w)^2|, relative
};

/// Evaluates pi^{-n/2} t^{n/2} integral of alpha_{n/2} e^{-t|xi|^2} for each
/// t; converges to the Poincare-Hopf sum as t grows. Also verifies the
/// Hessian identity at the declared zeros.
inline StationaryPhaseResult stationary_phase_check(const ManifoldSpec& spec,
                                                    const std::string& field_name,
                                                    const std::vector<CriticalPointDecl>& decls,
                                                    const std::vector<double>& t_list,
                                                    const std::vector<int>& nodes) {
  const auto& fields = spec.field(field_name);
  const int n = spec.n;
  StationaryPhaseResult out;
  for (double t : t_list) {
    double total = 0.0;
    for (std::size_t pi = 0; pi < spec.patches.size(); ++pi) {
      const ManifoldPatch& patch = spec.patches[pi];
      const ScalarField& f = fields[pi];
      const QuadratureGrid grid(patch.domain, nodes);
      total += integrate(grid, [&](const Vec& u) {
        const OneFormData of = covariant_oneform(patch, f, u);
        const double dens = std::sqrt(metric_checked(patch, u).determinant()) *
                            patch.weight_at(u);
        return of.w.determinant() * std::exp(-t * of.xiNormSq) * dens;
      });
    }
    out.rows.push_back({t, std::pow(M_PI, -0.5 * n) * std::pow(t, 0.5 * n) * total});
  }
  for (const auto& d : decls) {
    const ManifoldPatch& patch = spec.patches.at(d.patch);
    out.hessian_residual =
        std::max(out.hessian_residual, hessian_identity_residual(patch, fields[d.patch], d.u));
    const OneFormData of = covariant_oneform(patch, fields[d.patch], d.u);
    const ScalarField xisq{
        [&patch, f = fields[d.patch]](const Vec& v) { return xi_norm_sq(patch, f, v); }};
    ManifoldPatch coarse = patch;
    coarse.fd.h = patch.fd.h3;
    const Mat hc = covariant_hessian_chart(coarse, xisq, d.u);
    const Mat E = cholesky_frame(metric_checked(patch, d.u));
    const double deth = (E.transpose() * hc * E).determinant();
    const double detw = of.w.determinant();
    const double expect = std::pow(2.0, n) * detw * detw;
    const double rel = std::abs(deth - expect) / std::max(1.0, std::abs(expect));
    out.det_identity_residual = std::max(out.det_identity_residual, rel);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Critical strata (degenerate Poincare-Hopf)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Vec> stratum_verification_points(const CriticalStratum& st, int count) {
  std::vector<Vec> pts;
  if (st.m == 0) {
    pts.push_back(Vec::Zero(0));
    return pts;
  }
  // low-discrepancy-ish deterministic sweep of the parameter box
  for (int i = 0; i < count; ++i) {
    Vec s(st.m);
    for (int a = 0; a < st.m; ++a) {
      const Axis& ax = st.domain.axes[a];
      const double frac = std::fmod(0.5 + (i + 1) * (0.318309886 + 0.1 * a), 1.0);
      s[a] = ax.lo + (0.05 + 0.9 * frac) * (ax.hi - ax.lo);
    }
    pts.push_back(s);
  }
  return pts;
}

/// Jacobian of the stratum parametrization, chart components per column.
inline Mat stratum_jacobian(const CriticalStratum& st, const Vec& s, const FdSteps& fd) {
  const Vec u0 = st.embed(s);
  Mat j(u0.size(), st.m);
  for (int a = 0; a < st.m; ++a) {
    const double h = fd.h.empty() ? 1e-5 : fd.h[std::min<std::size_t>(a, fd.h.size() - 1)];
    j.col(a) = fd::d1(st.embed, s, a, h, true);
  }
  return j;
}

inline ManifoldPatch induced_stratum_patch(const ManifoldPatch& ambient,
                                           const CriticalStratum& st) {
  ManifoldPatch p;
  p.n = st.m;
  p.domain = st.domain;
  p.fd = fd_steps_for(st.domain);
  const auto embed = st.embed;
  const MetricFn ambient_metric = ambient.metric;
  const FdSteps fd = p.fd;
  const int m = st.m;
  p.metric = [embed, ambient_metric, fd, m](const Vec& s) {
    const Vec u = embed(s);
    Mat j(u.size(), m);
    for (int a = 0; a < m; ++a) j.col(a) = fd::d1(embed, s, a, fd.h[a], true);
    return Mat(j.transpose() * ambient_metric(u) * j);
  };
  const EmbedFn ambient_embed = ambient.embed;
  if (ambient_embed)
    p.embed = [embed, ambient_embed](const Vec& s) { return ambient_embed(embed(s)); };
  return p;
}

}  // namespace detail

struct StratumIndex {
  int nu = 0;
  int chi = 0;
  double chi_estimate = 0.0;  // from recursive quadrature when m >= 2
};

/// Index and Euler characteristic of one declared critical stratum. The
/// index is the negative-eigenvalue count of the ambient Hessian, checked
/// to be constant across sample points; chi comes from the dimension
/// (1 for points, 0 in odd dimension) or from the Gauss-Bonnet integral of
/// the induced metric for even m >= 2.
inline StratumIndex stratum_index(const ManifoldSpec& spec, const std::string& field_name,
                                  const CriticalStratum& st, const MorseOptions& opt = {}) {
  const ManifoldPatch& patch = spec.patches.at(st.patch);
  const ScalarField& field = spec.field(field_name)[st.patch];

  const std::vector<Vec> samples =
      detail::stratum_verification_points(st, opt.stratum_samples);
  int nu = -1;
  for (const Vec& s : samples) {
    const Vec u = st.embed(s);
    const OneFormData of = covariant_oneform(patch, field, u);
    if (of.xiNormSq >= opt.stratum_zero_tol) {
      std::ostringstream os;
      os << "stratum declaration: |xi|^2 = " << of.xiNormSq << " on the image exceeds "
         << opt.stratum_zero_tol;
      throw std::invalid_argument(os.str());
    }
    const Mat sym = 0.5 * (of.w + of.w.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    int zeros = 0, neg = 0;
    double minNormal = std::numeric_limits<double>::max();
    for (int i = 0; i < sym.rows(); ++i) {
      const double lam = es.eigenvalues()[i];
      if (std::abs(lam) <= opt.stratum_eig_tol) {
        ++zeros;
      } else {
        minNormal = std::min(minNormal, std::abs(lam));
        if (lam < 0.0) ++neg;
      }
    }
    if (zeros != st.m) {
      std::ostringstream os;
      os << "stratum declaration: Hessian has " << zeros
         << " near-zero eigenvalues but the stratum has dimension " << st.m;
      throw std::invalid_argument(os.str());
    }
    if (st.m < patch.n && minNormal < opt.stratum_eig_tol * 10)
      throw std::invalid_argument(
          "stratum declaration: normal Hessian is close to degenerate");
    if (nu == -1) {
      nu = neg;
    } else if (nu != neg) {
      std::ostringstream os;
      os << "stratum index varies across sample points (" << nu << " vs " << neg
         << "); the declared set is not a single nondegenerate stratum";
      throw std::invalid_argument(os.str());
    }
  }

  StratumIndex out;
  out.nu = nu;
  if (st.declared_nu && *st.declared_nu != nu) {
    std::ostringstream os;
    os << "declared stratum index " << *st.declared_nu << " does not match computed " << nu;
    throw std::runtime_error(os.str());
  }

  if (st.m == 0) {
    out.chi = 1;
    out.chi_estimate = 1.0;
  } else if (st.m % 2 == 1) {
    out.chi = 0;
    out.chi_estimate = 0.0;
  } else {
    const ManifoldPatch sp = detail::induced_stratum_patch(patch, st);
    const QuadratureGrid grid(sp.domain, default_nodes_for(st.m, st.m));
    const double integral = integrate(grid, [&](const Vec& s) {
      const FramePointData d = frame_point_data(sp, nullptr, s);
      return lipschitz_killing(d) * d.volDensity;
    });
    out.chi_estimate = integral * std::pow(2.0 * M_PI, -0.5 * st.m);
    out.chi = static_cast<int>(std::lround(out.chi_estimate));
    if (std::abs(out.chi_estimate - out.chi) > 0.1)
      throw std::runtime_error(
          "stratum Euler characteristic did not converge to an integer: " +
          std::to_string(out.chi_estimate));
  }
  if (st.declared_chi && *st.declared_chi != out.chi) {
    std::ostringstream os;
    os << "declared stratum chi " << *st.declared_chi << " does not match computed "
       << out.chi;
    throw std::runtime_error(os.str());
  }
  return out;
}

struct MorseBottRow {
  int stratum = 0;
  int m = 0;
  int nu = 0;
  int chi = 0;
  int contribution = 0;
};

struct MorseBottResult {
  std::vector<MorseBottRow> rows;
  int sum = 0;
};

inline MorseBottResult morse_bott_sum(const ManifoldSpec& spec, const std::string& field_name,
                                      const std::vector<CriticalStratum>& strata,
                                      const std::vector<int>& nodes,
                                      const MorseOptions& opt = {}) {
  MorseBottResult out;
  std::vector<detail::DeclaredSite> sites;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const StratumIndex si = stratum_index(spec, field_name, strata[i], opt);
    const int contrib = ((si.nu % 2 == 0) ? 1 : -1) * si.chi;
    out.rows.push_back({static_cast<int>(i), strata[i].m, si.nu, si.chi, contrib});
    out.sum += contrib;
    const auto ss = detail::stratum_sites(spec, strata[i], opt.coverage_radius);
    sites.insert(sites.end(), ss.begin(), ss.end());
  }
  check_zero_coverage(spec, field_name, sites, nodes, opt);
  return out;
}

// ---------------------------------------------------------------------------
// Second fundamental form and the Gauss equation on strata
// ---------------------------------------------------------------------------

struct GaussEquationReport {
  double max_residual = 0.0;       // |Rtilde - (R - S)| over tangential indices
  double frame_orthogonality = 0.0;  // tangent/normal adapted-frame defect
  Mat ii_formula;   // II(a,b) in normal direction k: rows (a*m+b), cols k
  Mat ii_direct;    // same components from numerical covariant derivatives
};

/// At sample points of the stratum, builds the adapted orthonormal frame
/// (tangent part from the parametrization, normal part from the Hessian
/// eigenvectors), forms the second fundamental form from third derivatives
/// II(a,b) = -sum_k phi_abk / lambda_k, the Gauss tensor
/// S_abcd = sum_k (phi_ack phi_bdk - phi_bck phi_adk)/lambda_k^2, and
/// compares Rtilde = R - S against the intrinsic curvature of the induced
/// metric.
inline GaussEquationReport gauss_equation_check(const ManifoldSpec& spec,
                                                const std::string& field_name,
                                                const CriticalStratum& st,
                                                int sample_count = 3,
                                                const MorseOptions& opt = {}) {
  if (st.m < 1) throw std::invalid_argument("gauss_equation_check: stratum dimension >= 1");
  const ManifoldPatch& patch = spec.patches.at(st.patch);
  const ScalarField& field = spec.field(field_name)[st.patch];
  const int n = patch.n, m = st.m;

  const ManifoldPatch sp = detail::induced_stratum_patch(patch, st);
  GaussEquationReport rep;
  rep.ii_formula = Mat::Zero(m * m, n - m);
  rep.ii_direct = Mat::Zero(m * m, n - m);

  const std::vector<Vec> samples = detail::stratum_verification_points(st, sample_count);
  for (const Vec& s : samples) {
    const Vec u = st.embed(s);
    const Mat g = metric_checked(patch, u);

    // tangent frame: parametrization Jacobian orthonormalized through the
    // Cholesky factor of the induced metric (same frame the stratum's own
    // curvature computation uses)
    const Mat J = detail::stratum_jacobian(st, s, sp.fd);
    const Mat gind = J.transpose() * g * J;
    Eigen::LLT<Mat> llt_ind(gind);
    if (llt_ind.info() != Eigen::Success)
      throw std::runtime_error("gauss_equation_check: induced metric not positive definite");
    const Mat Lind = llt_ind.matrixL();
    const Mat tangent = J * Mat(Lind.transpose().inverse());  // n x m, chart components

    // normal frame: Hessian eigenvectors with nonzero eigenvalue
    const OneFormData of = covariant_oneform(patch, field, u);
    const Mat E = cholesky_frame(g);
    const Mat sym = 0.5 * (of.w + of.w.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    Mat normal(n, n - m);
    Vec lambda(n - m);
    int k = 0;
    for (int i = 0; i < n; ++i) {
      const double lam = es.eigenvalues()[i];
      if (std::abs(lam) <= opt.stratum_eig_tol) continue;
      if (std::abs(lam) < 1e-6)
        throw std::invalid_argument("gauss_equation_check: normal Hessian nearly degenerate");
      if (k >= n - m)
        throw std::invalid_argument(
            "gauss_equation_check: Hessian rank exceeds the declared codimension");
      normal.col(k) = E * es.eigenvectors().col(i);  // chart components
      lambda[k] = lam;
      ++k;
    }
    if (k != n - m)
      throw std::invalid_argument("gauss_equation_check: Hessian rank below codimension");

    Mat frame(n, n);
    frame.leftCols(m) = tangent;
    frame.rightCols(n - m) = normal;
    const Mat gram = frame.transpose() * g * frame;
    rep.frame_orthogonality =
        std::max(rep.frame_orthogonality, (gram - Mat::Identity(n, n)).cwiseAbs().maxCoeff());

    // third derivatives and ambient curvature in the adapted frame
    const Tensor4 t3 = push_third(covariant_third_chart(patch, field, u), frame);
    const Tensor4 Ramb = push_tensor4(riemann_chart(patch, u), frame);

    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int kk = 0; kk < n - m; ++kk)
          rep.ii_formula(a * m + b, kk) +=
              -t3(a, b, m + kk, 0) / lambda[kk] / static_cast<double>(samples.size());

    // direct second fundamental form: normal part of the covariant
    // derivative of coordinate tangent fields
    const std::vector<Mat> gam = christoffel(patch, u);
    const Mat Linv = Lind.transpose().inverse();  // tangent frame change
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        Vec acc(n);
        for (int c = 0; c < n; ++c) {
          double v = fd::d2(
              [&st, c](const Vec& sv) { return st.embed(sv)[c]; }, s, a, b,
              sp.fd.h[a], sp.fd.h[b], true);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) v += gam[c](i, j) * J(i, a) * J(j, b);
          acc[c] = v;
        }
        // II is tensorial: push (a,b) to orthonormal tangent labels
        for (int kk = 0; kk < n - m; ++kk) {
          const double comp = acc.dot(g * normal.col(kk));
          for (int ap = 0; ap < m; ++ap)
            for (int bp = 0; bp < m; ++bp)
              rep.ii_direct(ap * m + bp, kk) += Linv(a, ap) * Linv(b, bp) * comp /
                                                static_cast<double>(samples.size());
        }
      }

    // Gauss tensor and intrinsic curvature
    Tensor4 S(m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int d = 0; d < m; ++d) {
            double v = 0.0;
            for (int kk = 0; kk < n - m; ++kk)
              v += (t3(a, c, m + kk, 0) * t3(b, d, m + kk, 0) -
                    t3(b, c, m + kk, 0) * t3(a, d, m + kk, 0)) /
                   (lambda[kk] * lambda[kk]);
            S(a, b, c, d) = v;
          }

    const Tensor4 Rint = (m >= 2) ? riemann_frame(sp, s) : Tensor4(m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int d = 0; d < m; ++d) {
            const double resid =
                std::abs(Rint(a, b, c, d) - (Ramb(a, b, c, d) - S(a, b, c, d)));
            rep.max_residual = std::max(rep.max_residual, resid);
          }
  }
  return rep;
}

}  // namespace eulerint
