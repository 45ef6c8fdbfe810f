#pragma once

// Command implementations behind the CLI: Gauss-Bonnet, the t-interpolation
// table, Poincare-Hopf (with the stationary-phase cross-check), degenerate
// Poincare-Hopf over declared strata, and the oracle selftest. Each returns
// a Report; exit status is "every requested check passed".

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "eulerint/config.hpp"
#include "eulerint/integrand.hpp"
#include "eulerint/morse.hpp"
#include "eulerint/report.hpp"
#include "eulerint/selfcheck.hpp"

namespace eulerint {

namespace rundetail {

inline std::string coords(const Vec& u) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < u.size(); ++i) os << (i ? "," : "") << reportdetail::fmt(u[i]);
  os << ")";
  return os.str();
}

/// Integral of f(point data) over the whole manifold (all patches, weights
/// folded into the volume density).
inline double integrate_over(const ManifoldSpec& spec, const std::string& field_name,
                             const std::vector<int>& nodes,
                             const std::function<double(const FramePointData&)>& f) {
  const std::vector<ScalarField>* fields = nullptr;
  if (!field_name.empty()) fields = &spec.field(field_name);
  double total = 0.0;
  for (std::size_t pi = 0; pi < spec.patches.size(); ++pi) {
    const ManifoldPatch& patch = spec.patches[pi];
    const QuadratureGrid grid(patch.domain, nodes);
    total += integrate(grid, [&](const Vec& u) {
      const FramePointData d = frame_point_data(patch, fields ? &(*fields)[pi] : nullptr, u);
      return f(d);
    });
  }
  return total;
}

/// The interpolation integral for every t in one sweep over the points.
inline std::vector<double> interp_integrals(const ManifoldSpec& spec,
                                            const std::string& field_name,
                                            const std::vector<int>& nodes,
                                            const std::vector<double>& t_list) {
  const std::vector<ScalarField>& fields = spec.field(field_name);
  const int k = static_cast<int>(t_list.size());
  const int n = spec.n;
  std::vector<double> total(k, 0.0);
  for (std::size_t pi = 0; pi < spec.patches.size(); ++pi) {
    const ManifoldPatch& patch = spec.patches[pi];
    const QuadratureGrid grid(patch.domain, nodes);
    const std::vector<double> part = integrate_multi(
        grid,
        [&](const Vec& u, std::vector<double>& out) {
          const FramePointData d = frame_point_data(patch, &fields[pi], u);
          const AlphaVector a = alpha_at(d);
          for (int i = 0; i < k; ++i) {
            const double t = t_list[i];
            double poly = 0.0, tp = 1.0;
            for (double aj : a.values) {
              poly += tp * aj;
              tp *= t;
            }
            out[i] = std::pow(M_PI, -0.5 * n) * poly * std::exp(-t * d.xiNormSq) *
                     d.volDensity;
          }
        },
        k);
    for (int i = 0; i < k; ++i) total[i] += part[i];
  }
  return total;
}

inline void require_even_dim(const ManifoldSpec& spec, const std::string& cmd) {
  if (spec.n % 2 != 0)
    throw std::invalid_argument(cmd + ": even-dimensional manifold required");
}

struct RefinedValue {
  double value = 0.0;
  std::vector<int> nodes;
  bool converged = true;  // stays true when refinement was not requested
  double estimate = 0.0;
};

/// Command-level refinement: doubles the whole-manifold grid until two
/// successive totals agree to quad.tol or the per-axis cap is reached.
/// Hitting the cap flags the result, it does not fail it.
inline RefinedValue refined_integral(const ExperimentConfig& cfg,
                                     const std::function<double(const std::vector<int>&)>& eval) {
  RefinedValue out;
  out.nodes = cfg.nodes_or_default();
  out.value = eval(out.nodes);
  if (!cfg.quad.refine) return out;
  double prev = out.value;
  while (true) {
    bool grown = false;
    for (int& c : out.nodes)
      if (2 * c <= cfg.quad.max_nodes) {
        c *= 2;
        grown = true;
      }
    if (!grown) {
      out.converged = false;
      return out;
    }
    const double cur = eval(out.nodes);
    out.estimate = std::abs(cur - prev);
    out.value = cur;
    if (out.estimate < cfg.quad.tol) return out;
    prev = cur;
  }
}

}  // namespace rundetail

inline Report cmd_gbc(const ExperimentConfig& cfg) {
  rundetail::require_even_dim(cfg.manifold, "gbc");
  Report rep;
  rep.command = "gbc";
  rep.config_echo = cfg.echo;
  const rundetail::RefinedValue rv = rundetail::refined_integral(cfg, [&](const auto& nodes) {
    return rundetail::integrate_over(cfg.manifold, "", nodes, [](const FramePointData& d) {
             return lipschitz_killing(d) * d.volDensity;
           }) *
           std::pow(2.0 * M_PI, -0.5 * cfg.manifold.n);
  });
  const double chi = rv.value;
  const double rounded = std::round(chi);
  const double tol = cfg.chi_tolerance_or_default();
  CheckRow row;
  row.method = "gbc";
  row.value = chi;
  row.tolerance = tol;
  row.pass = std::abs(chi - rounded) <= tol;
  row.note = "chi(" + cfg.manifold.name + ") ~ " + reportdetail::fmt(rounded);
  if (!rv.converged) row.note += " [refinement hit the node cap]";
  rep.rows.push_back(row);
  rep.extra["chi_rounded"] = rounded;
  rep.extra["rounding_distance"] = std::abs(chi - rounded);
  rep.extra["nodes"] = rv.nodes;
  if (cfg.quad.refine) {
    rep.extra["refinement_converged"] = rv.converged;
    rep.extra["refinement_estimate"] = rv.estimate;
  }
  return rep;
}

inline Report cmd_interp(const ExperimentConfig& cfg) {
  rundetail::require_even_dim(cfg.manifold, "interp");
  if (cfg.field_name.empty())
    throw std::invalid_argument("config error at /field: interp needs a field");
  if (cfg.t_list.empty())
    throw std::invalid_argument("config error at /t: interp needs a non-empty t list");
  Report rep;
  rep.command = "interp";
  rep.config_echo = cfg.echo;
  const std::vector<int> nodes = cfg.nodes_or_default();
  const std::vector<double> vals =
      rundetail::interp_integrals(cfg.manifold, cfg.field_name, nodes, cfg.t_list);
  const double tol = (cfg.tolerance > 0.0) ? cfg.tolerance : 2e-3;
  const double chi = std::round(vals[0]);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    CheckRow row;
    row.method = "interp";
    row.t = cfg.t_list[i];
    row.value = vals[i];
    row.tolerance = tol;
    row.pass = std::abs(vals[i] - chi) <= tol;
    row.note = "vs chi = " + reportdetail::fmt(chi);
    rep.rows.push_back(row);
  }
  double dev = 0.0;
  for (double a : vals)
    for (double b : vals) dev = std::max(dev, std::abs(a - b));
  CheckRow drow;
  drow.method = "interp-deviation";
  drow.value = dev;
  drow.tolerance = tol;
  drow.pass = dev <= tol;
  drow.note = "max pairwise deviation over the t list";
  rep.rows.push_back(drow);
  rep.extra["chi_rounded"] = chi;
  rep.extra["nodes"] = nodes;
  return rep;
}

inline Report cmd_ph(const ExperimentConfig& cfg) {
  if (cfg.field_name.empty())
    throw std::invalid_argument("config error at /field: ph needs a field");
  if (cfg.points.empty())
    throw std::invalid_argument("config error at /critical_points: ph needs declared points");
  Report rep;
  rep.command = "ph";
  rep.config_echo = cfg.echo;
  const std::vector<int> nodes = cfg.nodes_or_default();
  const PhResult ph = poincare_hopf_sum(cfg.manifold, cfg.field_name, cfg.points, nodes);
  for (const auto& r : ph.rows) {
    CheckRow row;
    row.method = "ph-point";
    row.value = r.nu;
    row.note = "sign " + std::string(r.sign > 0 ? "+1" : "-1") + " at " +
               rundetail::coords(r.decl.u) + " patch " + std::to_string(r.decl.patch);
    rep.rows.push_back(row);
  }
  CheckRow sum;
  sum.method = "ph-sum";
  sum.value = ph.sum;
  sum.note = "chi from indices";
  rep.rows.push_back(sum);

  if (!cfg.t_list.empty() && cfg.manifold.n % 2 == 0) {
    const StationaryPhaseResult sp = stationary_phase_check(
        cfg.manifold, cfg.field_name, cfg.points, cfg.t_list, nodes);
    for (std::size_t i = 0; i < sp.rows.size(); ++i) {
      CheckRow row;
      row.method = "stationary-phase";
      row.t = sp.rows[i].t;
      row.value = sp.rows[i].value;
      if (i + 1 == sp.rows.size()) {
        row.tolerance = cfg.sp_tolerance;
        row.pass = std::abs(sp.rows[i].value - ph.sum) <= cfg.sp_tolerance;
        row.note = "vs index sum " + std::to_string(ph.sum);
      } else {
        row.note = "approach to the index sum";
      }
      rep.rows.push_back(row);
    }
    CheckRow hess;
    hess.method = "hessian-identity";
    hess.value = sp.hessian_residual;
    hess.tolerance = 1e-4;
    hess.pass = sp.hessian_residual < 1e-4;
    hess.note = "Hess|xi|^2 = 2 w w^T at the declared zeros";
    rep.rows.push_back(hess);
    CheckRow det;
    det.method = "hessian-det-identity";
    det.value = sp.det_identity_residual;
    det.tolerance = 1e-4;
    det.pass = sp.det_identity_residual < 1e-4;
    det.note = "det Hess|xi|^2 = 2^n det(w)^2, relative";
    rep.rows.push_back(det);

    const std::vector<double> interp =
        rundetail::interp_integrals(cfg.manifold, cfg.field_name, nodes, cfg.t_list);
    const double tol = (cfg.tolerance > 0.0) ? cfg.tolerance : 2e-3;
    for (std::size_t i = 0; i < interp.size(); ++i) {
      CheckRow row;
      row.method = "interp-cross-check";
      row.t = cfg.t_list[i];
      row.value = interp[i];
      row.tolerance = tol;
      row.pass = std::abs(interp[i] - ph.sum) <= tol;
      row.note = "vs index sum " + std::to_string(ph.sum);
      rep.rows.push_back(row);
    }
  }
  rep.extra["index_sum"] = ph.sum;
  rep.extra["nodes"] = nodes;
  return rep;
}

inline Report cmd_morse_bott(const ExperimentConfig& cfg) {
  if (cfg.field_name.empty())
    throw std::invalid_argument("config error at /field: morse-bott needs a field");
  if (cfg.strata.empty())
    throw std::invalid_argument("config error at /strata: morse-bott needs declared strata");
  Report rep;
  rep.command = "morse-bott";
  rep.config_echo = cfg.echo;
  const std::vector<int> nodes = cfg.nodes_or_default();
  const MorseBottResult mb = morse_bott_sum(cfg.manifold, cfg.field_name, cfg.strata, nodes);
  for (const auto& r : mb.rows) {
    CheckRow row;
    row.method = "stratum";
    row.value = r.contribution;
    row.note = "dim " + std::to_string(r.m) + ", nu " + std::to_string(r.nu) + ", chi " +
               std::to_string(r.chi);
    rep.rows.push_back(row);
  }
  CheckRow sum;
  sum.method = "morse-bott-sum";
  sum.value = mb.sum;
  sum.note = "chi from strata";
  rep.rows.push_back(sum);

  if (!cfg.t_list.empty() && cfg.manifold.n % 2 == 0) {
    const std::vector<double> interp =
        rundetail::interp_integrals(cfg.manifold, cfg.field_name, nodes, cfg.t_list);
    const double tol = (cfg.tolerance > 0.0) ? cfg.tolerance : 2e-3;
    for (std::size_t i = 0; i < interp.size(); ++i) {
      CheckRow row;
      row.method = "interp-cross-check";
      row.t = cfg.t_list[i];
      row.value = interp[i];
      row.tolerance = tol;
      row.pass = std::abs(interp[i] - mb.sum) <= tol;
      row.note = "vs stratum sum " + std::to_string(mb.sum);
      rep.rows.push_back(row);
    }
  }
  rep.extra["stratum_sum"] = mb.sum;
  rep.extra["nodes"] = nodes;
  return rep;
}

inline Report cmd_selftest() {
  Report rep;
  rep.command = "selftest";
  rep.config_echo = nullptr;
  for (const auto& c : selfcheck::run_selfchecks()) {
    CheckRow row;
    row.method = c.name;
    row.value = c.residual;
    row.tolerance = c.tolerance;
    row.pass = c.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace eulerint
