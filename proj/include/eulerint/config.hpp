#pragma once

// JSON experiment configuration: manifold (catalog name or custom metric
// expressions), field (named or expression), quadrature settings, t-list,
// declared critical points and strata, output paths.

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "eulerint/expr.hpp"
#include "eulerint/geometry.hpp"
#include "eulerint/morse.hpp"

namespace eulerint {

using ojson = nlohmann::ordered_json;

struct QuadSettings {
  std::vector<int> nodes;  // per axis; empty = manifold defaults
  double tol = 1e-8;
  int max_nodes = 512;
  bool refine = false;  // double node counts until successive values agree to tol
};

struct ExperimentConfig {
  ManifoldSpec manifold;
  std::string field_name;
  std::vector<double> t_list;
  QuadSettings quad;
  double tolerance = 0.0;     // chi tolerance; 0 picks a dimension default
  double sp_tolerance = 0.05;  // stationary-phase agreement at the largest t
  std::vector<CriticalPointDecl> points;
  std::vector<CriticalStratum> strata;
  std::string out_base;
  ojson echo;

  std::vector<int> nodes_or_default() const {
    if (!quad.nodes.empty()) return quad.nodes;
    return manifold.default_nodes;
  }
  double chi_tolerance_or_default() const {
    if (tolerance > 0.0) return tolerance;
    return manifold.n <= 2 ? 1e-5 : 1e-3;
  }
};

namespace configdetail {

[[noreturn]] inline void fail(const std::string& where, const std::string& msg) {
  throw std::invalid_argument("config error at " + where + ": " + msg);
}

inline double number_at(const ojson& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

inline Domain parse_domain(const ojson& j, const ojson* periodic, const ojson* rules,
                           const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected an array of [lo, hi] pairs");
  Domain dom;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const ojson& pair = j[i];
    if (!pair.is_array() || pair.size() != 2)
      fail(where + "[" + std::to_string(i) + "]", "expected [lo, hi]");
    Axis ax;
    ax.lo = number_at(pair[0], where);
    ax.hi = number_at(pair[1], where);
    if (!(ax.hi > ax.lo)) fail(where, "axis bounds must satisfy lo < hi");
    ax.periodic = false;
    if (periodic) {
      if (!periodic->is_array() || periodic->size() != j.size())
        fail(where, "'periodic' must match the domain axis count");
      ax.periodic = (*periodic)[i].get<bool>();
    }
    ax.rule = ax.periodic ? AxisRule::Trapezoid : AxisRule::GaussLegendre;
    if (rules) {
      if (!rules->is_array() || rules->size() != j.size())
        fail(where, "'rules' must match the domain axis count");
      const std::string r = (*rules)[i].get<std::string>();
      if (r == "gl")
        ax.rule = AxisRule::GaussLegendre;
      else if (r == "gl_cos")
        ax.rule = AxisRule::GaussLegendreCos;
      else if (r == "trapezoid")
        ax.rule = AxisRule::Trapezoid;
      else
        fail(where, "unknown axis rule '" + r + "' (gl, gl_cos, trapezoid)");
    }
    dom.axes.push_back(ax);
  }
  return dom;
}

inline ManifoldSpec build_manifold(const ojson& j, const std::string& where) {
  if (!j.is_object() || !j.contains("name")) fail(where, "manifold needs a 'name'");
  const std::string name = j["name"].get<std::string>();

  if (name == "sphere") {
    const double r = j.value("radius", 1.0);
    const int patches = j.value("patches", 1);
    if (patches != 1 && patches != 2) fail(where, "sphere supports 1 or 2 patches");
    return make_sphere(r, patches == 2);
  }
  if (name == "embedded_torus") {
    return make_embedded_torus(j.value("R", 2.0), j.value("r", 1.0));
  }
  if (name == "flat_torus") {
    std::vector<double> lengths = {2 * M_PI, 2 * M_PI};
    if (j.contains("lengths")) lengths = j["lengths"].get<std::vector<double>>();
    return make_flat_torus(lengths);
  }
  if (name == "product") {
    if (!j.contains("factors") || !j["factors"].is_array() || j["factors"].size() != 2)
      fail(where, "product needs a 'factors' array with two entries");
    const ManifoldSpec a = build_manifold(j["factors"][0], where + "/factors[0]");
    const ManifoldSpec b = build_manifold(j["factors"][1], where + "/factors[1]");
    return make_product(a, b);
  }
  if (name == "custom") {
    if (!j.contains("dim") || !j.contains("domain") || !j.contains("metric"))
      fail(where, "custom manifold needs 'dim', 'domain' and 'metric'");
    const int n = j["dim"].get<int>();
    const ojson* periodic = j.contains("periodic") ? &j["periodic"] : nullptr;
    const ojson* rules = j.contains("rules") ? &j["rules"] : nullptr;
    Domain dom = parse_domain(j["domain"], periodic, rules, where + "/domain");
    if (dom.dim() != n) fail(where, "'domain' must have 'dim' axes");

    const ojson& mj = j["metric"];
    if (!mj.is_array() || static_cast<int>(mj.size()) != n)
      fail(where + "/metric", "expected an n x n array of expressions");
    std::vector<std::vector<Expr>> entries(n);
    for (int i = 0; i < n; ++i) {
      if (!mj[i].is_array() || static_cast<int>(mj[i].size()) != n)
        fail(where + "/metric", "expected an n x n array of expressions");
      for (int k = 0; k < n; ++k) {
        Expr e = Expr::parse(mj[i][k].get<std::string>());
        if (e.uses_xyz()) fail(where + "/metric", "metric entries must use u1..un only");
        entries[i].push_back(std::move(e));
      }
    }
    MetricFn metric = [entries, n](const Vec& u) {
      Mat g(n, n);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) g(i, k) = entries[i][k].eval(u);
      return g;
    };

    EmbedFn embed = nullptr;
    if (j.contains("embedding")) {
      const ojson& ej = j["embedding"];
      if (!ej.is_array() || ej.empty()) fail(where + "/embedding", "expected expressions");
      std::vector<Expr> coords;
      for (const auto& c : ej) {
        Expr e = Expr::parse(c.get<std::string>());
        if (e.uses_xyz()) fail(where + "/embedding", "embedding uses u1..un only");
        coords.push_back(std::move(e));
      }
      embed = [coords](const Vec& u) {
        Vec p(coords.size());
        for (std::size_t i = 0; i < coords.size(); ++i) p[i] = coords[i].eval(u);
        return p;
      };
    }
    return make_custom(n, std::move(dom), std::move(metric), std::move(embed));
  }
  fail(where, "unknown manifold '" + name +
                  "' (sphere, embedded_torus, flat_torus, product, custom)");
}

/// Registers the requested field on the manifold and returns its key.
inline std::string resolve_field(ManifoldSpec& spec, const ojson& j, const std::string& where) {
  if (j.contains("name")) {
    const std::string fname = j["name"].get<std::string>();
    spec.field(fname);  // throws with a clear message if missing
    return fname;
  }
  if (j.contains("expr")) {
    const std::string text = j["expr"].get<std::string>();
    const Expr e = Expr::parse(text);
    if (e.max_var() > 0 && spec.patches.size() > 1)
      fail(where, "expression fields with u-variables need a single-patch manifold");
    if (e.max_var() > spec.n)
      fail(where, "expression uses u" + std::to_string(e.max_var()) +
                      " but the manifold has dimension " + std::to_string(spec.n));
    std::vector<ScalarField> fs;
    for (const auto& patch : spec.patches) {
      if (e.uses_xyz() && !patch.embed)
        fail(where, "expression uses x/y/z but the manifold has no embedding");
      const EmbedFn embed = patch.embed;
      const bool xyz = e.uses_xyz();
      fs.push_back(ScalarField{[e, embed, xyz](const Vec& u) {
        return xyz ? e.eval(u, embed(u)) : e.eval(u);
      }});
    }
    const std::string key = "expr:" + text;
    spec.fields[key] = std::move(fs);
    return key;
  }
  fail(where, "field needs either 'name' or 'expr'");
}

inline CriticalPointDecl parse_point(const ojson& j, const ManifoldSpec& spec,
                                     const std::string& where) {
  CriticalPointDecl d;
  if (!j.contains("u")) fail(where, "critical point needs chart coordinates 'u'");
  const auto coords = j["u"].get<std::vector<double>>();
  if (static_cast<int>(coords.size()) != spec.n)
    fail(where, "'u' must have the manifold dimension");
  d.u = Eigen::Map<const Vec>(coords.data(), coords.size());
  d.patch = j.value("patch", 0);
  if (d.patch < 0 || d.patch >= static_cast<int>(spec.patches.size()))
    fail(where, "'patch' out of range");
  if (j.contains("index")) d.expected_index = j["index"].get<int>();
  return d;
}

inline CriticalStratum parse_stratum(const ojson& j, const ManifoldSpec& spec,
                                     const std::string& where) {
  CriticalStratum st;
  if (!j.contains("dim")) fail(where, "stratum needs 'dim'");
  st.m = j["dim"].get<int>();
  if (st.m < 0 || st.m >= spec.n) fail(where, "stratum dimension out of range");
  st.patch = j.value("patch", 0);
  if (st.patch < 0 || st.patch >= static_cast<int>(spec.patches.size()))
    fail(where, "'patch' out of range");

  if (!j.contains("embed")) fail(where, "stratum needs an 'embed' expression array");
  const ojson& ej = j["embed"];
  if (!ej.is_array() || static_cast<int>(ej.size()) != spec.n)
    fail(where + "/embed", "expected one expression per ambient chart coordinate");
  std::vector<Expr> coords;
  for (const auto& c : ej) {
    Expr e = Expr::parse(c.get<std::string>());
    if (e.uses_xyz()) fail(where + "/embed", "stratum parametrizations use s1..sm only");
    if (e.max_var() > st.m)
      fail(where + "/embed", "parametrization uses s" + std::to_string(e.max_var()) +
                                 " but the stratum has dimension " + std::to_string(st.m));
    coords.push_back(std::move(e));
  }
  st.embed = [coords](const Vec& s) {
    Vec u(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) u[i] = coords[i].eval(s);
    return u;
  };

  if (st.m > 0) {
    if (!j.contains("domain")) fail(where, "a stratum of positive dimension needs 'domain'");
    const ojson* periodic = j.contains("periodic") ? &j["periodic"] : nullptr;
    const ojson* rules = j.contains("rules") ? &j["rules"] : nullptr;
    st.domain = parse_domain(j["domain"], periodic, rules, where + "/domain");
    if (st.domain.dim() != st.m) fail(where, "'domain' must have 'dim' axes");
  }
  if (j.contains("nu")) st.declared_nu = j["nu"].get<int>();
  if (j.contains("chi")) st.declared_chi = j["chi"].get<int>();
  return st;
}

}  // namespace configdetail

inline ExperimentConfig load_config(const ojson& j) {
  using namespace configdetail;
  if (!j.is_object()) fail("/", "top-level config must be an object");
  ExperimentConfig cfg;
  cfg.echo = j;

  if (!j.contains("manifold")) fail("/manifold", "missing");
  cfg.manifold = build_manifold(j["manifold"], "/manifold");

  if (j.contains("field")) cfg.field_name = resolve_field(cfg.manifold, j["field"], "/field");

  if (j.contains("t")) {
    if (!j["t"].is_array()) fail("/t", "expected an array");
    double prev = 0.0;
    for (const auto& tv : j["t"]) {
      const double t = number_at(tv, "/t");
      if (!(t > 0.0)) fail("/t", "t values must be strictly positive");
      if (!(t > prev)) fail("/t", "t values must be strictly increasing");
      cfg.t_list.push_back(t);
      prev = t;
    }
  }

  if (j.contains("quadrature")) {
    const ojson& q = j["quadrature"];
    if (q.contains("nodes")) {
      if (q["nodes"].is_number_integer()) {
        const int n = q["nodes"].get<int>();
        if (n < 2) fail("/quadrature/nodes", "need at least 2 nodes per axis");
        cfg.quad.nodes.assign(cfg.manifold.patches[0].domain.axes.size(), n);
      } else if (q["nodes"].is_array()) {
        cfg.quad.nodes = q["nodes"].get<std::vector<int>>();
        if (cfg.quad.nodes.size() != cfg.manifold.patches[0].domain.axes.size())
          fail("/quadrature/nodes", "one count per axis required");
      } else {
        fail("/quadrature/nodes", "expected an integer or an array");
      }
    }
    cfg.quad.tol = q.value("tol", cfg.quad.tol);
    cfg.quad.max_nodes = q.value("max_nodes", cfg.quad.max_nodes);
    cfg.quad.refine = q.value("refine", cfg.quad.refine);
  }

  cfg.tolerance = j.value("tolerance", 0.0);
  cfg.sp_tolerance = j.value("sp_tolerance", 0.05);

  if (j.contains("critical_points")) {
    const ojson& pts = j["critical_points"];
    if (!pts.is_array()) fail("/critical_points", "expected an array");
    for (std::size_t i = 0; i < pts.size(); ++i)
      cfg.points.push_back(parse_point(pts[i], cfg.manifold,
                                       "/critical_points[" + std::to_string(i) + "]"));
  }
  if (j.contains("strata")) {
    const ojson& sts = j["strata"];
    if (!sts.is_array()) fail("/strata", "expected an array");
    for (std::size_t i = 0; i < sts.size(); ++i)
      cfg.strata.push_back(
          parse_stratum(sts[i], cfg.manifold, "/strata[" + std::to_string(i) + "]"));
  }

  if (j.contains("output")) cfg.out_base = j["output"].get<std::string>();
  return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  ojson j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("config parse failure in '" + path + "': " + e.what());
  }
  return load_config(j);
}

}  // namespace eulerint
