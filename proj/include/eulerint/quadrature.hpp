#pragma once

// Deterministic product quadrature: Gauss-Legendre on bounded axes,
// trapezoid on periodic axes, and a Gauss-Legendre-in-cos rule for polar
// angles on (0, pi). Node evaluation may run on several threads; the
// reduction is a fixed-order pairwise sum, so results are bit-identical
// regardless of thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace eulerint {

enum class AxisRule { GaussLegendre, Trapezoid, GaussLegendreCos };

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;
  AxisRule rule = AxisRule::GaussLegendre;
};

struct Domain {
  std::vector<Axis> axes;
  int dim() const { return static_cast<int>(axes.size()); }
};

struct AxisGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline AxisGrid gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  AxisGrid g;
  g.nodes.resize(n);
  g.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    g.weights[i] = w;
    g.weights[n - 1 - i] = w;
  }
  return g;
}

inline AxisGrid make_axis_grid(const Axis& axis, int n) {
  if (n < 1) throw std::invalid_argument("quadrature: need at least one node per axis");
  AxisGrid g;
  switch (axis.rule) {
    case AxisRule::Trapezoid: {
      // Uniform rule on a periodic axis; integrates e^{iku} exactly for |k| < n.
      const double h = (axis.hi - axis.lo) / n;
      g.nodes.resize(n);
      g.weights.assign(n, h);
      for (int i = 0; i < n; ++i) g.nodes[i] = axis.lo + i * h;
      break;
    }
    case AxisRule::GaussLegendre: {
      AxisGrid u = gauss_legendre_unit(n);
      const double c = 0.5 * (axis.hi + axis.lo), r = 0.5 * (axis.hi - axis.lo);
      g.nodes.resize(n);
      g.weights.resize(n);
      for (int i = 0; i < n; ++i) {
        g.nodes[i] = c + r * u.nodes[i];
        g.weights[i] = r * u.weights[i];
      }
      break;
    }
    case AxisRule::GaussLegendreCos: {
      // Polar-angle rule on (0, pi): Gauss-Legendre in cos(theta), folded
      // back so that the integrand is an ordinary d(theta) density. Nodes
      // stay strictly inside (0, pi).
      if (std::abs(axis.lo) > 1e-12 || std::abs(axis.hi - M_PI) > 1e-12)
        throw std::invalid_argument("GaussLegendreCos axis must span [0, pi]");
      AxisGrid u = gauss_legendre_unit(n);
      g.nodes.resize(n);
      g.weights.resize(n);
      for (int i = 0; i < n; ++i) {
        const double x = u.nodes[n - 1 - i];  // descending cos -> ascending theta
        g.nodes[i] = std::acos(x);
        g.weights[i] = u.weights[n - 1 - i] / std::sqrt(1.0 - x * x);
      }
      break;
    }
  }
  return g;
}

class QuadratureGrid {
 public:
  QuadratureGrid() = default;
  QuadratureGrid(const Domain& domain, const std::vector<int>& counts) {
    if (counts.size() != domain.axes.size())
      throw std::invalid_argument("quadrature: one node count per axis required");
    for (std::size_t i = 0; i < counts.size(); ++i)
      axes_.push_back(make_axis_grid(domain.axes[i], counts[i]));
  }

  int dim() const { return static_cast<int>(axes_.size()); }

  std::size_t size() const {
    std::size_t s = 1;
    for (const auto& a : axes_) s *= a.nodes.size();
    return s;
  }

  void node(std::size_t idx, Eigen::VectorXd& u) const {
    u.resize(dim());
    for (int a = dim() - 1; a >= 0; --a) {
      const std::size_t m = axes_[a].nodes.size();
      u[a] = axes_[a].nodes[idx % m];
      idx /= m;
    }
  }

  double weight(std::size_t idx) const {
    double w = 1.0;
    for (int a = dim() - 1; a >= 0; --a) {
      const std::size_t m = axes_[a].nodes.size();
      w *= axes_[a].weights[idx % m];
      idx /= m;
    }
    return w;
  }

 private:
  std::vector<AxisGrid> axes_;
};

/// Fixed-order pairwise sum over [lo, hi).
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  const std::size_t n = hi - lo;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + n / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v, 0, v.size()); }

inline unsigned default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Evaluates f on every node (possibly on several threads, chunked by node
/// index) and reduces with a pairwise sum. Non-finite values are reported
/// with the offending node's coordinates.
inline double integrate(const QuadratureGrid& grid,
                        const std::function<double(const Eigen::VectorXd&)>& f,
                        unsigned threads = 0) {
  const std::size_t n = grid.size();
  std::vector<double> vals(n);
  if (threads == 0) threads = default_thread_count();
  threads = std::min<std::size_t>(threads, n);

  auto worker = [&](std::size_t lo, std::size_t hi) {
    Eigen::VectorXd u;
    for (std::size_t i = lo; i < hi; ++i) {
      grid.node(i, u);
      vals[i] = f(u) * grid.weight(i);
    }
  };

  if (threads <= 1) {
    worker(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(vals[i])) {
      Eigen::VectorXd u;
      grid.node(i, u);
      std::ostringstream os;
      os << "integrate: non-finite integrand at node (";
      for (int a = 0; a < u.size(); ++a) os << (a ? ", " : "") << u[a];
      os << ")";
      throw std::runtime_error(os.str());
    }
  }
  return pairwise_sum(vals);
}

/// Component-wise variant for integrating several functions of the same
/// point data in one sweep.
inline std::vector<double> integrate_multi(
    const QuadratureGrid& grid,
    const std::function<void(const Eigen::VectorXd&, std::vector<double>&)>& f, int k,
    unsigned threads = 0) {
  const std::size_t n = grid.size();
  std::vector<double> vals(n * k);
  if (threads == 0) threads = default_thread_count();
  threads = std::min<std::size_t>(threads, n);

  auto worker = [&](std::size_t lo, std::size_t hi) {
    Eigen::VectorXd u;
    std::vector<double> buf(k);
    for (std::size_t i = lo; i < hi; ++i) {
      grid.node(i, u);
      f(u, buf);
      const double w = grid.weight(i);
      for (int j = 0; j < k; ++j) vals[std::size_t(j) * n + i] = buf[j] * w;
    }
  };

  if (threads <= 1) {
    worker(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  std::vector<double> out(k);
  for (int j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = vals[std::size_t(j) * n + i];
      if (!std::isfinite(v)) {
        Eigen::VectorXd u;
        grid.node(i, u);
        std::ostringstream os;
        os << "integrate_multi: non-finite integrand (component " << j << ") at node (";
        for (int a = 0; a < u.size(); ++a) os << (a ? ", " : "") << u[a];
        os << ")";
        throw std::runtime_error(os.str());
      }
    }
    out[j] = pairwise_sum(vals, std::size_t(j) * n, std::size_t(j + 1) * n);
  }
  return out;
}

struct RefineResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  std::vector<int> nodes_used;
};

/// Doubles node counts until successive estimates agree to tol or the
/// per-axis cap is reached. Hitting the cap is flagged, not fatal.
inline RefineResult refine_until(const Domain& domain,
                                 const std::function<double(const Eigen::VectorXd&)>& f,
                                 std::vector<int> counts, double tol, int max_nodes,
                                 unsigned threads = 0) {
  if (tol <= 0.0) throw std::invalid_argument("refine_until: tol must be positive");
  RefineResult r;
  double prev = integrate(QuadratureGrid(domain, counts), f, threads);
  double last_diff = std::numeric_limits<double>::quiet_NaN();
  while (true) {
    bool grown = false;
    for (int& c : counts)
      if (2 * c <= max_nodes) {
        c *= 2;
        grown = true;
      }
    if (!grown) {
      r.value = prev;
      r.error_estimate = last_diff;
      r.converged = false;
      r.nodes_used = counts;
      return r;
    }
    const double cur = integrate(QuadratureGrid(domain, counts), f, threads);
    last_diff = std::abs(cur - prev);
    if (last_diff < tol) {
      r.value = cur;
      r.error_estimate = last_diff;
      r.converged = true;
      r.nodes_used = counts;
      return r;
    }
    prev = cur;
  }
}

}  // namespace eulerint
