#pragma once

// Matrix realization of End(Lambda V) on the subset basis: the Clifford
// multiplications c(v) = eps(v) - iota(v), b(v) = eps(v) + iota(v), the
// parity grading, the supertrace, expansion in the monomial basis
// c^I b^J, and bi-symbol extraction into BiForm. This module is the
// brute-force oracle for everything the BiForm path computes.

#include <Eigen/Dense>
#include <bit>
#include <cstdint>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eulerint/exterior.hpp"

namespace eulerint {

constexpr int kMaxCliffordDim = 6;  // monomial tables grow as 8^n

namespace detail {

/// Sign picked up by eps(e_i) or iota(e_i) acting on e_S: parity of the
/// number of elements of S below i.
inline int position_sign(Mask s, int i) {
  return (std::popcount(s & ((1u << i) - 1)) & 1) ? -1 : +1;
}

}  // namespace detail

class CliffordEnd {
 public:
  CliffordEnd() = default;
  CliffordEnd(int n, Eigen::MatrixXd m) : n_(n), m_(std::move(m)) {
    check_dim(n);
    const long d = 1L << n;
    if (m_.rows() != d || m_.cols() != d)
      throw std::invalid_argument("CliffordEnd: matrix must be 2^n x 2^n");
  }

  static CliffordEnd zero(int n) {
    return CliffordEnd(n, Eigen::MatrixXd::Zero(1L << n, 1L << n));
  }
  static CliffordEnd identity(int n) {
    return CliffordEnd(n, Eigen::MatrixXd::Identity(1L << n, 1L << n));
  }

  int dim() const { return n_; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  Eigen::MatrixXd& matrix() { return m_; }

  friend CliffordEnd operator*(const CliffordEnd& a, const CliffordEnd& b) {
    a.require_same_dim(b);
    return CliffordEnd(a.n_, a.m_ * b.m_);
  }
  friend CliffordEnd operator+(const CliffordEnd& a, const CliffordEnd& b) {
    a.require_same_dim(b);
    return CliffordEnd(a.n_, a.m_ + b.m_);
  }
  friend CliffordEnd operator-(const CliffordEnd& a, const CliffordEnd& b) {
    a.require_same_dim(b);
    return CliffordEnd(a.n_, a.m_ - b.m_);
  }
  friend CliffordEnd operator*(double s, const CliffordEnd& a) {
    return CliffordEnd(a.n_, s * a.m_);
  }

 private:
  void require_same_dim(const CliffordEnd& o) const {
    if (n_ != o.n_) throw std::invalid_argument("CliffordEnd: dimension mismatch");
  }

  int n_ = 0;
  Eigen::MatrixXd m_;
};

/// c(v) = eps(v) - iota(v).
inline CliffordEnd c_op(int n, const Eigen::VectorXd& v) {
  check_dim(n);
  if (v.size() != n) throw std::invalid_argument("c_op: vector size mismatch");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(1L << n, 1L << n);
  for (Mask s = 0; s < (1u << n); ++s) {
    for (int i = 0; i < n; ++i) {
      const double vi = v[i];
      if (vi == 0.0) continue;
      const int sgn = detail::position_sign(s, i);
      if (s & (1u << i))
        m(s & ~(1u << i), s) -= sgn * vi;  // -iota
      else
        m(s | (1u << i), s) += sgn * vi;  // +eps
    }
  }
  return CliffordEnd(n, std::move(m));
}

/// b(v) = eps(v) + iota(v).
inline CliffordEnd b_op(int n, const Eigen::VectorXd& v) {
  check_dim(n);
  if (v.size() != n) throw std::invalid_argument("b_op: vector size mismatch");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(1L << n, 1L << n);
  for (Mask s = 0; s < (1u << n); ++s) {
    for (int i = 0; i < n; ++i) {
      const double vi = v[i];
      if (vi == 0.0) continue;
      const int sgn = detail::position_sign(s, i);
      if (s & (1u << i))
        m(s & ~(1u << i), s) += sgn * vi;  // +iota
      else
        m(s | (1u << i), s) += sgn * vi;  // +eps
    }
  }
  return CliffordEnd(n, std::move(m));
}

inline CliffordEnd c_basis(int n, int i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v[i] = 1.0;
  return c_op(n, v);
}
inline CliffordEnd b_basis(int n, int i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v[i] = 1.0;
  return b_op(n, v);
}

/// Parity grading: +1 on even-degree subsets, -1 on odd.
inline CliffordEnd grading(int n) {
  check_dim(n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(1L << n, 1L << n);
  for (Mask s = 0; s < (1u << n); ++s) m(s, s) = (std::popcount(s) & 1) ? -1.0 : 1.0;
  return CliffordEnd(n, std::move(m));
}

/// Sign constant s_n with grading == s_n * c^1..c^n b^1..b^n. Equals
/// (-1)^{n/2} in even dimension; the general value is (-1)^{n(n+1)/2}.
inline int grading_product_sign(int n) { return ((n * (n + 1) / 2) % 2) ? -1 : +1; }

inline double supertrace(const CliffordEnd& a) {
  double t = 0.0;
  for (Mask s = 0; s < (1u << a.dim()); ++s) {
    const double d = a.matrix()(s, s);
    t += (std::popcount(s) & 1) ? -d : d;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Monomial basis c^I b^J. Every monomial is a signed permutation of the
// subset basis, so the whole table is cheap to store and to pair against.
// ---------------------------------------------------------------------------

struct MonomialTable {
  int n = 0;
  // Indexed by mono = maskI * 2^n + maskJ, then by input subset S.
  std::vector<std::vector<std::uint16_t>> perm;
  std::vector<std::vector<std::int8_t>> sgn;
};

namespace detail {

inline void apply_b(int j, std::vector<std::uint16_t>& perm, std::vector<std::int8_t>& sgn) {
  for (std::size_t s = 0; s < perm.size(); ++s) {
    const Mask m = perm[s];
    sgn[s] = static_cast<std::int8_t>(sgn[s] * position_sign(m, j));
    perm[s] = static_cast<std::uint16_t>(m ^ (1u << j));
  }
}

inline void apply_c(int i, std::vector<std::uint16_t>& perm, std::vector<std::int8_t>& sgn) {
  for (std::size_t s = 0; s < perm.size(); ++s) {
    const Mask m = perm[s];
    int sg = position_sign(m, i);
    if (m & (1u << i)) sg = -sg;  // iota branch carries the minus sign
    sgn[s] = static_cast<std::int8_t>(sgn[s] * sg);
    perm[s] = static_cast<std::uint16_t>(m ^ (1u << i));
  }
}

}  // namespace detail

inline const MonomialTable& monomial_table(int n) {
  if (n < 1 || n > kMaxCliffordDim)
    throw std::invalid_argument("monomial_table: dimension must be in [1, 6]");
  static std::unique_ptr<MonomialTable> tables[kMaxCliffordDim + 1];
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  if (!tables[n]) {
    auto t = std::make_unique<MonomialTable>();
    t->n = n;
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t count = dim * dim;
    t->perm.resize(count);
    t->sgn.resize(count);
    for (Mask mi = 0; mi < dim; ++mi) {
      for (Mask mj = 0; mj < dim; ++mj) {
        std::vector<std::uint16_t> perm(dim);
        std::vector<std::int8_t> sgn(dim, 1);
        for (std::size_t s = 0; s < dim; ++s) perm[s] = static_cast<std::uint16_t>(s);
        // c^{i1}..c^{ik} b^{j1}..b^{jl} with ascending indices: the
        // rightmost factor acts first.
        for (int j = n - 1; j >= 0; --j)
          if (mj & (1u << j)) detail::apply_b(j, perm, sgn);
        for (int i = n - 1; i >= 0; --i)
          if (mi & (1u << i)) detail::apply_c(i, perm, sgn);
        const std::size_t mono = (std::size_t(mi) << n) | mj;
        t->perm[mono] = std::move(perm);
        t->sgn[mono] = std::move(sgn);
      }
    }
    tables[n] = std::move(t);
  }
  return *tables[n];
}

inline CliffordEnd monomial_matrix(int n, Mask mi, Mask mj) {
  const MonomialTable& t = monomial_table(n);
  const std::size_t mono = (std::size_t(mi) << n) | mj;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(1L << n, 1L << n);
  for (std::size_t s = 0; s < t.perm[mono].size(); ++s)
    m(t.perm[mono][s], s) = t.sgn[mono][s];
  return CliffordEnd(n, std::move(m));
}

/// Coefficients A_{IJ} with A = sum A_{IJ} c^I b^J over ascending
/// multi-indices, encoded as subset masks.
struct MonomialCoeffs {
  int n = 0;
  std::vector<double> a;  // indexed by (maskI << n) | maskJ

  double at(Mask mi, Mask mj) const { return a[(std::size_t(mi) << n) | mj]; }
};

namespace detail {

inline std::string mask_to_string(Mask m) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (int i = 0; i < 32; ++i)
    if (m & (1u << i)) {
      if (!first) os << ",";
      os << (i + 1);
      first = false;
    }
  os << "}";
  return os.str();
}

}  // namespace detail

/// Expansion via the trace pairing <A,B> = tr(A^T B) / 2^n, under which the
/// 4^n monomials are an orthogonal basis of norm one. The reconstruction is
/// re-checked; a residual above tol signals a basis or sign bug.
inline MonomialCoeffs monomial_expand(const CliffordEnd& a, double tol = 1e-9) {
  const int n = a.dim();
  const MonomialTable& t = monomial_table(n);
  const std::size_t dim = std::size_t{1} << n;
  MonomialCoeffs out;
  out.n = n;
  out.a.resize(dim * dim);
  const double scale = 1.0 / double(dim);
  for (std::size_t mono = 0; mono < dim * dim; ++mono) {
    double acc = 0.0;
    const auto& perm = t.perm[mono];
    const auto& sgn = t.sgn[mono];
    for (std::size_t s = 0; s < dim; ++s) acc += sgn[s] * a.matrix()(perm[s], s);
    out.a[mono] = acc * scale;
  }
  // Residual of the reconstruction, evaluated without materializing the
  // monomial matrices.
  Eigen::MatrixXd rec = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t mono = 0; mono < dim * dim; ++mono) {
    const double c = out.a[mono];
    if (c == 0.0) continue;
    const auto& perm = t.perm[mono];
    const auto& sgn = t.sgn[mono];
    for (std::size_t s = 0; s < dim; ++s) rec(perm[s], s) += c * sgn[s];
  }
  const double resid = (rec - a.matrix()).cwiseAbs().maxCoeff();
  if (resid > tol)
    throw std::logic_error("monomial_expand: reconstruction residual " +
                           std::to_string(resid) + " exceeds tolerance");
  return out;
}

inline CliffordEnd monomial_reconstruct(const MonomialCoeffs& c) {
  const MonomialTable& t = monomial_table(c.n);
  const std::size_t dim = std::size_t{1} << c.n;
  Eigen::MatrixXd rec = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t mono = 0; mono < dim * dim; ++mono) {
    if (c.a[mono] == 0.0) continue;
    for (std::size_t s = 0; s < dim; ++s)
      rec(t.perm[mono][s], s) += c.a[mono] * t.sgn[mono][s];
  }
  return CliffordEnd(c.n, std::move(rec));
}

/// The (k,l) bi-symbol of A, which must have bi-order <= (k,l): any
/// monomial coefficient above that order and above tol is an error.
inline BiForm bisymbol(const CliffordEnd& a, int k, int l, double tol = 1e-9) {
  const int n = a.dim();
  const MonomialCoeffs c = monomial_expand(a);
  BiForm out(n);
  for (Mask mi = 0; mi < (1u << n); ++mi)
    for (Mask mj = 0; mj < (1u << n); ++mj) {
      const double v = c.at(mi, mj);
      if (v == 0.0) continue;
      const int ik = std::popcount(mi), jl = std::popcount(mj);
      if (ik > k || jl > l) {
        if (std::abs(v) > tol)
          throw std::invalid_argument(
              "bisymbol: operand has bi-order above (" + std::to_string(k) + "," +
              std::to_string(l) + "): coefficient " + std::to_string(v) + " on c^I b^J with I=" +
              detail::mask_to_string(mi) + " J=" + detail::mask_to_string(mj));
        continue;
      }
      if (ik == k && jl == l) out.at(mi, mj) = v;
    }
  return out;
}

/// Supertrace through the top bi-symbol. The constant in front is the
/// supertrace of the full monomial c^1..c^n b^1..b^n.
inline double supertrace_via_symbol(const CliffordEnd& a) {
  const int n = a.dim();
  const BiForm top = bisymbol(a, n, n);
  return grading_product_sign(n) * double(1u << n) * top_pairing(top);
}

}  // namespace eulerint
