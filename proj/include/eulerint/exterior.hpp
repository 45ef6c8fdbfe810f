#pragma once

// Finite-dimensional exterior algebra over R^n (n <= 8) and the super
// tensor square Lambda V (x) Lambda V with the Koszul sign rule.
// Basis monomials are indexed by n-bit subset masks in ascending order:
// bit i set means the factor e^{i+1} is present.

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace eulerint {

using Mask = std::uint32_t;

constexpr int kMaxExteriorDim = 8;

/// Sign of e^A wedge e^B for disjoint subset masks A, B: parity of the
/// number of pairs (a, b) with a in A, b in B, a > b.
inline int wedge_sign(Mask a, Mask b) {
  int swaps = 0;
  for (Mask t = b; t != 0; t &= t - 1) {
    const int i = std::countr_zero(t);
    swaps += std::popcount(a >> (i + 1));
  }
  return (swaps & 1) ? -1 : +1;
}

inline void check_dim(int n) {
  if (n < 1 || n > kMaxExteriorDim)
    throw std::invalid_argument("exterior dimension must be in [1, 8], got " +
                                std::to_string(n));
}

// ---------------------------------------------------------------------------
// ExteriorElement
// ---------------------------------------------------------------------------

class ExteriorElement {
 public:
  ExteriorElement() = default;
  explicit ExteriorElement(int n) : n_(n), c_(std::size_t{1} << n, 0.0) { check_dim(n); }

  static ExteriorElement zero(int n) { return ExteriorElement(n); }
  static ExteriorElement unit(int n) {
    ExteriorElement e(n);
    e.c_[0] = 1.0;
    return e;
  }
  static ExteriorElement basis(int n, Mask m, double coeff = 1.0) {
    ExteriorElement e(n);
    e.at(m) = coeff;
    return e;
  }

  int dim() const { return n_; }
  std::size_t size() const { return c_.size(); }
  double& at(Mask m) { return c_.at(m); }
  double at(Mask m) const { return c_.at(m); }
  double coeff(Mask m) const { return c_[m]; }

  ExteriorElement& operator+=(const ExteriorElement& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  ExteriorElement& operator-=(const ExteriorElement& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  ExteriorElement& operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
  }

  friend ExteriorElement operator+(ExteriorElement a, const ExteriorElement& b) { return a += b; }
  friend ExteriorElement operator-(ExteriorElement a, const ExteriorElement& b) { return a -= b; }
  friend ExteriorElement operator*(double s, ExteriorElement a) { return a *= s; }
  friend ExteriorElement operator*(ExteriorElement a, double s) { return a *= s; }

  /// Degree-k part: coefficients on k-element subsets only.
  ExteriorElement degree_part(int k) const {
    ExteriorElement out(n_);
    for (Mask m = 0; m < c_.size(); ++m)
      if (std::popcount(m) == k) out.c_[m] = c_[m];
    return out;
  }

  bool is_zero(double tol = 0.0) const {
    for (double x : c_)
      if (std::abs(x) > tol) return false;
    return true;
  }

  /// True when all odd-degree coefficients vanish.
  bool is_even(double tol = 0.0) const {
    for (Mask m = 0; m < c_.size(); ++m)
      if ((std::popcount(m) & 1) && std::abs(c_[m]) > tol) return false;
    return true;
  }

  double scalar_part() const { return c_[0]; }

  double max_abs() const {
    double r = 0.0;
    for (double x : c_) r = std::max(r, std::abs(x));
    return r;
  }

 private:
  void require_same_dim(const ExteriorElement& o) const {
    if (n_ != o.n_)
      throw std::invalid_argument("exterior dimension mismatch: " +
                                  std::to_string(n_) + " vs " + std::to_string(o.n_));
  }

  int n_ = 0;
  std::vector<double> c_;
};

inline ExteriorElement wedge(const ExteriorElement& a, const ExteriorElement& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("wedge: dimension mismatch: " +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  const int n = a.dim();
  ExteriorElement out(n);
  const Mask full = Mask(1u << n);
  for (Mask ma = 0; ma < full; ++ma) {
    const double ca = a.coeff(ma);
    if (ca == 0.0) continue;
    for (Mask mb = 0; mb < full; ++mb) {
      const double cb = b.coeff(mb);
      if (cb == 0.0 || (ma & mb)) continue;
      out.at(ma | mb) += wedge_sign(ma, mb) * ca * cb;
    }
  }
  return out;
}

/// exp of a nilpotent exterior element (scalar part must be zero).
inline ExteriorElement exterior_exp(const ExteriorElement& x) {
  if (x.scalar_part() != 0.0)
    throw std::invalid_argument("exterior_exp: nonzero scalar part; factor it out first");
  ExteriorElement result = ExteriorElement::unit(x.dim());
  ExteriorElement term = ExteriorElement::unit(x.dim());
  for (int k = 1; k <= x.dim(); ++k) {
    term = wedge(term, x);
    term *= 1.0 / k;
    if (term.is_zero()) break;
    result += term;
  }
  return result;
}

// ---------------------------------------------------------------------------
// BiForm: element of Lambda V (x) Lambda V, super product
//   (a (x) b)(c (x) d) = (-1)^{deg b * deg c} (a ^ c) (x) (b ^ d)
// Storage index: left mask | (right mask << n).
// ---------------------------------------------------------------------------

class BiForm {
 public:
  BiForm() = default;
  explicit BiForm(int n) : n_(n), c_(std::size_t{1} << (2 * n), 0.0) { check_dim(n); }

  static BiForm zero(int n) { return BiForm(n); }
  static BiForm unit(int n) {
    BiForm b(n);
    b.c_[0] = 1.0;
    return b;
  }
  static BiForm basis(int n, Mask left, Mask right, double coeff = 1.0) {
    BiForm b(n);
    b.at(left, right) = coeff;
    return b;
  }

  int dim() const { return n_; }
  std::size_t size() const { return c_.size(); }

  double& at(Mask left, Mask right) { return c_.at(index(left, right)); }
  double at(Mask left, Mask right) const { return c_.at(index(left, right)); }
  double coeff(Mask left, Mask right) const { return c_[index(left, right)]; }

  Mask left_mask(std::size_t idx) const { return Mask(idx) & ((1u << n_) - 1); }
  Mask right_mask(std::size_t idx) const { return Mask(idx) >> n_; }
  double coeff_at(std::size_t idx) const { return c_[idx]; }

  BiForm& operator+=(const BiForm& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  BiForm& operator-=(const BiForm& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  BiForm& operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
  }

  friend BiForm operator+(BiForm a, const BiForm& b) { return a += b; }
  friend BiForm operator-(BiForm a, const BiForm& b) { return a -= b; }
  friend BiForm operator*(double s, BiForm a) { return a *= s; }
  friend BiForm operator*(BiForm a, double s) { return a *= s; }

  bool is_zero(double tol = 0.0) const {
    for (double x : c_)
      if (std::abs(x) > tol) return false;
    return true;
  }

  double max_abs() const {
    double r = 0.0;
    for (double x : c_) r = std::max(r, std::abs(x));
    return r;
  }

 private:
  std::size_t index(Mask left, Mask right) const {
    return std::size_t(left) | (std::size_t(right) << n_);
  }
  void require_same_dim(const BiForm& o) const {
    if (n_ != o.n_)
      throw std::invalid_argument("biform dimension mismatch: " +
                                  std::to_string(n_) + " vs " + std::to_string(o.n_));
  }

  int n_ = 0;
  std::vector<double> c_;
};

inline BiForm biform_mul(const BiForm& x, const BiForm& y) {
  if (x.dim() != y.dim())
    throw std::invalid_argument("biform_mul: dimension mismatch: " +
                                std::to_string(x.dim()) + " vs " + std::to_string(y.dim()));
  const int n = x.dim();

  // Gather nonzero entries first; typical operands are sparse.
  struct Entry {
    Mask l, r;
    double c;
    int rdeg, ldeg;
  };
  std::vector<Entry> xs, ys;
  xs.reserve(16);
  ys.reserve(16);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double c = x.coeff_at(i);
    if (c == 0.0) continue;
    const Mask l = x.left_mask(i), r = x.right_mask(i);
    xs.push_back({l, r, c, std::popcount(r), std::popcount(l)});
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double c = y.coeff_at(i);
    if (c == 0.0) continue;
    const Mask l = y.left_mask(i), r = y.right_mask(i);
    ys.push_back({l, r, c, std::popcount(r), std::popcount(l)});
  }

  BiForm out(n);
  for (const Entry& a : xs) {
    for (const Entry& b : ys) {
      if ((a.l & b.l) || (a.r & b.r)) continue;
      int sgn = wedge_sign(a.l, b.l) * wedge_sign(a.r, b.r);
      if ((a.rdeg * b.ldeg) & 1) sgn = -sgn;  // Koszul sign
      out.at(a.l | b.l, a.r | b.r) += sgn * a.c * b.c;
    }
  }
  return out;
}

/// exp of a BiForm with vanishing (0,0)-part. The series terminates by
/// nilpotency; the scalar factor e^{(0,0)-part} is the caller's business.
inline BiForm biform_exp(const BiForm& x) {
  if (x.coeff(0, 0) != 0.0)
    throw std::invalid_argument("biform_exp: nonzero (0,0)-part; factor the scalar out first");
  BiForm result = BiForm::unit(x.dim());
  BiForm term = BiForm::unit(x.dim());
  const int kmax = 2 * x.dim();
  for (int k = 1; k <= kmax; ++k) {
    term = biform_mul(term, x);
    term *= 1.0 / k;
    if (term.is_zero()) break;
    result += term;
  }
  return result;
}

/// Coefficient of vol (x) vol, i.e. the ({1..n},{1..n}) entry.
inline double top_pairing(const BiForm& x) {
  const Mask full = (1u << x.dim()) - 1;
  return x.coeff(full, full);
}

/// Projection onto the (k,l) bi-degree component.
inline BiForm part(const BiForm& x, int k, int l) {
  const int n = x.dim();
  if (k < 0 || k > n || l < 0 || l > n)
    throw std::invalid_argument("part: bidegree out of range");
  BiForm out(n);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double c = x.coeff_at(i);
    if (c == 0.0) continue;
    if (std::popcount(x.left_mask(i)) == k && std::popcount(x.right_mask(i)) == l)
      out.at(x.left_mask(i), x.right_mask(i)) = c;
  }
  return out;
}

// ---------------------------------------------------------------------------
// EvenFormMatrix: square matrix over the commutative ring of even-degree
// exterior elements. Hosts form-valued curvature matrices.
// ---------------------------------------------------------------------------

class EvenFormMatrix {
 public:
  EvenFormMatrix(int size, int form_dim)
      : d_(size), n_(form_dim), e_(std::size_t(size) * size, ExteriorElement(form_dim)) {
    check_dim(form_dim);
    if (size < 1) throw std::invalid_argument("EvenFormMatrix: size must be positive");
  }

  static EvenFormMatrix identity(int size, int form_dim) {
    EvenFormMatrix m(size, form_dim);
    for (int i = 0; i < size; ++i) m.at(i, i) = ExteriorElement::unit(form_dim);
    return m;
  }

  int size() const { return d_; }
  int form_dim() const { return n_; }

  ExteriorElement& at(int i, int j) { return e_.at(std::size_t(i) * d_ + j); }
  const ExteriorElement& at(int i, int j) const { return e_.at(std::size_t(i) * d_ + j); }

  void set(int i, int j, const ExteriorElement& v) {
    if (!v.is_even())
      throw std::invalid_argument("EvenFormMatrix: entries must be even-degree");
    at(i, j) = v;
  }

  EvenFormMatrix& operator+=(const EvenFormMatrix& o) {
    require_compatible(o);
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
  }
  EvenFormMatrix& operator*=(double s) {
    for (auto& x : e_) x *= s;
    return *this;
  }
  friend EvenFormMatrix operator+(EvenFormMatrix a, const EvenFormMatrix& b) { return a += b; }
  friend EvenFormMatrix operator*(double s, EvenFormMatrix a) { return a *= s; }

  friend EvenFormMatrix operator*(const EvenFormMatrix& a, const EvenFormMatrix& b) {
    a.require_compatible(b);
    EvenFormMatrix out(a.d_, a.n_);
    for (int i = 0; i < a.d_; ++i)
      for (int k = 0; k < a.d_; ++k) {
        const ExteriorElement& aik = a.at(i, k);
        if (aik.is_zero()) continue;
        for (int j = 0; j < a.d_; ++j) {
          const ExteriorElement& bkj = b.at(k, j);
          if (bkj.is_zero()) continue;
          out.at(i, j) += wedge(aik, bkj);
        }
      }
    return out;
  }

  ExteriorElement trace() const {
    ExteriorElement t(n_);
    for (int i = 0; i < d_; ++i) t += at(i, i);
    return t;
  }

  bool is_antisymmetric(double tol = 0.0) const {
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) {
        ExteriorElement s = at(i, j) + at(j, i);
        if (!s.is_zero(tol)) return false;
      }
    return true;
  }

 private:
  void require_compatible(const EvenFormMatrix& o) const {
    if (d_ != o.d_ || n_ != o.n_)
      throw std::invalid_argument("EvenFormMatrix: shape mismatch");
  }

  int d_ = 0, n_ = 0;
  std::vector<ExteriorElement> e_;
};

}  // namespace eulerint
