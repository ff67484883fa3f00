#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "mixdil/errors.hpp"
#include "mixdil/exact.hpp"
#include "mixdil/lattice.hpp"

namespace mixdil {

using cd = std::complex<double>;

// Scalar hooks used by the templated sequence algebra.
inline cd conj_value(const cd& x) { return std::conj(x); }
inline bool is_zero_value(const cd& x) { return x == cd(0.0, 0.0); }
inline RadicalSum conj_value(const RadicalSum& x) { return x; }  // exact mode is real-valued
inline bool is_zero_value(const RadicalSum& x) { return x.is_zero(); }

/// Calls f(point) for every integer point of the box [offset, offset + shape),
/// lexicographically (last coordinate fastest).
template <typename F>
void for_each_point(const IntVector& offset, const IntVector& shape, F&& f) {
  const Eigen::Index d = offset.size();
  for (Eigen::Index i = 0; i < d; ++i)
    if (shape(i) <= 0) return;
  IntVector p = offset;
  for (;;) {
    f(static_cast<const IntVector&>(p));
    Eigen::Index i = d - 1;
    for (; i >= 0; --i) {
      if (++p(i) < offset(i) + shape(i)) break;
      p(i) = offset(i);
    }
    if (i < 0) return;
  }
}

/// Bounding box of A * box for an integer matrix A.
inline std::pair<IntVector, IntVector> image_box(const IntMatrix& a, const IntVector& offset, const IntVector& shape) {
  const Eigen::Index d = offset.size();
  IntVector lo = IntVector::Constant(d, INT64_MAX);
  IntVector hi = IntVector::Constant(d, INT64_MIN);
  for (std::int64_t mask = 0; mask < (std::int64_t{1} << d); ++mask) {
    IntVector c(d);
    for (Eigen::Index i = 0; i < d; ++i) c(i) = offset(i) + (((mask >> i) & 1) ? shape(i) - 1 : 0);
    const IntVector ac = int_apply(a, c);
    lo = lo.cwiseMin(ac);
    hi = hi.cwiseMax(ac);
  }
  return {lo, (hi - lo).array() + 1};
}

/// Finitely supported sequence Z^d -> Scalar^{rows x cols} stored densely over its
/// support box: row-major over the box, matrix entries innermost (row-major).
/// The zero sequence is the canonical empty box at offset 0.
template <typename Scalar>
class Seq {
 public:
  Seq() = default;
  Seq(int dim, int rows, int cols)
      : offset_(IntVector::Zero(dim)), shape_(IntVector::Zero(dim)), rows_(rows), cols_(cols) {}
  Seq(IntVector offset, IntVector shape, int rows, int cols)
      : offset_(std::move(offset)), shape_(std::move(shape)), rows_(rows), cols_(cols) {
    data_.assign(static_cast<std::size_t>(points()) * rows_ * cols_, Scalar{});
  }

  int dim() const { return static_cast<int>(offset_.size()); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const IntVector& offset() const { return offset_; }
  const IntVector& shape() const { return shape_; }
  std::int64_t points() const {
    std::int64_t n = 1;
    for (Eigen::Index i = 0; i < shape_.size(); ++i) n *= std::max<std::int64_t>(shape_(i), 0);
    return n;
  }
  bool empty() const { return data_.empty(); }
  std::vector<Scalar>& data() { return data_; }
  const std::vector<Scalar>& data() const { return data_; }

  bool contains(const IntVector& k) const {
    if (empty()) return false;
    for (Eigen::Index i = 0; i < k.size(); ++i)
      if (k(i) < offset_(i) || k(i) >= offset_(i) + shape_(i)) return false;
    return true;
  }

  std::size_t index(const IntVector& k, int i, int j) const {
    std::int64_t lin = 0;
    for (Eigen::Index c = 0; c < k.size(); ++c) lin = lin * shape_(c) + (k(c) - offset_(c));
    return static_cast<std::size_t>(lin) * rows_ * cols_ + static_cast<std::size_t>(i) * cols_ + j;
  }

  /// Mutable access; k must lie in the box.
  Scalar& at(const IntVector& k, int i, int j) { return data_[index(k, i, j)]; }
  /// Value with zero outside the box.
  Scalar value(const IntVector& k, int i, int j) const { return contains(k) ? data_[index(k, i, j)] : Scalar{}; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Scalar& x) { return is_zero_value(x); });
  }

  /// Shrinks the box to the nonzero coefficients.
  Seq& trim() {
    if (empty()) return *this;
    const int d = dim();
    IntVector lo = IntVector::Constant(d, INT64_MAX);
    IntVector hi = IntVector::Constant(d, INT64_MIN);
    const std::size_t block = static_cast<std::size_t>(rows_) * cols_;
    std::size_t pos = 0;
    for_each_point(offset_, shape_, [&](const IntVector& k) {
      for (std::size_t e = 0; e < block; ++e) {
        if (!is_zero_value(data_[pos + e])) {
          lo = lo.cwiseMin(k);
          hi = hi.cwiseMax(k);
          break;
        }
      }
      pos += block;
    });
    if (lo(0) == INT64_MAX) {
      *this = Seq(d, rows_, cols_);
      return *this;
    }
    const IntVector ext = (hi - lo).array() + 1;
    if (lo == offset_ && ext == shape_) return *this;
    Seq out(lo, ext, rows_, cols_);
    for_each_point(out.offset_, out.shape_, [&](const IntVector& k) {
      for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out.at(k, i, j) = at(k, i, j);
    });
    *this = std::move(out);
    return *this;
  }

  template <typename F>
  void for_each(F&& f) const {
    std::size_t pos = 0;
    const std::size_t block = static_cast<std::size_t>(rows_) * cols_;
    for_each_point(offset_, shape_, [&](const IntVector& k) {
      f(k, &data_[pos]);
      pos += block;
    });
  }

  friend bool operator==(const Seq& a, const Seq& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.offset_ == b.offset_ && a.shape_ == b.shape_ &&
           a.data_ == b.data_;
  }

 private:
  IntVector offset_;
  IntVector shape_;
  int rows_ = 1;
  int cols_ = 1;
  std::vector<Scalar> data_;
};

/// Elementwise map into another scalar type.
template <typename To, typename From, typename F>
Seq<To> map_seq(const Seq<From>& u, F&& f) {
  if (u.empty()) return Seq<To>(u.dim(), u.rows(), u.cols());
  Seq<To> out(u.offset(), u.shape(), u.rows(), u.cols());
  std::transform(u.data().begin(), u.data().end(), out.data().begin(), f);
  return out;
}

/// Kronecker delta at k times the identity (rows x rows) or e_row-block for rectangular shapes.
template <typename Scalar>
Seq<Scalar> delta_seq(const IntVector& k, int rows, int cols) {
  Seq<Scalar> out(k, IntVector::Ones(k.size()), rows, cols);
  for (int i = 0; i < std::min(rows, cols); ++i) out.at(k, i, i) = Scalar(1);
  return out;
}

template <typename Scalar>
Seq<Scalar> scale(const Seq<Scalar>& u, const Scalar& c) {
  Seq<Scalar> out = map_seq<Scalar>(u, [&](const Scalar& x) { return c * x; });
  return out.trim();
}

template <typename Scalar>
Seq<Scalar> shift(const Seq<Scalar>& u, const IntVector& by) {
  if (u.empty()) return u;
  Seq<Scalar> out(u.offset() + by, u.shape(), u.rows(), u.cols());
  out.data() = u.data();
  return out;
}

template <typename Scalar>
Seq<Scalar> add(const Seq<Scalar>& a, const Seq<Scalar>& b, const Scalar& beta = Scalar(1)) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.dim() != b.dim())
    throw ShapeMismatch("add: sequences have different shapes");
  if (a.empty()) return scale(b, beta);
  if (b.empty()) return a;
  const IntVector lo = a.offset().cwiseMin(b.offset());
  const IntVector hi = (a.offset() + a.shape()).cwiseMax(b.offset() + b.shape());
  Seq<Scalar> out(lo, hi - lo, a.rows(), a.cols());
  a.for_each([&](const IntVector& k, const Scalar* m) {
    for (int e = 0; e < a.rows() * a.cols(); ++e) out.at(k, e / a.cols(), e % a.cols()) = m[e];
  });
  b.for_each([&](const IntVector& k, const Scalar* m) {
    for (int e = 0; e < b.rows() * b.cols(); ++e) out.at(k, e / b.cols(), e % b.cols()) += beta * m[e];
  });
  return out.trim();
}

/// (u1 * u2)(n) = sum_k u1(k) u2(n - k), matrix product in that order.
template <typename Scalar>
Seq<Scalar> convolve(const Seq<Scalar>& u1, const Seq<Scalar>& u2) {
  if (u1.cols() != u2.rows() || u1.dim() != u2.dim()) throw ShapeMismatch("convolve: inner dimensions differ");
  const int r = u1.rows();
  const int q = u1.cols();
  const int c = u2.cols();
  if (u1.empty() || u2.empty()) return Seq<Scalar>(u1.dim(), r, c);
  Seq<Scalar> out(u1.offset() + u2.offset(), (u1.shape() + u2.shape()).array() - 1, r, c);
  u1.for_each([&](const IntVector& k1, const Scalar* m1) {
    bool nonzero = false;
    for (int e = 0; e < r * q; ++e) nonzero = nonzero || !is_zero_value(m1[e]);
    if (!nonzero) return;
    u2.for_each([&](const IntVector& k2, const Scalar* m2) {
      const IntVector n = k1 + k2;
      Scalar* dst = &out.at(n, 0, 0);
      for (int i = 0; i < r; ++i)
        for (int t = 0; t < q; ++t) {
          const Scalar& a = m1[i * q + t];
          if (is_zero_value(a)) continue;
          for (int j = 0; j < c; ++j) dst[i * c + j] += a * m2[t * c + j];
        }
    });
  });
  return out.trim();
}

/// (u up M)(Mk) = u(k), zero off M Z^d.
template <typename Scalar>
Seq<Scalar> upsample(const Seq<Scalar>& u, const IntMatrix& m) {
  if (u.empty()) return u;
  const auto [lo, shape] = image_box(m, u.offset(), u.shape());
  Seq<Scalar> out(lo, shape, u.rows(), u.cols());
  u.for_each([&](const IntVector& k, const Scalar* v) {
    Scalar* dst = &out.at(int_apply(m, k), 0, 0);
    std::copy(v, v + u.rows() * u.cols(), dst);
  });
  return out;
}

/// (u down M)(k) = u(Mk).
template <typename Scalar>
Seq<Scalar> downsample(const Seq<Scalar>& u, const IntMatrix& m) {
  if (u.empty()) return u;
  const int d = u.dim();
  // Bounding box of M^{-1}(box) through adj(M)/det with floor/ceil.
  const IntMatrix adj = adjugate(m);
  const std::int64_t det = int_det(m);
  const auto [alo, ashape] = image_box(adj, u.offset(), u.shape());
  IntVector lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    const std::int64_t a = alo(i);
    const std::int64_t b = alo(i) + ashape(i) - 1;
    const Rational x = Rational(det > 0 ? a : -b, det > 0 ? det : -det);
    const Rational y = Rational(det > 0 ? b : -a, det > 0 ? det : -det);
    lo(i) = x.floor();
    hi(i) = -(-y).floor();
  }
  Seq<Scalar> out(lo, (hi - lo).array() + 1, u.rows(), u.cols());
  const std::size_t block = static_cast<std::size_t>(u.rows()) * u.cols();
  for_each_point(out.offset(), out.shape(), [&](const IntVector& k) {
    const IntVector mk = int_apply(m, k);
    if (!u.contains(mk)) return;
    const Scalar* src = &u.data()[u.index(mk, 0, 0)];
    std::copy(src, src + block, &out.at(k, 0, 0));
  });
  return out.trim();
}

/// u*(k) = conj(u(-k))^T.
template <typename Scalar>
Seq<Scalar> star(const Seq<Scalar>& u) {
  if (u.empty()) return Seq<Scalar>(u.dim(), u.cols(), u.rows());
  const IntVector lo = -(u.offset() + u.shape()).array() + 1;
  Seq<Scalar> out(lo, u.shape(), u.cols(), u.rows());
  u.for_each([&](const IntVector& k, const Scalar* m) {
    const IntVector nk = -k;
    for (int i = 0; i < u.rows(); ++i)
      for (int j = 0; j < u.cols(); ++j) out.at(nk, j, i) = conj_value(m[i * u.cols() + j]);
  });
  return out;
}

/// <u, v> = sum_k u(k) conj(v(k))^T, a u.rows() x v.rows() matrix stored row-major.
template <typename Scalar>
std::vector<Scalar> inner(const Seq<Scalar>& u, const Seq<Scalar>& v) {
  if (u.cols() != v.cols() || u.dim() != v.dim()) throw ShapeMismatch("inner: column counts differ");
  std::vector<Scalar> out(static_cast<std::size_t>(u.rows()) * v.rows(), Scalar{});
  u.for_each([&](const IntVector& k, const Scalar* a) {
    if (!v.contains(k)) return;
    const Scalar* b = &v.data()[v.index(k, 0, 0)];
    for (int i = 0; i < u.rows(); ++i)
      for (int j = 0; j < v.rows(); ++j)
        for (int t = 0; t < u.cols(); ++t) out[i * v.rows() + j] += a[i * u.cols() + t] * conj_value(b[j * v.cols() + t]);
  });
  return out;
}

}  // namespace mixdil
