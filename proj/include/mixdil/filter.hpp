#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mixdil/exact.hpp"
#include "mixdil/lattice.hpp"
#include "mixdil/seq.hpp"

namespace mixdil {

using ExactSeq = Seq<RadicalSum>;
using FloatSeq = Seq<cd>;

/// A finitely supported matrix-valued filter. Always carries complex double
/// coefficients; additionally carries an exact radical-sum copy while every
/// operation that produced it could be done exactly. When present the exact copy
/// is authoritative and the doubles are its rounding.
class FilterSeq {
 public:
  FilterSeq() = default;
  explicit FilterSeq(FloatSeq values) : values_(std::move(values)) {}
  explicit FilterSeq(ExactSeq exact);

  static FilterSeq zero(int dim, int rows, int cols) { return FilterSeq(ExactSeq(dim, rows, cols)); }
  static FilterSeq delta(const IntVector& k, int rows, int cols) {
    return FilterSeq(delta_seq<RadicalSum>(k, rows, cols));
  }
  /// Builds a float filter from coefficients listed row-major over the box.
  static FilterSeq from_values(const IntVector& offset, const IntVector& shape, int rows, int cols,
                               const std::vector<cd>& coeffs);
  /// Builds an exact filter from single-term exact coefficients.
  static FilterSeq from_exact(const IntVector& offset, const IntVector& shape, int rows, int cols,
                              const std::vector<ScaledScalar>& coeffs);

  int dim() const { return values_.dim(); }
  int rows() const { return values_.rows(); }
  int cols() const { return values_.cols(); }
  const IntVector& offset() const { return values_.offset(); }
  const IntVector& shape() const { return values_.shape(); }
  bool empty() const { return values_.empty(); }

  const FloatSeq& values() const { return values_; }
  const std::optional<ExactSeq>& exact() const { return exact_; }
  bool is_exact() const { return exact_.has_value(); }
  /// True when every exact entry is a single (p/q) sqrt(m) term.
  bool exact_is_single_term() const;

  cd value(const IntVector& k, int i, int j) const { return values_.value(k, i, j); }
  bool is_zero() const { return exact_ ? exact_->is_zero() : values_.is_zero(); }

  FilterSeq without_exact() const { return FilterSeq(values_); }
  /// Adds delta to one coefficient (inside or outside the current box).
  FilterSeq perturbed(const IntVector& k, int i, int j, const Rational& delta) const;

  friend bool operator==(const FilterSeq& a, const FilterSeq& b) {
    return a.values_ == b.values_ && a.exact_ == b.exact_;
  }

 private:
  FloatSeq values_;
  std::optional<ExactSeq> exact_;
};

FloatSeq to_float(const ExactSeq& e);

/// Convolution (u1 * u2)(n) = sum_k u1(k) u2(n-k). Throws ShapeMismatch.
FilterSeq convolve(const FilterSeq& u1, const FilterSeq& u2);
FilterSeq upsample(const FilterSeq& u, const IntMatrix& m);
FilterSeq downsample(const FilterSeq& u, const IntMatrix& m);
FilterSeq star(const FilterSeq& u);
FilterSeq shift(const FilterSeq& u, const IntVector& by);
FilterSeq scale(const FilterSeq& u, const RadicalSum& c);
FilterSeq scale(const FilterSeq& u, const cd& c);
/// a + beta * b; exact when both are exact.
FilterSeq add(const FilterSeq& a, const FilterSeq& b, const RadicalSum& beta = RadicalSum(1));
FilterSeq subtract(const FilterSeq& a, const FilterSeq& b);

/// Fourier series sum_k u(k) e^{-i k.xi}, lexicographic summation order.
Eigen::MatrixXcd symbol(const FilterSeq& u, const Eigen::VectorXd& xi);

/// S_{a,M} u = |det M|^{1/2} (u up M) * a.
FilterSeq subdivision(const FilterSeq& a, const IntMatrix& m, const FilterSeq& u);
/// T_{b,M} u = |det M|^{1/2} (u * b^star) down M.
FilterSeq transition(const FilterSeq& b, const IntMatrix& m, const FilterSeq& u);

/// <u, v> = sum_k u(k) conj(v(k))^T in double precision.
Eigen::MatrixXcd inner(const FilterSeq& u, const FilterSeq& v);
/// The same pairing in exact arithmetic when both operands are exact.
std::optional<std::vector<RadicalSum>> inner_exact(const FilterSeq& u, const FilterSeq& v);

/// Squared l2 norm.
double norm2(const FilterSeq& u);
/// max |u(k) - v(k)| over both supports.
double max_abs_diff(const FilterSeq& u, const FilterSeq& v);
/// Exact equality; nullopt when either side lacks exact data.
std::optional<bool> exact_equal(const FilterSeq& u, const FilterSeq& v);

}  // namespace mixdil
