#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "mixdil/rational.hpp"

namespace mixdil {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using RationalVector = std::vector<Rational>;

IntMatrix identity_matrix(int dim);

/// Exact determinant (fraction-free Bareiss elimination).
std::int64_t int_det(const IntMatrix& a);

/// Adjugate, so that a * adjugate(a) = det(a) * I.
IntMatrix adjugate(const IntMatrix& a);

/// Checked integer product; throws std::overflow_error on wrap-around.
IntMatrix int_product(const IntMatrix& a, const IntMatrix& b);
IntVector int_apply(const IntMatrix& a, const IntVector& x);
IntMatrix int_power(const IntMatrix& a, int exponent);

struct HermiteForm {
  IntMatrix H;  ///< column Hermite normal form of A
  IntMatrix U;  ///< unimodular, A * U = H
};

/// Column Hermite normal form of a full-row-rank d x m matrix: the leading d x d
/// block is lower triangular with positive diagonal, entries left of the
/// diagonal reduced into [0, H_ii), remaining m - d columns zero.
/// Throws SingularMatrix when A does not have full row rank.
HermiteForm hnf(const IntMatrix& a);

/// A d x d integer dilation matrix: every eigenvalue exceeds 1 in modulus.
class DilationMatrix {
 public:
  /// Throws SingularMatrix or NotExpansive.
  explicit DilationMatrix(IntMatrix mat);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const IntMatrix& matrix() const { return mat_; }
  operator const IntMatrix&() const { return mat_; }  // NOLINT(implicit)
  std::int64_t det() const { return det_; }
  std::int64_t det_abs() const { return det_ < 0 ? -det_ : det_; }

  /// Row-major rational entries of M^{-T}.
  const std::vector<RationalVector>& inv_transpose() const { return inv_transpose_; }

  friend bool operator==(const DilationMatrix& a, const DilationMatrix& b) { return a.mat_ == b.mat_; }

 private:
  IntMatrix mat_;
  std::int64_t det_;
  std::vector<RationalVector> inv_transpose_;
};

/// Numeric expansiveness test: spectral radius of M^{-1} below 1 - 1e-9.
bool is_expansive(const IntMatrix& m);

/// Omega_M = (M^{-T} Z^d) cap [0,1)^d, zero first then lexicographic.
struct CosetSet {
  IntMatrix base;
  std::vector<RationalVector> reps;
};

CosetSet coset_reps(const DilationMatrix& m);

/// True when omega (a rational vector) lies in M^{-T} Z^d, i.e. M^T omega is integral.
bool in_dual_lattice(const IntMatrix& m, const RationalVector& omega);

/// Full-rank sublattice of Z^d held by its column Hermite basis.
class Lattice {
 public:
  /// Lattice generated by the columns of `generators` (must have full row rank).
  explicit Lattice(const IntMatrix& generators);
  static Lattice integers(int dim);

  int dim() const { return static_cast<int>(basis_.rows()); }
  const IntMatrix& basis() const { return basis_; }
  std::int64_t index() const { return index_; }

  bool contains(const IntVector& v) const;
  /// L2 subset of this lattice.
  bool contains(const Lattice& other) const;

  friend bool operator==(const Lattice& a, const Lattice& b) { return a.basis_ == b.basis_; }

 private:
  IntMatrix basis_;
  std::int64_t index_;
};

/// Throws DimensionMismatch.
Lattice intersect(const Lattice& a, const Lattice& b);

/// Coset representatives of coarse / fine (fine must be a sublattice of coarse),
/// zero first, the rest sorted lexicographically. Throws NotSublattice.
std::vector<IntVector> quotient_reps(const Lattice& coarse, const Lattice& fine);

/// A complete residue system of Z^d / L laid out as a box [0, extents).
/// Used as the storage layout of periodic data.
class ResidueBox {
 public:
  explicit ResidueBox(const Lattice& period);

  const Lattice& lattice() const { return lattice_; }
  const IntVector& extents() const { return extents_; }
  std::int64_t size() const { return lattice_.index(); }

  /// The representative of x inside the box.
  IntVector reduce(const IntVector& x) const;
  /// Row-major position of a reduced point.
  std::int64_t linear(const IntVector& reduced) const;
  std::int64_t linear_of(const IntVector& x) const { return linear(reduce(x)); }
  IntVector point(std::int64_t linear) const;

 private:
  Lattice lattice_;
  IntMatrix tri_;  // lower-triangular basis in reversed coordinates
  IntVector extents_;
};

}  // namespace mixdil
