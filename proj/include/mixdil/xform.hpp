#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "mixdil/bank.hpp"

namespace mixdil {

/// Which family of filters of a bank an operator uses.
enum class Side { primal, dual };

/// Dense data on Z^d that is periodic with respect to a full-rank lattice. Stored
/// over the residue box of the period, matrix entries innermost.
class PeriodicArray {
 public:
  PeriodicArray(const Lattice& period, int rows, int cols);
  /// Diagonal period N_1 Z x ... x N_d Z.
  PeriodicArray(const IntVector& period, int rows, int cols);

  int dim() const { return box_.lattice().dim(); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Lattice& period() const { return box_.lattice(); }
  const ResidueBox& box() const { return box_; }
  /// Number of lattice sites per period.
  std::int64_t sites() const { return box_.size(); }

  cd& at(std::int64_t site, int i, int j) { return data_[(site * rows_ + i) * cols_ + j]; }
  cd at(std::int64_t site, int i, int j) const { return data_[(site * rows_ + i) * cols_ + j]; }
  /// Value at any point of Z^d.
  cd value(const IntVector& k, int i, int j) const { return at(box_.linear_of(k), i, j); }
  cd& ref(const IntVector& k, int i, int j) { return at(box_.linear_of(k), i, j); }

  std::vector<cd>& data() { return data_; }
  const std::vector<cd>& data() const { return data_; }

  friend bool operator==(const PeriodicArray& a, const PeriodicArray& b) {
    return a.box_.lattice() == b.box_.lattice() && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  ResidueBox box_;
  int rows_;
  int cols_;
  std::vector<cd> data_;
};

Lattice diagonal_lattice(const IntVector& period);

/// Sums all period translates of a finitely supported sequence.
PeriodicArray periodize(const FilterSeq& u, const Lattice& period);

double max_abs_diff(const PeriodicArray& a, const PeriodicArray& b);

/// M^{-1} P as a lattice; throws PeriodNotDivisible when it is not integral.
Lattice coarse_period(const IntMatrix& m, const Lattice& period);

PeriodicArray transition(const FilterSeq& b, const IntMatrix& m, const PeriodicArray& u);
/// The output period is M times the input period.
PeriodicArray subdivision(const FilterSeq& a, const IntMatrix& m, const PeriodicArray& u);

/// Levels in decomposition order: detail[l-1][j-1] holds v_{l,j}; approx holds v_{0,J}.
template <typename Band>
struct CoefficientPyramid {
  std::string bank_name;
  int levels = 0;
  std::vector<std::vector<Band>> detail;
  Band approx;

  int wavelets() const { return static_cast<int>(detail.size()); }
  const Band& band(int l, int j) const { return detail.at(l - 1).at(j - 1); }
  Band& band(int l, int j) { return detail.at(l - 1).at(j - 1); }
};

using Pyramid = CoefficientPyramid<FilterSeq>;
using PeriodicPyramid = CoefficientPyramid<PeriodicArray>;

/// J-level analysis. v may have any number of rows; it must have r columns.
/// Throws ShapeMismatch.
Pyramid analyze(const FilterBank& bank, const FilterSeq& v, int levels, Side side = Side::primal);
FilterSeq synthesize(const FilterBank& bank, const Pyramid& pyr, Side side = Side::dual);

/// Throws PeriodNotDivisible naming the level and channel.
PeriodicPyramid analyze_periodic(const FilterBank& bank, const PeriodicArray& v, int levels,
                                 Side side = Side::primal);
PeriodicArray synthesize_periodic(const FilterBank& bank, const PeriodicPyramid& pyr, Side side = Side::dual);

/// Largest J for which every per-level period stays an integer lattice.
int max_levels(const FilterBank& bank, const Lattice& period);
int max_levels(const FilterBank& bank, const IntVector& period);

/// Period lattices of the bands (same layout as a pyramid) for a J-level transform.
CoefficientPyramid<Lattice> band_periods(const FilterBank& bank, const Lattice& period, int levels);

/// Total number of stored scalars.
std::int64_t coefficient_count(const PeriodicPyramid& pyr);

/// Concatenates the bands in pyramid order (details level by level, then approx).
Eigen::VectorXcd flatten(const PeriodicPyramid& pyr);
/// Inverse of flatten, using `like` for the band layout.
PeriodicPyramid unflatten(const Eigen::VectorXcd& x, const PeriodicPyramid& like);
Eigen::VectorXcd flatten(const PeriodicArray& a);
PeriodicArray unflatten(const Eigen::VectorXcd& x, const PeriodicArray& like);

}  // namespace mixdil
