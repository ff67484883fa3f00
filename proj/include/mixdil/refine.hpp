#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mixdil/bank.hpp"
#include "mixdil/verify.hpp"
#include "mixdil/xform.hpp"

namespace mixdil {

/// Samples of a vector function on the grid M^{-level} Z^d. Component c at grid
/// point p is values.value(p, c, 0); points outside the stored box are zero.
struct SampledFunction {
  int level = 0;
  IntMatrix base;
  FloatSeq values;
  /// L2 differences of successive integer-node iterates (cascade output only).
  std::vector<double> differences;
  std::vector<std::string> warnings;

  int dim() const { return values.dim(); }
  int components() const { return values.rows(); }
  cd value(const IntVector& p, int c) const { return values.value(p, c, 0); }
  /// Physical coordinates of grid point p.
  Eigen::VectorXd point(const IntVector& p) const;
};

struct MaskDiagnostic {
  std::vector<cd> eigenvalues;
  bool ok = false;
  std::string message;
};

/// Eigenvalues of the mask symbol at the origin; ok when 1 is a simple
/// eigenvalue (within 1e-9) and all others lie inside the unit disc.
MaskDiagnostic mask_spectrum(const FilterSeq& b0);

/// Points allowed in any sampled function.
constexpr std::int64_t kMaxSamples = 10'000'000;

/// Refinable function of the lowpass filter sampled at the given grid level.
/// Throws MaskDiagnosticFailed, Diverged or EnvelopeExceeded.
SampledFunction cascade(const FilterBank& bank, int level, Side side = Side::primal, int max_iter = 2000);
/// The same for a bare mask and dilation.
SampledFunction cascade(const FilterSeq& mask, const IntMatrix& m, int level, int max_iter = 2000);

/// |det M| sum_k a(k) psi(M x - k) on the grid of psi.
SampledFunction refine_step(const FilterSeq& a, const SampledFunction& psi);

/// psi^l for l = 1..s from the rendered psi^0.
std::vector<SampledFunction> derive_generators(const FilterBank& bank, const SampledFunction& psi0,
                                               Side side = Side::primal);

/// Bounding box of the support of the refinable function, in physical units.
std::pair<Eigen::VectorXd, Eigen::VectorXd> support_estimate(const FilterSeq& mask, const IntMatrix& m);

struct GramSequence {
  std::vector<IntVector> lags;
  std::vector<Eigen::MatrixXcd> values;

  const Eigen::MatrixXcd& at(const IntVector& k) const;
};

/// <f, g(. + k)> for lattice lags k with max |k_i| <= max_lag, by Riemann sums.
GramSequence gram_shifts(const SampledFunction& f, const SampledFunction& g, const Lattice& lags, int max_lag);

/// sum_k value(k) e^{-i k.xi}
Eigen::MatrixXcd bracket_symbol(const GramSequence& gram, const Eigen::VectorXd& xi);

/// Extreme eigenvalues of the bracket symbol over a grid_n^d grid of [0, 2 pi)^d.
std::pair<double, double> riesz_bounds(const GramSequence& gram, int grid_n);

/// Cross Gram of the dual and primal refinable functions against delta(k) I_r.
/// Not applicable when the bank is not critically sampled.
VerificationReport check_function_biorthogonality(const FilterBank& bank, int level, int max_lag,
                                                  double tol = 1e-4);

/// Columns: coordinates, then component values (real and imaginary parts when complex).
void write_csv(const SampledFunction& f, std::ostream& out);
/// Columns: lag coordinates, then the matrix entries row by row.
void write_csv(const GramSequence& g, std::ostream& out);

}  // namespace mixdil
