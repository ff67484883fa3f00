#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "mixdil/verify.hpp"
#include "mixdil/xform.hpp"

namespace mixdil {

constexpr std::uint64_t kPowerSeed = 0x6D697864;

struct PowerResult {
  double eigenvalue = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Rayleigh quotients never decreased (up to rounding).
  bool monotone = true;
};

/// Largest eigenvalue of a Hermitian positive semidefinite operator of size n.
PowerResult power_iteration(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op, Eigen::Index n,
                            int max_iter, double tol, std::uint64_t seed = kPowerSeed);

/// Frame-bound estimates of W_J on data periodic with respect to `period`.
struct StabilityReport {
  int levels = 0;
  IntMatrix period;
  double c1 = 0.0;
  double c2 = 0.0;
  double norm_W = 0.0;
  double norm_V = 0.0;
  double norm_W_dual = 0.0;
  double norm_V_dual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool monotone = true;
};

/// Throws PeriodNotDivisible.
StabilityReport frame_bounds(const FilterBank& bank, int levels, const Lattice& period, int max_iter = 500,
                             double tol = 1e-9);

/// Operator norm equalities of the adjoint pairs plus, on random data, the
/// reconstruction and norm sandwich inequalities.
VerificationReport check_duality(const FilterBank& bank, int levels, const Lattice& period, int trials = 20,
                                 double tol = 1e-6);

/// W_J and V_J as maps between flat vectors (pyramid layout of `like`).
Eigen::VectorXcd apply_analysis(const FilterBank& bank, int levels, const PeriodicArray& like,
                                const Eigen::VectorXcd& x, Side side);
Eigen::VectorXcd apply_synthesis(const FilterBank& bank, const PeriodicPyramid& like, const Eigen::VectorXcd& y,
                                 Side side);

}  // namespace mixdil
