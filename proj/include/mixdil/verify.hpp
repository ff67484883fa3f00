#pragma once

#include <string>
#include <vector>

#include "mixdil/bank.hpp"
#include "mixdil/rational.hpp"

namespace mixdil {

enum class Verdict { pass, fail, pass_numeric, not_applicable };
enum class Arithmetic { exact, floating };

std::string to_string(Verdict v);
std::string to_string(Arithmetic a);

struct Witness {
  std::string location;
  std::string expected;
  std::string got;
};

/// Outcome of one property check. `pass` is only issued under exact arithmetic;
/// `pass_numeric` means max_residual stayed within `tolerance`.
struct VerificationReport {
  std::string property;
  Verdict verdict = Verdict::fail;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::vector<Witness> witnesses;
  Arithmetic arithmetic = Arithmetic::floating;
  std::string note;

  bool passed() const { return verdict == Verdict::pass || verdict == Verdict::pass_numeric; }
};

constexpr double kDefaultTolerance = 1e-10;
/// Probe budget for impulse based checks.
constexpr std::int64_t kMaxProbes = 1'000'000;

/// Intersection of M_l Z^d over all channels.
Lattice common_lattice(const FilterBank& bank);

/// Perfect reconstruction by impulse responses of one analysis/synthesis level
/// over representatives of Z^d modulo the common lattice. Throws EnvelopeExceeded.
VerificationReport check_pr_time(const FilterBank& bank, double tol = kDefaultTolerance);

/// Perfect reconstruction through the frequency-domain identity. grid_n == 0
/// compares Laurent coefficients; grid_n > 0 samples xi on a grid_n^d grid.
VerificationReport check_pr_fourier(const FilterBank& bank, int grid_n = 0, double tol = kDefaultTolerance);

/// W V~ = identity, tested on channel impulses. Fails outright when PR fails.
VerificationReport check_biorthogonal(const FilterBank& bank, double tol = kDefaultTolerance);

struct CriticalSampling {
  Rational sum;
  bool critical;
};
/// r / |det M_0| + sum_l 1 / |det M_l| compared with r.
CriticalSampling critical_sampling(const FilterBank& bank);

/// Stored scalars per input scalar of a J-level transform.
Rational redundancy_rate(const FilterBank& bank, int levels);

struct RedundancyCount {
  Rational closed_form;
  std::int64_t stored = 0;
  std::int64_t input = 0;
  Rational counted;
};
/// Counts the entries of a periodic pyramid and checks them against the closed
/// form (throws InvariantViolation on disagreement). Throws PeriodNotDivisible.
RedundancyCount redundancy_count(const FilterBank& bank, int levels, const Lattice& period);

}  // namespace mixdil
