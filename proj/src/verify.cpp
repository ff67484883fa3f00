#include "mixdil/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mixdil/errors.hpp"
#include "mixdil/xform.hpp"
#include "tally.hpp"

namespace mixdil {
namespace {

using detail::fmt;
using detail::Tally;

FilterSeq identity_impulse(const IntVector& k, int r, bool exact) {
  ExactSeq s(k, IntVector::Ones(k.size()), r, r);
  for (int i = 0; i < r; ++i) s.at(k, i, i) = RadicalSum(1);
  const FilterSeq f(s);
  return exact ? f : f.without_exact();
}

bool bank_is_exact(const FilterBank& bank) {
  for (const auto& c : bank.channels())
    if (!c.primal.is_exact() || !c.dual.is_exact()) return false;
  return true;
}

void guard(std::int64_t probes) {
  if (probes > kMaxProbes)
    throw EnvelopeExceeded("impulse test needs " + std::to_string(probes) + " probes, above the limit of " +
                           std::to_string(kMaxProbes));
}

// b~ modulated by e^{-2 pi i m.omega}, phases reduced exactly before rounding.
FloatSeq modulate(const FloatSeq& u, const RationalVector& omega) {
  FloatSeq out = u;
  std::size_t pos = 0;
  const std::size_t block = static_cast<std::size_t>(u.rows()) * u.cols();
  for_each_point(u.offset(), u.shape(), [&](const IntVector& m) {
    Rational t;
    for (std::size_t i = 0; i < omega.size(); ++i) t = t + omega[i] * Rational(m(static_cast<Eigen::Index>(i)));
    const cd phase = std::polar(1.0, -2.0 * std::numbers::pi * t.frac().to_double());
    for (std::size_t e = 0; e < block; ++e) out.data()[pos + e] *= phase;
    pos += block;
  });
  return out;
}

std::vector<RationalVector> frequency_offsets(const FilterBank& bank) {
  std::vector<RationalVector> all;
  for (const auto& c : bank.channels())
    for (const auto& w : coset_reps(c.dilation).reps)
      if (std::find(all.begin(), all.end(), w) == all.end()) all.push_back(w);
  std::sort(all.begin(), all.end(), [](const RationalVector& a, const RationalVector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  });
  return all;
}

bool is_zero_vector(const RationalVector& w) {
  return std::all_of(w.begin(), w.end(), [](const Rational& x) { return x.is_zero(); });
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::pass_numeric: return "pass_numeric";
    case Verdict::not_applicable: return "not_applicable";
  }
  return "?";
}

std::string to_string(Arithmetic a) { return a == Arithmetic::exact ? "exact" : "float"; }

Lattice common_lattice(const FilterBank& bank) {
  Lattice out(bank.lowpass().dilation.matrix());
  for (const auto& c : bank.channels()) out = intersect(out, Lattice(c.dilation.matrix()));
  return out;
}

VerificationReport check_pr_time(const FilterBank& bank, double tol) {
  const Lattice lambda = common_lattice(bank);
  guard(lambda.index() * bank.multiplicity());
  const bool exact = bank_is_exact(bank);
  Tally tally("perfect_reconstruction", tol);
  if (!exact) tally.set_floating();
  for (const IntVector& k : quotient_reps(Lattice::integers(bank.dim()), lambda)) {
    const FilterSeq impulse = identity_impulse(k, bank.multiplicity(), exact);
    tally.compare(synthesize(bank, analyze(bank, impulse, 1)), impulse, "impulse k=" + fmt(k));
  }
  VerificationReport rep = tally.finish();
  rep.note = "impulses over " + std::to_string(lambda.index()) + " residues of the common sampling lattice";
  return rep;
}

VerificationReport check_pr_fourier(const FilterBank& bank, int grid_n, double tol) {
  const int r = bank.multiplicity();
  const int d = bank.dim();
  Tally tally("perfect_reconstruction_fourier", tol);
  tally.set_floating();
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(r, r);
  for (const RationalVector& omega : frequency_offsets(bank)) {
    const bool at_zero = is_zero_vector(omega);
    FloatSeq lhs(d, r, r);
    for (const auto& c : bank.channels()) {
      if (!in_dual_lattice(c.dilation.matrix(), omega)) continue;
      lhs = add(lhs, convolve(star(c.primal.values()), modulate(c.dual.values(), omega)));
    }
    const std::string where = "omega=" + fmt(omega);
    if (grid_n <= 0) {
      const FilterSeq got(lhs);
      const FilterSeq want = at_zero ? identity_impulse(IntVector::Zero(d), r, false) : FilterSeq::zero(d, r, r);
      const FilterSeq diff = subtract(got, want);
      diff.values().for_each([&](const IntVector& n, const cd* m) {
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j) {
            const double res = std::abs(m[i * r + j]);
            tally.record(res, res > tol, where + " coefficient n=" + fmt(n), want.value(n, i, j), got.value(n, i, j));
          }
      });
    } else {
      const FilterSeq got(lhs);
      IntVector shape = IntVector::Constant(d, grid_n);
      for_each_point(IntVector::Zero(d), shape, [&](const IntVector& g) {
        const Eigen::VectorXd xi = g.cast<double>() * (2.0 * std::numbers::pi / grid_n);
        const Eigen::MatrixXcd val = symbol(got, xi);
        const Eigen::MatrixXcd want = at_zero ? eye : Eigen::MatrixXcd::Zero(r, r);
        const double res = (val - want).cwiseAbs().maxCoeff();
        tally.record(res, res > tol, where + " grid point " + fmt(g), want(0, 0), val(0, 0));
      });
    }
  }
  VerificationReport rep = tally.finish();
  rep.note = grid_n <= 0 ? "Laurent coefficients" : "sampled on a " + std::to_string(grid_n) + "^d grid";
  return rep;
}

VerificationReport check_biorthogonal(const FilterBank& bank, double tol) {
  const VerificationReport pr = check_pr_time(bank, tol);
  if (!pr.passed()) {
    VerificationReport rep = pr;
    rep.property = "biorthogonal";
    rep.verdict = Verdict::fail;
    rep.note = "perfect reconstruction fails, so the bank cannot be biorthogonal";
    return rep;
  }
  const Lattice lambda = common_lattice(bank);
  const bool exact = bank_is_exact(bank);
  const int r = bank.multiplicity();
  const int d = bank.dim();
  std::int64_t probes = 0;
  std::vector<std::vector<IntVector>> positions;
  for (const auto& c : bank.channels()) {
    positions.push_back(quotient_reps(Lattice::integers(d), coarse_period(c.dilation, lambda)));
    probes += static_cast<std::int64_t>(positions.back().size()) * bank.channels().size();
  }
  guard(probes);
  Tally tally("biorthogonal", tol);
  if (!exact) tally.set_floating();
  for (int l = 0; l <= bank.wavelets(); ++l) {
    const Channel& in = bank.channel(l);
    for (const IntVector& p : positions[l]) {
      // lowpass bands carry r components, wavelet bands one
      FilterSeq impulse = l == 0 ? identity_impulse(p, r, exact) : identity_impulse(p, 1, exact);
      const FilterSeq synthesized = subdivision(in.dual, in.dilation, impulse);
      for (int k = 0; k <= bank.wavelets(); ++k) {
        const Channel& out = bank.channel(k);
        const FilterSeq got = transition(out.primal, out.dilation, synthesized);
        const FilterSeq want = k == l ? impulse : FilterSeq::zero(d, impulse.rows(), got.cols());
        tally.compare(got, want, "input channel " + std::to_string(l) + " p=" + fmt(p) + " output channel " +
                                     std::to_string(k));
      }
    }
  }
  return tally.finish();
}

CriticalSampling critical_sampling(const FilterBank& bank) {
  Rational sum(bank.multiplicity(), bank.lowpass().dilation.det_abs());
  for (int l = 1; l <= bank.wavelets(); ++l) sum = sum + Rational(1, bank.channel(l).dilation.det_abs());
  return {sum, sum == Rational(bank.multiplicity())};
}

Rational redundancy_rate(const FilterBank& bank, int levels) {
  const std::int64_t det0 = bank.lowpass().dilation.det_abs();
  Rational details;
  Rational scale(1);  // |det M_0|^{-(j-1)}
  for (int j = 1; j <= levels; ++j) {
    for (int l = 1; l <= bank.wavelets(); ++l) details = details + scale * Rational(1, bank.channel(l).dilation.det_abs());
    scale = scale * Rational(1, det0);
  }
  return details * Rational(1, bank.multiplicity()) + scale;
}

RedundancyCount redundancy_count(const FilterBank& bank, int levels, const Lattice& period) {
  const PeriodicArray zero(period, 1, bank.multiplicity());
  const PeriodicPyramid pyr = analyze_periodic(bank, zero, levels);
  RedundancyCount out;
  out.closed_form = redundancy_rate(bank, levels);
  out.stored = coefficient_count(pyr);
  out.input = zero.sites() * bank.multiplicity();
  out.counted = Rational(out.stored, out.input);
  if (!(out.counted == out.closed_form))
    throw InvariantViolation("counted redundancy " + out.counted.str() + " differs from closed form " +
                             out.closed_form.str());
  return out;
}

}  // namespace mixdil
