#include "mixdil/stability.hpp"

#include <cmath>
#include <random>

#include "mixdil/errors.hpp"
#include "tally.hpp"

namespace mixdil {
namespace {

Eigen::VectorXcd random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = cd(g(rng), 0.0);
  return x / x.norm();
}

}  // namespace

PowerResult power_iteration(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op, Eigen::Index n,
                            int max_iter, double tol, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXcd x = random_unit(n, rng);
  PowerResult out;
  double prev = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXcd y = op(x);
    const double lambda = x.dot(y).real();
    out.eigenvalue = lambda;
    out.iterations = it;
    if (prev >= 0.0 && lambda < prev - 1e-12 * std::max(1.0, std::abs(prev))) out.monotone = false;
    const double ny = y.norm();
    if (ny == 0.0) {
      out.eigenvalue = 0.0;
      out.converged = true;
      return out;
    }
    const double resid = (y - lambda * x).norm();
    if (resid <= tol * std::max(1.0, std::abs(lambda))) {
      out.converged = true;
      return out;
    }
    prev = lambda;
    x = y / ny;
  }
  return out;
}

Eigen::VectorXcd apply_analysis(const FilterBank& bank, int levels, const PeriodicArray& like,
                                const Eigen::VectorXcd& x, Side side) {
  return flatten(analyze_periodic(bank, unflatten(x, like), levels, side));
}

Eigen::VectorXcd apply_synthesis(const FilterBank& bank, const PeriodicPyramid& like, const Eigen::VectorXcd& y,
                                 Side side) {
  return flatten(synthesize_periodic(bank, unflatten(y, like), side));
}

StabilityReport frame_bounds(const FilterBank& bank, int levels, const Lattice& period, int max_iter, double tol) {
  const PeriodicArray space(period, 1, bank.multiplicity());
  const PeriodicPyramid pyr = analyze_periodic(bank, space, levels);
  const Eigen::Index n = static_cast<Eigen::Index>(space.data().size());
  const Eigen::Index m = coefficient_count(pyr);

  auto gram = [&](Side side) {
    return [&, side](const Eigen::VectorXcd& x) {
      return apply_synthesis(bank, pyr, apply_analysis(bank, levels, space, x, side), side);
    };
  };
  auto cogram = [&](Side side) {
    return [&, side](const Eigen::VectorXcd& y) {
      return apply_analysis(bank, levels, space, apply_synthesis(bank, pyr, y, side), side);
    };
  };

  StabilityReport rep;
  rep.levels = levels;
  rep.period = period.basis();
  const PowerResult top = power_iteration(gram(Side::primal), n, max_iter, tol);
  rep.c2 = top.eigenvalue;
  const auto g = gram(Side::primal);
  const PowerResult shifted = power_iteration(
      [&](const Eigen::VectorXcd& x) { return (rep.c2 * x - g(x)).eval(); }, n, max_iter, tol, kPowerSeed + 1);
  rep.c1 = rep.c2 - shifted.eigenvalue;
  const PowerResult v = power_iteration(cogram(Side::primal), m, max_iter, tol, kPowerSeed + 2);
  const PowerResult wd = power_iteration(gram(Side::dual), n, max_iter, tol, kPowerSeed + 3);
  const PowerResult vd = power_iteration(cogram(Side::dual), m, max_iter, tol, kPowerSeed + 4);
  rep.norm_W = std::sqrt(std::max(0.0, rep.c2));
  rep.norm_V = std::sqrt(std::max(0.0, v.eigenvalue));
  rep.norm_W_dual = std::sqrt(std::max(0.0, wd.eigenvalue));
  rep.norm_V_dual = std::sqrt(std::max(0.0, vd.eigenvalue));
  rep.iterations = std::max({top.iterations, shifted.iterations, v.iterations, wd.iterations, vd.iterations});
  rep.converged = top.converged && shifted.converged && v.converged && wd.converged && vd.converged;
  rep.monotone = top.monotone && v.monotone && wd.monotone && vd.monotone;
  return rep;
}

VerificationReport check_duality(const FilterBank& bank, int levels, const Lattice& period, int trials, double tol) {
  const StabilityReport s = frame_bounds(bank, levels, period);
  detail::Tally tally("duality", tol);
  tally.set_floating();
  const double dw = std::abs(s.norm_W - s.norm_V);
  tally.record(dw, dw > tol, "norm of W vs norm of V", cd(s.norm_W), cd(s.norm_V));
  const double dd = std::abs(s.norm_W_dual - s.norm_V_dual);
  tally.record(dd, dd > tol, "dual norm of W vs dual norm of V", cd(s.norm_W_dual), cd(s.norm_V_dual));

  const PeriodicArray space(period, 1, bank.multiplicity());
  std::mt19937_64 rng(kPowerSeed);
  const double wd2 = s.norm_W_dual * s.norm_W_dual;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXcd v = random_unit(static_cast<Eigen::Index>(space.data().size()), rng);
    const PeriodicPyramid pyr = analyze_periodic(bank, unflatten(v, space), levels);
    const double wv2 = flatten(pyr).squaredNorm();
    const std::string where = "trial " + std::to_string(t);
    // v = V~ W v, so |v| <= |V~| |W v|
    const double rec = (flatten(synthesize_periodic(bank, pyr)) - v).norm();
    tally.record(rec, rec > tol, where + " reconstruction", cd(0.0), cd(rec));
    const double gap = 1.0 - wd2 * wv2;
    tally.record(std::max(0.0, gap), gap > tol, where + " |v|^2 <= |W~|^2 |Wv|^2", cd(1.0), cd(wd2 * wv2));
    const double over = wv2 - s.c2 * (1 + tol);
    tally.record(std::max(0.0, over), over > 0, where + " |Wv|^2 <= c2 |v|^2", cd(s.c2), cd(wv2));
    const double under = s.c1 * (1 - tol) - wv2;
    tally.record(std::max(0.0, under), under > 0, where + " c1 |v|^2 <= |Wv|^2", cd(s.c1), cd(wv2));
  }
  VerificationReport rep = tally.finish();
  rep.note = "norms W " + detail::fmt(s.norm_W) + ", V " + detail::fmt(s.norm_V) + ", W~ " +
             detail::fmt(s.norm_W_dual) + ", V~ " + detail::fmt(s.norm_V_dual);
  return rep;
}

}  // namespace mixdil
