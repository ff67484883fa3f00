#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "mixdil/errors.hpp"
#include "mixdil/stability.hpp"
#include "test_support.hpp"

using namespace mixdil;
using namespace mixdil::testing;

namespace {

FilterBank corrupted_haar() {
  std::vector<Channel> ch = builtin("haar").channels();
  ch[1].primal = exact_taps(0, {1, 1}, 2);
  return FilterBank("haar-bad", 1, 1, ch);
}

// Primal rescaled by c, dual by 1/c: still PR, no longer tight.
FilterBank rescaled_haar(double c) {
  std::vector<Channel> ch = builtin("haar").channels();
  ch[1].primal = scale(ch[1].primal, cd(c));
  ch[1].dual = scale(ch[1].dual, cd(1.0 / c));
  return FilterBank("haar-scaled", 1, 1, ch);
}

Eigen::MatrixXcd dense(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op, Eigen::Index n) {
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m.col(i) = op(Eigen::VectorXcd::Unit(n, i));
  return m;
}

}  // namespace

TEST_CASE("power iteration on explicit matrices") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(4, 4);
  a.diagonal() << 3.0, 1.0, 0.5, 0.25;
  const PowerResult r = power_iteration([&](const Eigen::VectorXcd& x) { return (a * x).eval(); }, 4, 500, 1e-10);
  CHECK(r.converged);
  CHECK(r.monotone);
  CHECK(r.eigenvalue == doctest::Approx(3.0).epsilon(1e-12));
  const PowerResult z = power_iteration([](const Eigen::VectorXcd& x) { return Eigen::VectorXcd::Zero(x.size()).eval(); }, 4, 5, 1e-10);
  CHECK(z.converged);
  CHECK(z.eigenvalue == 0.0);
}

TEST_CASE("orthonormal builtins have unit frame bounds") {
  for (int levels = 1; levels <= 3; ++levels) {
    const StabilityReport s = frame_bounds(builtin("haar"), levels, diagonal_lattice(vec({64})));
    CHECK(std::abs(s.c1 - 1) < 1e-8);
    CHECK(std::abs(s.c2 - 1) < 1e-8);
    CHECK(s.converged);
    CHECK(s.iterations < 500);
    CHECK(std::abs(s.norm_V - 1) < 1e-6);
    CHECK(std::abs(s.norm_W_dual - 1) < 1e-6);
    CHECK(std::abs(s.norm_V_dual - 1) < 1e-6);
  }
  const StabilityReport sp = frame_bounds(builtin("haar-split4"), 2, diagonal_lattice(vec({16})));
  CHECK(std::abs(sp.c1 - 1) < 1e-8);
  CHECK(std::abs(sp.c2 - 1) < 1e-8);
  const StabilityReport tf = frame_bounds(builtin("bspline-tf"), 2, diagonal_lattice(vec({64})));
  CHECK(std::abs(tf.c1 - 1) < 1e-7);
  CHECK(std::abs(tf.c2 - 1) < 1e-7);
  const StabilityReport h2 = frame_bounds(builtin("haar2d"), 2, diagonal_lattice(vec({8, 8})));
  CHECK(std::abs(h2.c1 - 1) < 1e-7);
  CHECK(std::abs(h2.c2 - 1) < 1e-7);
  CHECK_THROWS_AS(frame_bounds(builtin("haar-split4"), 1, diagonal_lattice(vec({6}))), PeriodNotDivisible);
}

TEST_CASE("frame bounds match the dense Gram spectrum") {
  for (double c : {0.5, 2.0}) {
    const FilterBank b = rescaled_haar(c);
    const Lattice period = diagonal_lattice(vec({16}));
    const StabilityReport s = frame_bounds(b, 2, period);
    const PeriodicArray space(period, 1, 1);
    const PeriodicPyramid pyr = analyze_periodic(b, space, 2);
    const Eigen::MatrixXcd g = dense(
        [&](const Eigen::VectorXcd& x) {
          return apply_synthesis(b, pyr, apply_analysis(b, 2, space, x, Side::primal), Side::primal);
        },
        16);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    CHECK(s.c2 == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-7));
    CHECK(s.c1 == doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-7));
    CHECK(s.monotone);
    CHECK(s.c1 > 0);
    CHECK(s.c1 <= s.c2);
    CHECK(s.norm_W * s.norm_W <= s.c2 * (1 + 1e-6));
    CHECK(check_duality(b, 2, period).passed());
  }
}

TEST_CASE("sandwich on random vectors for the tight frame") {
  const FilterBank tf = builtin("bspline-tf");
  const Lattice period = diagonal_lattice(vec({64}));
  const StabilityReport s = frame_bounds(tf, 2, period);
  CHECK(s.c1 >= 0.0);
  CHECK(s.c1 <= 1.0 + 1e-9);
  CHECK(s.c2 >= 1.0 - 1e-9);
  std::mt19937 rng(51);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    PeriodicArray v(period, 1, 1);
    for (auto& x : v.data()) x = val(rng);
    const double nv = flatten(v).squaredNorm();
    const double nw = flatten(analyze_periodic(tf, v, 2)).squaredNorm();
    CHECK(s.c1 * nv <= nw * (1 + 1e-9));
    CHECK(nw <= s.c2 * nv * (1 + 1e-9));
  }
}

TEST_CASE("analysis and primal synthesis are adjoint") {
  std::mt19937 rng(52);
  std::normal_distribution<double> g;
  for (const auto& name : builtin_names()) {
    const FilterBank b = builtin(name);
    const Lattice period = diagonal_lattice(IntVector::Constant(b.dim(), b.dim() == 1 ? 32 : 8));
    for (int levels = 1; levels <= 3; ++levels) {
      const PeriodicArray space(period, 1, 1);
      const PeriodicPyramid pyr = analyze_periodic(b, space, levels);
      Eigen::VectorXcd v(space.data().size()), w(coefficient_count(pyr));
      for (auto& x : v) x = cd(g(rng), g(rng));
      for (auto& x : w) x = cd(g(rng), g(rng));
      const cd lhs = v.dot(apply_synthesis(b, pyr, w, Side::primal));  // <V w, v>
      const cd rhs = apply_analysis(b, levels, space, v, Side::primal).dot(w);  // <w, W v>
      CHECK(std::abs(lhs - rhs) < 1e-11);
    }
  }
}

TEST_CASE("duality check") {
  const Lattice period = diagonal_lattice(vec({32}));
  const VerificationReport h = check_duality(builtin("haar"), 2, period);
  CHECK(h.verdict == Verdict::pass_numeric);
  CHECK(check_duality(dual_swapped(rescaled_haar(3.0)), 2, period).passed());
  const VerificationReport bad = check_duality(corrupted_haar(), 2, period);
  CHECK(bad.verdict == Verdict::fail);
  CHECK_FALSE(bad.witnesses.empty());
}
