#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "mixdil/errors.hpp"
#include "mixdil/refine.hpp"
#include "test_support.hpp"

using namespace mixdil;
using namespace mixdil::testing;

namespace {

double hat(double x) { return std::max(0.0, 1.0 - std::abs(x)); }

// max |f(x_p) - want(x_p)| over stored grid points
template <class F>
double max_err_1d(const SampledFunction& s, int c, F want) {
  double err = 0.0;
  s.values.for_each([&](const IntVector& p, const cd*) {
    err = std::max(err, std::abs(s.value(p, c) - want(s.point(p)(0))));
  });
  return err;
}

// <f, scale * psi_n(. - shift on the grid)> approximated on a level-N grid.
// psi is sampled at level N - j; shift is in level-(N-j) grid units.
double inner(const SampledFunction& psi, const IntVector& grid_shift, double (*f)(double), int big_n) {
  double s = 0.0;
  const double h = std::ldexp(1.0, -big_n);
  psi.values.for_each([&](const IntVector& q, const cd* v) {
    const double x = static_cast<double>(q(0) + grid_shift(0)) * h;
    s += f(x) * v[0].real();
  });
  return s * h;
}

double bump(double x) { return std::exp(-x * x) * (1.0 + 0.3 * x); }

}  // namespace

TEST_CASE("mask spectrum") {
  CHECK(mask_spectrum(builtin("haar").lowpass().primal).ok);
  CHECK(mask_spectrum(builtin("bspline-tf").lowpass().primal).ok);
  const MaskDiagnostic low = mask_spectrum(taps(0, {0.45, 0.45}));
  CHECK_FALSE(low.ok);
  CHECK(low.message.find("not an eigenvalue") != std::string::npos);

  FloatSeq d2(vec({0}), vec({1}), 2, 2);
  d2.at(vec({0}), 0, 0) = 1.0;
  d2.at(vec({0}), 1, 1) = 0.5;
  const MaskDiagnostic m2 = mask_spectrum(FilterSeq(d2));
  CHECK(m2.ok);
  CHECK(m2.eigenvalues.size() == 2);

  FloatSeq dbl(vec({0}), vec({1}), 2, 2);
  dbl.at(vec({0}), 0, 0) = 1.0;
  dbl.at(vec({0}), 1, 1) = 1.0;
  CHECK_FALSE(mask_spectrum(FilterSeq(dbl)).ok);

  CHECK_THROWS_AS(cascade(taps(0, {0.45, 0.45}), mat({{2}}), 3), MaskDiagnosticFailed);
}

TEST_CASE("haar cascade gives the box function exactly") {
  const SampledFunction box = cascade(builtin("haar"), 8);
  REQUIRE_FALSE(box.differences.empty());
  CHECK(box.differences.back() == 0.0);
  CHECK(max_err_1d(box, 0, [](double x) { return x >= 0.0 && x < 1.0 ? 1.0 : 0.0; }) == 0.0);
  CHECK(box.value(vec({0}), 0) == cd(1.0));
  CHECK(box.value(vec({255}), 0) == cd(1.0));
  CHECK(box.value(vec({256}), 0) == cd(0.0));
  // stored box covers the support with a margin
  CHECK(box.values.offset()(0) <= -1);
  CHECK(box.values.offset()(0) + box.values.shape()(0) >= 257);
}

TEST_CASE("shifted haar mask gives the box on [1,2)") {
  const SampledFunction s = cascade(taps(1, {0.5, 0.5}), mat({{2}}), 5);
  CHECK(max_err_1d(s, 0, [](double x) { return x >= 1.0 && x < 2.0 ? 1.0 : 0.0; }) == 0.0);
  const auto [lo, hi] = support_estimate(taps(1, {0.5, 0.5}), mat({{2}}));
  CHECK(lo(0) == doctest::Approx(1.0));
  CHECK(hi(0) == doctest::Approx(2.0));
}

TEST_CASE("b-spline mask gives the hat function") {
  const SampledFunction h = cascade(builtin("bspline-tf"), 10);
  CHECK(max_err_1d(h, 0, [](double x) { return hat(x - 1.0); }) < 1e-10);
  const auto [lo, hi] = support_estimate(builtin("bspline-tf").lowpass().primal, mat({{2}}));
  CHECK(lo(0) == doctest::Approx(0.0));
  CHECK(hi(0) == doctest::Approx(2.0));
}

TEST_CASE("two-dimensional haar gives the unit square") {
  const SampledFunction s = cascade(builtin("haar2d"), 4);
  double err = 0.0;
  s.values.for_each([&](const IntVector& p, const cd* v) {
    const Eigen::VectorXd x = s.point(p);
    const bool in = x(0) >= 0 && x(0) < 1 && x(1) >= 0 && x(1) < 1;
    err = std::max(err, std::abs(v[0] - (in ? 1.0 : 0.0)));
  });
  CHECK(err == 0.0);
}

TEST_CASE("samples satisfy the refinement equation") {
  for (const char* name : {"haar", "bspline-tf", "haar-split4", "haar2d"}) {
    CAPTURE(name);
    const FilterBank bank = builtin(name);
    const SampledFunction phi = cascade(bank, bank.dim() == 1 ? 7 : 4);
    const SampledFunction again = refine_step(bank.lowpass().primal, phi);
    const FloatSeq diff = add(again.values, phi.values, cd(-1.0));
    double err = 0.0;
    for (const cd& x : diff.data()) err = std::max(err, std::abs(x));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("diverging cascade is reported") {
  const FilterSeq bad = taps(0, {1.5, -0.5});
  CHECK(mask_spectrum(bad).ok);
  CHECK_THROWS_AS(cascade(bad, mat({{2}}), 2), Diverged);
}

TEST_CASE("refinement level guard") {
  CHECK_THROWS_AS(cascade(builtin("haar2d"), 14), EnvelopeExceeded);
  CHECK_THROWS_AS(cascade(builtin("haar"), -1), std::invalid_argument);
}

TEST_CASE("wavelet generators") {
  SUBCASE("haar") {
    const FilterBank bank = builtin("haar");
    const SampledFunction phi = cascade(bank, 6);
    const auto psi = derive_generators(bank, phi, Side::primal);
    REQUIRE(psi.size() == 1);
    CHECK(max_err_1d(psi[0], 0, [](double x) {
            return x >= 0 && x < 0.5 ? 1.0 : (x >= 0.5 && x < 1.0 ? -1.0 : 0.0);
          }) == 0.0);
  }
  SUBCASE("zero filter gives the zero function") {
    const SampledFunction phi = cascade(builtin("haar"), 4);
    const SampledFunction z = refine_step(taps(0, {0.0}), phi);
    for (const cd& x : z.values.data()) CHECK(x == cd(0.0));
  }
  SUBCASE("b-spline tight frame") {
    const FilterBank bank = builtin("bspline-tf");
    const SampledFunction phi = cascade(bank, 6);
    const auto psi = derive_generators(bank, phi, Side::primal);
    REQUIRE(psi.size() == 2);
    // with u = 2x - 2: psi1 = -hat(u+1)/2 + hat(u) - hat(u-1)/2, psi2 = (hat(u+1) - hat(u-1)) / sqrt 2
    const double r2 = std::numbers::sqrt2;
    CHECK(max_err_1d(psi[0], 0, [](double x) {
            const double u = 2 * x - 2;
            return -0.5 * hat(u + 1) + hat(u) - 0.5 * hat(u - 1);
          }) < 1e-12);
    CHECK(max_err_1d(psi[1], 0, [&](double x) { return (hat(2 * x - 1) - hat(2 * x - 3)) / r2; }) < 1e-12);
    // half-integers sit at multiples of 32 on the level-6 grid
    CHECK(psi[0].value(vec({64}), 0).real() == doctest::Approx(1.0));
    CHECK(psi[0].value(vec({32}), 0).real() == doctest::Approx(-0.5));
    CHECK(psi[0].value(vec({96}), 0).real() == doctest::Approx(-0.5));
    CHECK(psi[0].value(vec({0}), 0).real() == doctest::Approx(0.0));
    CHECK(psi[1].value(vec({32}), 0).real() == doctest::Approx(r2 / 2));
    CHECK(psi[1].value(vec({96}), 0).real() == doctest::Approx(-r2 / 2));
    CHECK(psi[1].value(vec({64}), 0).real() == doctest::Approx(0.0));
  }
}

TEST_CASE("Gram sequences") {
  const Lattice z1 = Lattice::integers(1);
  SUBCASE("box is orthonormal") {
    const SampledFunction box = cascade(builtin("haar"), 8);
    const GramSequence g = gram_shifts(box, box, z1, 2);
    CHECK(g.lags.size() == 5);
    CHECK(std::abs(g.at(vec({0}))(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(g.at(vec({1}))(0, 0)) < 1e-14);
    CHECK(std::abs(g.at(vec({-2}))(0, 0)) < 1e-14);
    const auto [lo, hi] = riesz_bounds(g, 32);
    CHECK(lo == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("hat") {
    const SampledFunction h = cascade(builtin("bspline-tf"), 12);
    const GramSequence g = gram_shifts(h, h, z1, 3);
    CHECK(std::abs(g.at(vec({0}))(0, 0) - 2.0 / 3.0) < 1e-3);
    CHECK(std::abs(g.at(vec({1}))(0, 0) - 1.0 / 6.0) < 1e-3);
    CHECK(std::abs(g.at(vec({-1}))(0, 0) - 1.0 / 6.0) < 1e-3);
    CHECK(std::abs(g.at(vec({2}))(0, 0)) < 1e-12);
    const Eigen::VectorXd pi = Eigen::VectorXd::Constant(1, std::numbers::pi);
    CHECK(std::abs(bracket_symbol(g, pi)(0, 0) - 1.0 / 3.0) < 2e-3);
    CHECK(std::abs(bracket_symbol(g, Eigen::VectorXd::Zero(1))(0, 0) - 1.0) < 2e-3);
    const auto [lo, hi] = riesz_bounds(g, 64);
    CHECK(std::abs(lo - 1.0 / 3.0) < 2e-3);
    CHECK(std::abs(hi - 1.0) < 2e-3);
    CHECK_THROWS_AS(g.at(vec({7})), std::out_of_range);
  }
  SUBCASE("haar wavelet is orthogonal to the box shifts") {
    const FilterBank bank = builtin("haar");
    const SampledFunction box = cascade(bank, 8);
    const auto psi = derive_generators(bank, box, Side::primal);
    const GramSequence g = gram_shifts(psi[0], box, z1, 2);
    for (const auto& v : g.values) CHECK(max_abs(v) < 1e-14);
  }
  SUBCASE("bracket symbol is positive semidefinite") {
    const FilterBank bank = builtin("bspline-tf");
    const SampledFunction h = cascade(bank, 8);
    const auto psi = derive_generators(bank, h, Side::primal);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    for (const SampledFunction* f : {&h, &psi[0], &psi[1]}) {
      const GramSequence g = gram_shifts(*f, *f, z1, 3);
      for (int t = 0; t < 50; ++t) {
        const Eigen::MatrixXcd s = bracket_symbol(g, Eigen::VectorXd::Constant(1, u(rng)));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (s + s.adjoint()));
        CHECK(es.eigenvalues().minCoeff() > -1e-12);
      }
    }
  }
  SUBCASE("2-D lags restricted to a sublattice") {
    const SampledFunction sq = cascade(builtin("haar2d"), 3);
    const GramSequence g = gram_shifts(sq, sq, Lattice(mat({{2, 0}, {0, 2}})), 2);
    CHECK(g.lags.size() == 9);
    CHECK(std::abs(g.at(vec({0, 0}))(0, 0) - 1.0) < 1e-14);
  }
}

TEST_CASE("coefficients of finer bands follow from the transition operator") {
  // w_{0,j}(k) = <f, det0^{j/2} phi(M0^j x - k)>
  // w_{l,j}(k) = <f, |det M0^{-1} M_l|^{1/2} det0^{j/2} psi_l(M0^j x - M0^{-1} M_l k)>
  constexpr int big_n = 11;
  for (const char* name : {"haar", "bspline-tf", "haar-split4"}) {
    CAPTURE(name);
    const FilterBank bank = builtin(name);
    for (int j = 0; j <= 2; ++j) {
      CAPTURE(j);
      const SampledFunction phi_fine = cascade(bank, big_n - j - 1);
      const SampledFunction phi = cascade(bank, big_n - j);
      const auto psi = derive_generators(bank, phi, Side::primal);
      // w_{0,j+1} on a window of shifts
      const std::int64_t lo = -24, n = 49;
      FloatSeq w0(vec({lo}), vec({n}), 1, 1);
      const double s1 = std::pow(2.0, (j + 1) / 2.0);
      for (std::int64_t k = lo; k < lo + n; ++k)
        w0.at(vec({k}), 0, 0) = s1 * inner(phi_fine, vec({k << (big_n - j - 1)}), bump, big_n);
      for (int l = 1; l <= bank.wavelets(); ++l) {
        CAPTURE(l);
        const IntMatrix ml = bank.channel(l).dilation.matrix();
        const std::int64_t ratio = ml(0, 0) / 2;  // M0^{-1} M_l
        const FilterSeq pred = transition(bank.channel(l).primal, ml, FilterSeq(w0));
        double err = 0.0, size = 0.0;
        for (std::int64_t k = -3; k <= 3; ++k) {
          size = std::max(size, std::abs(pred.values().value(vec({k}), 0, 0)));
          const double direct = std::sqrt(static_cast<double>(ratio)) * std::pow(2.0, j / 2.0) *
                                inner(psi[l - 1], vec({(ratio * k) << (big_n - j)}), bump, big_n);
          err = std::max(err, std::abs(direct - pred.values().value(vec({k}), 0, 0)));
        }
        CHECK(err < 1e-12);
        // nontrivial, so a different normalization of psi_l would be detected
        CHECK_MESSAGE(size > 1e-3, "max coefficient " << size);
      }
    }
  }
}

TEST_CASE("function-level biorthogonality") {
  CHECK(check_function_biorthogonality(builtin("haar"), 8, 2).verdict == Verdict::pass_numeric);
  CHECK(check_function_biorthogonality(builtin("haar-split4"), 8, 2).verdict == Verdict::pass_numeric);
  CHECK(check_function_biorthogonality(builtin("haar2d"), 4, 1).verdict == Verdict::pass_numeric);
  const VerificationReport tf = check_function_biorthogonality(builtin("bspline-tf"), 6, 2);
  CHECK(tf.verdict == Verdict::not_applicable);
  CHECK(tf.note.find("critically sampled") != std::string::npos);
}

TEST_CASE("csv output") {
  const SampledFunction box = cascade(builtin("haar"), 1);
  std::ostringstream out;
  write_csv(box, out);
  const std::string s = out.str();
  CHECK(s.rfind("x1,c1\n", 0) == 0);
  CHECK(s.find("\n0.5,1\n") != std::string::npos);
  std::ostringstream g;
  write_csv(gram_shifts(box, box, Lattice::integers(1), 1), g);
  CHECK(g.str().rfind("k1,g11_re,g11_im\n", 0) == 0);
  CHECK(g.str().find("\n0,1,0\n") != std::string::npos);
}
