#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/LU>

#include "doctest.h"
#include "mixdil/errors.hpp"
#include "mixdil/filter.hpp"
#include "test_support.hpp"

using namespace mixdil;
using namespace mixdil::testing;

namespace {

const IntMatrix two = mat({{2}});
const IntMatrix quincunx = mat({{1, 1}, {1, -1}});

std::vector<cd> coeffs(const FilterSeq& u) { return u.values().data(); }

// Direct kernel evaluation of the subdivision operator:
// [S u](n) = |det M|^{1/2} sum_k u(k) a(n - M k).
FilterSeq subdivision_oracle(const FilterSeq& a, const IntMatrix& m, const FilterSeq& u) {
  const double s = std::sqrt(std::abs(static_cast<double>(int_det(m))));
  const int d = u.dim();
  // output support bound: M * box(u) + box(a)
  auto [lo, sh] = image_box(m, u.offset(), u.shape());
  IntVector olo = lo + a.offset();
  IntVector osh = sh + a.shape() - IntVector::Ones(d);
  FloatSeq out(olo, osh, u.rows(), a.cols());
  for_each_point(olo, osh, [&](const IntVector& n) {
    u.values().for_each([&](const IntVector& k, const cd* uk) {
      const IntVector idx = n - int_apply(m, k);
      for (int i = 0; i < u.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
          for (int t = 0; t < u.cols(); ++t) out.at(n, i, j) += s * uk[i * u.cols() + t] * a.value(idx, t, j);
    });
  });
  return FilterSeq(out.trim());
}

// [T u](n) = |det M|^{1/2} sum_k u(k) conj(b(k - M n))^T, scanning n over a generous box.
FilterSeq transition_oracle(const FilterSeq& b, const IntMatrix& m, const FilterSeq& u, int radius) {
  const double s = std::sqrt(std::abs(static_cast<double>(int_det(m))));
  const int d = u.dim();
  IntVector lo = IntVector::Constant(d, -radius);
  IntVector sh = IntVector::Constant(d, 2 * radius + 1);
  FloatSeq out(lo, sh, u.rows(), b.rows());
  for_each_point(lo, sh, [&](const IntVector& n) {
    u.values().for_each([&](const IntVector& k, const cd* uk) {
      const IntVector idx = k - int_apply(m, n);
      for (int i = 0; i < u.rows(); ++i)
        for (int j = 0; j < b.rows(); ++j)
          for (int t = 0; t < u.cols(); ++t) out.at(n, i, j) += s * uk[i * u.cols() + t] * std::conj(b.value(idx, j, t));
    });
  });
  return FilterSeq(out.trim());
}

}  // namespace

TEST_CASE("convolution examples") {
  const FilterSeq d0 = FilterSeq::delta(vec({0}), 1, 1);
  const FilterSeq u = taps(-1, {1, 2, 1});
  CHECK(convolve(d0, u) == u);
  const FilterSeq r = convolve(taps(0, {1, 1}), taps(0, {1, 1}));
  CHECK(r.offset() == vec({0}));
  CHECK(coeffs(r) == std::vector<cd>{1, 2, 1});
  const FilterSeq t = convolve(taps(0, {1, -1}), taps(0, {1, 1}));
  CHECK(coeffs(t) == std::vector<cd>{1, 0, -1});
  std::mt19937 rng(1);
  CHECK_THROWS_AS(convolve(random_filter(rng, 1, 1, 2), taps(0, {1})), ShapeMismatch);
}

TEST_CASE("exact convolution stays exact across radicals") {
  const FilterSeq a = exact_taps(0, {1, -1}, 4, 2);  // sqrt(2)/4 (1, -1)
  const FilterSeq sq = convolve(a, a);
  REQUIRE(sq.is_exact());
  CHECK(sq.exact()->data()[0] == RadicalSum(Rational(1, 8)));
  CHECK(sq.exact()->data()[1] == RadicalSum(Rational(-1, 4)));
  CHECK(sq.exact_is_single_term());
  const FilterSeq mixed = add(a, exact_taps(0, {1, 1}, 2));
  REQUIRE(mixed.is_exact());
  CHECK_FALSE(mixed.exact_is_single_term());
  CHECK(std::abs(mixed.value(vec({0}), 0, 0).real() - (std::sqrt(2.0) / 4 + 0.5)) < 1e-15);
}

TEST_CASE("upsample and downsample") {
  const FilterSeq u = taps(0, {1, 2, 1});
  const FilterSeq up = upsample(u, two);
  CHECK(up.offset() == vec({0}));
  CHECK(coeffs(up) == std::vector<cd>{1, 0, 2, 0, 1});
  CHECK(upsample(u, mat({{1}})) == u);

  FloatSeq d2(vec({1, 0}), vec({1, 1}), 1, 1);
  d2.at(vec({1, 0}), 0, 0) = 1.0;
  const FilterSeq q = upsample(FilterSeq(d2), quincunx);
  CHECK(q.offset() == vec({1, 1}));
  CHECK(q.values().points() == 1);

  const FilterSeq dn = downsample(taps(-2, {1, 0, 2, 0, 1}), two);
  CHECK(dn.offset() == vec({-1}));
  CHECK(coeffs(dn) == std::vector<cd>{1, 2, 1});

  std::mt19937 rng(3);
  for (int t = 0; t < 20; ++t) {
    const FilterSeq v = random_filter(rng, 2, 1, 2);
    CHECK(max_abs_diff(downsample(upsample(v, quincunx), quincunx), v) == 0.0);
    CHECK(max_abs_diff(downsample(upsample(v, 2 * identity_matrix(2)), 2 * identity_matrix(2)), v) == 0.0);
  }
  CHECK(downsample(taps(1, {1}), two).is_zero());
  CHECK(downsample(taps(1, {1}), two).empty());
}

TEST_CASE("star") {
  const FilterSeq u = taps(-1, {1, 2, 1});
  CHECK(star(u) == u);
  const FilterSeq d1 = taps(1, {1});
  CHECK(star(d1).offset() == vec({-1}));
  const FilterSeq i0 = FilterSeq::from_values(vec({0}), vec({1}), 1, 1, {cd(0, 1)});
  CHECK(star(i0).value(vec({0}), 0, 0) == cd(0, -1));
  std::mt19937 rng(4);
  for (int t = 0; t < 20; ++t) {
    const FilterSeq v = random_filter(rng, 1 + t % 2, 2, 3, 3, true);
    const FilterSeq s = star(v);
    CHECK(s.rows() == 3);
    CHECK(star(s) == v);
  }
}

TEST_CASE("symbol") {
  const FilterSeq haar_low = taps(0, {0.5, 0.5});
  const FilterSeq haar_high = taps(0, {0.5, -0.5});
  Eigen::VectorXd xi(1);
  xi << 0.0;
  CHECK(std::abs(symbol(haar_low, xi)(0, 0) - 1.0) < 1e-15);
  xi << std::numbers::pi;
  CHECK(std::abs(symbol(haar_low, xi)(0, 0)) < 1e-15);
  // (1 - e^{-i pi}) / 2
  CHECK(std::abs(symbol(haar_high, xi)(0, 0) - 1.0) < 1e-15);
}

TEST_CASE("subdivision examples") {
  const FilterSeq a = exact_taps(0, {1, 1}, 2);
  const FilterSeq s0 = subdivision(a, two, FilterSeq::delta(vec({0}), 1, 1));
  REQUIRE(s0.is_exact());
  CHECK(s0.offset() == vec({0}));
  CHECK(s0.exact()->data()[0] == RadicalSum(ScaledScalar{1, 2, 2}));
  CHECK(s0.exact()->data()[1] == RadicalSum(ScaledScalar{1, 2, 2}));
  const FilterSeq s1 = subdivision(a, two, FilterSeq::delta(vec({1}), 1, 1));
  CHECK(s1.offset() == vec({2}));
  CHECK(*exact_equal(s1, shift(s0, vec({2}))));
  CHECK_THROWS_AS(subdivision(a, two, FilterSeq::delta(vec({0}), 1, 2)), ShapeMismatch);
}

TEST_CASE("subdivision agrees with the direct kernel and is linear") {
  std::mt19937 rng(7);
  for (int t = 0; t < 50; ++t) {
    const int d = 1 + t % 2;
    const IntMatrix m = d == 1 ? two : (t % 4 == 1 ? quincunx : 2 * identity_matrix(2));
    const FilterSeq a = random_filter(rng, d, 2, 2);
    const FilterSeq u = random_filter(rng, d, 1, 2);
    const FilterSeq v = random_filter(rng, d, 1, 2);
    CHECK(max_abs_diff(subdivision(a, m, u), subdivision_oracle(a, m, u)) < 1e-13);
    const cd alpha(0.7, -0.2), beta(-1.3, 0.4);
    const FilterSeq lhs = subdivision(a, m, add(scale(u, alpha), scale(v, beta)));
    const FilterSeq rhs = add(scale(subdivision(a, m, u), alpha), scale(subdivision(a, m, v), beta));
    CHECK(max_abs_diff(lhs, rhs) < 1e-13);
  }
}

TEST_CASE("transition examples") {
  const FilterSeq b = exact_taps(0, {1, 1}, 2);
  const FilterSeq t0 = transition(b, two, FilterSeq::delta(vec({0}), 1, 1));
  REQUIRE(t0.is_exact());
  CHECK(t0.offset() == vec({0}));
  CHECK(t0.values().points() == 1);
  CHECK(t0.exact()->data()[0] == RadicalSum(ScaledScalar{1, 2, 2}));
  CHECK(transition(b, two, FilterSeq::zero(1, 1, 1)).is_zero());

  std::mt19937 rng(8);
  for (int t = 0; t < 40; ++t) {
    const int d = 1 + t % 2;
    const IntMatrix m = d == 1 ? (t % 3 ? two : mat({{3}})) : (t % 4 == 1 ? quincunx : 2 * identity_matrix(2));
    const FilterSeq bb = random_filter(rng, d, 2, 3, 3, true);
    const FilterSeq u = random_filter(rng, d, 1, 3, 3, true);
    CHECK(max_abs_diff(transition(bb, m, u), transition_oracle(bb, m, u, 8)) < 1e-13);
  }
}

TEST_CASE("subdivision and transition are adjoint") {
  std::mt19937 rng(9);
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + t % 2;
    const IntMatrix m = d == 1 ? two : (t % 4 == 1 ? quincunx : 2 * identity_matrix(2));
    const FilterSeq a = random_filter(rng, d, 2, 3, 3, true);
    const FilterSeq v = random_filter(rng, d, 1, 2, 3, true);
    const FilterSeq w = random_filter(rng, d, 1, 3, 4, true);
    // both sides by direct summation over the kernel oracles
    const cd lhs = inner(subdivision_oracle(a, m, v), w)(0, 0);
    const cd rhs = inner(v, transition_oracle(a, m, w, 10))(0, 0);
    CHECK(std::abs(lhs - rhs) < 1e-12);
    CHECK(std::abs(inner(subdivision(a, m, v), w)(0, 0) - inner(v, transition(a, m, w))(0, 0)) < 1e-12);
  }
}

TEST_CASE("composition of subdivision and transition operators") {
  std::mt19937 rng(10);
  for (int t = 0; t < 40; ++t) {
    const int d = 1 + t % 2;
    const IntMatrix m1 = d == 1 ? two : quincunx;
    const IntMatrix m2 = d == 1 ? mat({{3}}) : 2 * identity_matrix(2);
    const bool exact = t % 2 == 0;
    const FilterSeq u1 = exact ? random_exact_filter(rng, d, 2, 2) : random_filter(rng, d, 2, 2);
    const FilterSeq u2 = exact ? random_exact_filter(rng, d, 2, 2) : random_filter(rng, d, 2, 2);
    const FilterSeq v = exact ? random_exact_filter(rng, d, 1, 2) : random_filter(rng, d, 1, 2);
    const IntMatrix m12 = int_product(m1, m2);
    const FilterSeq composed = convolve(upsample(u2, m1), u1);
    const FilterSeq lhs_s = subdivision(u1, m1, subdivision(u2, m2, v));
    const FilterSeq rhs_s = subdivision(composed, m12, v);
    const FilterSeq lhs_t = transition(u2, m2, transition(u1, m1, v));
    const FilterSeq rhs_t = transition(composed, m12, v);
    if (exact) {
      REQUIRE(lhs_s.is_exact());
      CHECK(*exact_equal(lhs_s, rhs_s));
      CHECK(*exact_equal(lhs_t, rhs_t));
    } else {
      CHECK(max_abs_diff(lhs_s, rhs_s) < 1e-12);
      CHECK(max_abs_diff(lhs_t, rhs_t) < 1e-12);
    }
  }
}

TEST_CASE("Fourier identities of subdivision and transition") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> ang(-4.0, 4.0);
  const std::vector<IntMatrix> dils = {two, mat({{3}}), quincunx, 2 * identity_matrix(2), mat({{1, -2}, {2, 1}})};
  for (int t = 0; t < 64; ++t) {
    const IntMatrix m = dils[t % dils.size()];
    const int d = static_cast<int>(m.rows());
    const DilationMatrix dm(m);
    const FilterSeq a = random_filter(rng, d, 2, 2, 3, true);
    const FilterSeq u = random_filter(rng, d, 1, 2, 3, true);
    Eigen::VectorXd xi(d);
    for (int i = 0; i < d; ++i) xi(i) = ang(rng);
    const double s = std::sqrt(static_cast<double>(dm.det_abs()));
    const Eigen::VectorXd mt_xi = m.cast<double>().transpose() * xi;
    const Eigen::MatrixXcd lhs = symbol(subdivision(a, m, u), xi);
    const Eigen::MatrixXcd rhs = s * symbol(u, mt_xi) * symbol(a, xi);
    CHECK(max_abs(lhs - rhs) < 1e-10);

    // transition: |det M|^{-1/2} sum_omega u^(M^{-T} xi + 2 pi omega) conj(b^(...))^T
    const Eigen::MatrixXd minv_t = m.cast<double>().transpose().inverse();
    Eigen::MatrixXcd tr = Eigen::MatrixXcd::Zero(1, 2);
    for (const auto& w : coset_reps(dm).reps) {
      Eigen::VectorXd eta = minv_t * xi;
      for (int i = 0; i < d; ++i) eta(i) += 2 * std::numbers::pi * w[i].to_double();
      tr += symbol(u, eta) * symbol(a, eta).adjoint();
    }
    tr /= s;
    CHECK(max_abs(symbol(transition(a, m, u), xi) - tr) < 1e-10);
  }
}

TEST_CASE("convolution is associative, star is an involution") {
  std::mt19937 rng(13);
  for (int t = 0; t < 30; ++t) {
    const int d = 1 + t % 2;
    const FilterSeq a = random_filter(rng, d, 1, 2, 3, true);
    const FilterSeq b = random_filter(rng, d, 2, 2, 3, true);
    const FilterSeq c = random_filter(rng, d, 2, 1, 3, true);
    CHECK(max_abs_diff(convolve(convolve(a, b), c), convolve(a, convolve(b, c))) < 1e-12);
    CHECK(star(star(b)) == b);
  }
}

TEST_CASE("empty results normalize to the canonical empty box") {
  const FilterSeq z = subtract(taps(3, {1, 2}), taps(3, {1, 2}));
  CHECK(z.empty());
  CHECK(z.offset() == vec({0}));
  CHECK(convolve(z, taps(0, {1})).empty());
}
