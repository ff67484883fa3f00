#include <cmath>
#include <random>

#include "doctest.h"
#include "mixdil/das.hpp"
#include "mixdil/errors.hpp"
#include "test_support.hpp"

using namespace mixdil;
using namespace mixdil::testing;

namespace {

FilterBank float_copy(const FilterBank& b) {
  std::vector<Channel> ch = b.channels();
  for (auto& c : ch) {
    c.primal = c.primal.without_exact();
    c.dual = c.dual.without_exact();
  }
  return FilterBank(b.name(), b.dim(), b.multiplicity(), ch);
}

FilterBank corrupted_haar() {
  std::vector<Channel> ch = builtin("haar").channels();
  ch[1].primal = exact_taps(0, {1, 1}, 2);
  return FilterBank("haar-bad", 1, 1, ch);
}

FilterSeq random_signal(std::mt19937& rng, int dim, int extent) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  FloatSeq s(IntVector::Constant(dim, -extent / 2), IntVector::Constant(dim, extent), 1, 1);
  for (auto& x : s.data()) x = val(rng);
  return FilterSeq(s);
}

}  // namespace

TEST_CASE("composed filters") {
  const FilterBank haar = builtin("haar");
  const FilterSeq b02 = das_filter(haar, 0, 2);
  CHECK(*exact_equal(b02, exact_taps(0, {1, 1, 1, 1}, 4)));
  CHECK(*exact_equal(das_filter(haar, 0, 0), FilterSeq::delta(vec({0}), 1, 1)));
  CHECK(*exact_equal(das_filter(haar, 1, 1), haar.channel(1).primal));
  CHECK_THROWS_AS(das_filter(haar, 2, 1), std::out_of_range);
  CHECK_THROWS_AS(das_filter(haar, 1, 0), std::out_of_range);
}

TEST_CASE("composed filter symbols factor") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  for (const auto& name : builtin_names()) {
    const FilterBank b = builtin(name);
    const Eigen::MatrixXd m0t = b.lowpass().dilation.matrix().cast<double>().transpose();
    for (int l = 0; l <= b.wavelets(); ++l)
      for (int j = 1; j <= 3; ++j) {
        Eigen::VectorXd xi(b.dim());
        for (int i = 0; i < b.dim(); ++i) xi(i) = ang(rng);
        // b_l((M0^T)^{j-1} xi) b_0((M0^T)^{j-2} xi) ... b_0(xi)
        std::vector<Eigen::VectorXd> powers = {xi};
        for (int i = 1; i < j; ++i) powers.push_back(m0t * powers.back());
        Eigen::MatrixXcd want = symbol(b.channel(l).primal, powers[j - 1]);
        for (int i = j - 2; i >= 0; --i) want = want * symbol(b.lowpass().primal, powers[i]);
        CHECK(max_abs(symbol(das_filter(b, l, j), xi) - want) < 1e-12);
      }
  }
}

TEST_CASE("elements") {
  const FilterBank haar = builtin("haar");
  const DasElement e = das_element(haar, 0, 1, vec({1}));
  CHECK(*exact_equal(e.seq, exact_taps(2, {1, 1}, 2, 2)));
  const DasElement w = das_element(haar, 1, 2, vec({0}));
  CHECK(*exact_equal(w.seq, exact_taps(0, {1, 1, -1, -1}, 2)));
  for (int l = 0; l <= 1; ++l)
    for (int j = 1; j <= 4; ++j)
      for (int k = -3; k <= 3; ++k) {
        const auto n = inner_exact(das_element(haar, l, j, vec({k})).seq, das_element(haar, l, j, vec({k})).seq);
        REQUIRE(n);
        CHECK((*n)[0] == RadicalSum(1));
      }
  CHECK(*exact_equal(das_element(haar, 0, 0, vec({3})).seq, FilterSeq::delta(vec({3}), 1, 1)));
}

TEST_CASE("elements expand through level-one elements") {
  for (const auto& name : builtin_names()) {
    const FilterBank b = builtin(name);
    const IntVector k = IntVector::Constant(b.dim(), 1);
    for (int l = 0; l <= b.wavelets(); ++l)
      for (int j = 1; j <= 3; ++j) {
        const FilterSeq lhs = das_element(b, l, j, k).seq;
        // sum_m b_{l,1;k}(m) b_{0,j-1;m}
        const FilterSeq rhs = das_combination(b, 0, j - 1, das_element(b, l, 1, k).seq);
        REQUIRE(lhs.is_exact());
        CHECK(*exact_equal(lhs, rhs));
      }
  }
}

TEST_CASE("shift range covers exactly the feasible shifts") {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> e(-3, 3);
  for (int t = 0; t < 40; ++t) {
    IntMatrix s(2, 2);
    do {
      for (int i = 0; i < 4; ++i) s(i / 2, i % 2) = e(rng);
    } while (int_det(s) == 0);
    const IntVector lo = vec({e(rng), e(rng)});
    const IntVector hi = lo + vec({std::abs(e(rng)), std::abs(e(rng))});
    const auto [klo, khi] = shift_range(s, lo, hi);
    for (int a = -30; a <= 30; ++a)
      for (int b = -30; b <= 30; ++b) {
        const IntVector k = vec({a, b});
        const IntVector x = int_apply(s, k);
        if ((x.array() >= lo.array()).all() && (x.array() <= hi.array()).all()) {
          CHECK((k.array() >= klo.array()).all());
          CHECK((k.array() <= khi.array()).all());
        }
      }
  }
}

TEST_CASE("analysis coefficients are pairings with elements") {
  std::mt19937 rng(43);
  for (const auto& name : builtin_names()) {
    const FilterBank b = builtin(name);
    const FilterSeq v = random_signal(rng, b.dim(), b.dim() == 1 ? 12 : 6);
    const Pyramid p = analyze(b, v, 3);
    const int reach = b.dim() == 1 ? 8 : 3;
    for (int j = 1; j <= 3; ++j)
      for (int l = 0; l <= b.wavelets(); ++l) {
        if (l == 0 && j != 3) continue;
        const FilterSeq& band = l == 0 ? p.approx : p.band(l, j);
        double worst = 0.0;
        for_each_point(IntVector::Constant(b.dim(), -reach), IntVector::Constant(b.dim(), 2 * reach + 1),
                       [&](const IntVector& k) {
                         const Eigen::MatrixXcd g = inner(v, das_element(b, l, j, k).seq);
                         for (int c = 0; c < g.cols(); ++c)
                           worst = std::max(worst, std::abs(g(0, c) - band.value(k, 0, c)));
                       });
        CHECK(worst < 1e-12);
        CHECK(max_abs_diff(das_coefficients(b, l, j, v), band) < 1e-12);
      }
  }
}

TEST_CASE("single-band synthesis is a combination of elements") {
  std::mt19937 rng(44);
  for (const auto& name : builtin_names()) {
    const FilterBank b = builtin(name);
    for (int levels = 1; levels <= 3; ++levels) {
      Pyramid p = analyze(b, FilterSeq::zero(b.dim(), 1, 1), levels);
      p.approx = random_signal(rng, b.dim(), 4);
      const FilterSeq lhs = synthesize(b, p, Side::primal);
      CHECK(max_abs_diff(lhs, das_combination(b, 0, levels, p.approx)) < 1e-12);
      // a single wavelet band as well
      Pyramid q = analyze(b, FilterSeq::zero(b.dim(), 1, 1), levels);
      q.band(1, levels) = random_signal(rng, b.dim(), 4);
      CHECK(max_abs_diff(synthesize(b, q, Side::primal), das_combination(b, 1, levels, q.band(1, levels))) < 1e-12);
    }
  }
}

TEST_CASE("cascade structure") {
  for (int j = 1; j <= 3; ++j) {
    const VerificationReport r = check_cascade(builtin("haar"), j, 5);
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.max_residual == 0.0);
  }
  CHECK(check_cascade(corrupted_haar(), 1, 5).verdict == Verdict::fail);
  CHECK(check_cascade(builtin("bspline-tf"), 3, 5).verdict == Verdict::pass);
  const VerificationReport f = check_cascade(float_copy(builtin("bspline-tf")), 3, 5);
  CHECK(f.verdict == Verdict::pass_numeric);
  CHECK(f.max_residual < 1e-12);
  for (const auto& name : builtin_names()) CHECK(check_cascade(builtin(name), 2, 3).verdict == Verdict::pass);
}

TEST_CASE("frame expansion") {
  CHECK(check_frame_expansion(builtin("haar"), 3, 4).verdict == Verdict::pass);
  CHECK(check_frame_expansion(builtin("bspline-tf"), 2, 3).verdict == Verdict::pass);
  CHECK(check_frame_expansion(float_copy(builtin("haar-split4")), 2, 3).verdict == Verdict::pass_numeric);
  CHECK(check_frame_expansion(corrupted_haar(), 2, 3).verdict == Verdict::fail);
}

TEST_CASE("DAS biorthogonality") {
  CHECK(check_das_biorthogonality(builtin("haar"), 2, 3).verdict == Verdict::pass);
  CHECK(check_das_biorthogonality(builtin("haar-split4"), 2, 3).verdict == Verdict::pass);
  CHECK(check_das_biorthogonality(builtin("haar2d"), 2, 1).verdict == Verdict::pass);
  const VerificationReport tf = check_das_biorthogonality(builtin("bspline-tf"), 1, 2);
  CHECK(tf.verdict == Verdict::fail);
  CHECK_FALSE(tf.witnesses.empty());
  // a larger window keeps the verdicts
  CHECK(check_das_biorthogonality(builtin("haar-split4"), 2, 6).verdict == Verdict::pass);
  CHECK(check_das_biorthogonality(builtin("bspline-tf"), 1, 5).verdict == Verdict::fail);
  CHECK(check_das_biorthogonality(float_copy(builtin("haar")), 2, 2).verdict == Verdict::pass_numeric);
}
