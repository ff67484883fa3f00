#include "mixdil/das.hpp"

#include <random>
#include <stdexcept>

#include "mixdil/errors.hpp"
#include "tally.hpp"

namespace mixdil {
namespace {

using detail::fmt;
using detail::Tally;

const FilterSeq& pick(const Channel& c, Side side) { return side == Side::primal ? c.primal : c.dual; }

void check_index(const FilterBank& bank, int l, int j) {
  if (l < 0 || l > bank.wavelets()) throw std::out_of_range("channel " + std::to_string(l) + " does not exist");
  if (j < 0 || (j == 0 && l != 0)) throw std::out_of_range("level " + std::to_string(j) + " is not valid here");
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("integer overflow");
  return out;
}

// Produces b_{l,j;k} for many k from one composed filter.
struct ElementMaker {
  FilterSeq scaled;
  IntMatrix shift_matrix;

  ElementMaker(const FilterBank& bank, int l, int j, Side side)
      : shift_matrix(das_shift_matrix(bank, l, j)) {
    const FilterSeq f = das_filter(bank, l, j, side);
    if (j == 0) {
      scaled = f;
      return;
    }
    std::int64_t factor = bank.channel(l).dilation.det_abs();
    for (int i = 1; i < j; ++i) factor = checked_mul(factor, bank.lowpass().dilation.det_abs());
    scaled = scale(f, RadicalSum::sqrt_of(factor));
  }

  FilterSeq operator()(const IntVector& k) const { return shift(scaled, int_apply(shift_matrix, k)); }

  IntVector lo() const { return scaled.offset(); }
  IntVector hi() const { return scaled.offset() + scaled.shape() - IntVector::Ones(scaled.dim()); }
};

// Rows of `band` at k as a sequence supported at the origin.
FilterSeq slice_at(const FilterSeq& band, const IntVector& k) {
  const IntVector zero = IntVector::Zero(band.dim()), one = IntVector::Ones(band.dim());
  if (band.is_exact()) {
    ExactSeq s(zero, one, band.rows(), band.cols());
    for (int i = 0; i < band.rows(); ++i)
      for (int j = 0; j < band.cols(); ++j) s.at(zero, i, j) = band.exact()->value(k, i, j);
    return FilterSeq(s);
  }
  FloatSeq s(zero, one, band.rows(), band.cols());
  for (int i = 0; i < band.rows(); ++i)
    for (int j = 0; j < band.cols(); ++j) s.at(zero, i, j) = band.value(k, i, j);
  return FilterSeq(s);
}

// Exact-or-float scalar accumulator.
struct Accum {
  bool exact = true;
  RadicalSum e;
  cd f = 0.0;
};

// sum_i a(0,i) c(i,0) for inner-product matrices a (1 x q) and c (q x 1).
void accumulate(Accum& acc, const FilterSeq& v, const FilterSeq& elem, const FilterSeq& dual_elem, const FilterSeq& w) {
  const Eigen::MatrixXcd a = inner(v, elem);
  const Eigen::MatrixXcd c = inner(dual_elem, w);
  acc.f += (a * c)(0, 0);
  if (!acc.exact) return;
  const auto ae = inner_exact(v, elem);
  const auto ce = inner_exact(dual_elem, w);
  if (!ae || !ce) {
    acc.exact = false;
    return;
  }
  try {
    for (std::size_t i = 0; i < ae->size(); ++i) acc.e = acc.e + (*ae)[i] * (*ce)[i];
  } catch (const std::overflow_error&) {
    acc.exact = false;
  }
}

// sum_k <v, b_{l,j;k}> <b~_{l,j;k}, w>
void pairing_sum(Accum& acc, const FilterBank& bank, int l, int j, const FilterSeq& v, const FilterSeq& w) {
  if (v.empty() || w.empty()) return;
  const ElementMaker primal(bank, l, j, Side::primal), dual(bank, l, j, Side::dual);
  if (primal.scaled.empty()) return;
  const IntVector vhi = v.offset() + v.shape() - IntVector::Ones(v.dim());
  const auto [klo, khi] = shift_range(primal.shift_matrix, v.offset() - primal.hi(), vhi - primal.lo());
  if ((khi.array() < klo.array()).any()) return;
  for_each_point(klo, khi - klo + IntVector::Ones(v.dim()),
                 [&](const IntVector& k) { accumulate(acc, v, primal(k), dual(k), w); });
}

FilterSeq random_input(std::mt19937_64& rng, int dim, int r, bool exact) {
  std::uniform_int_distribution<int> off(-6, 6), ext(1, 6), ival(-3, 3);
  std::uniform_real_distribution<double> fval(-1.0, 1.0);
  IntVector o(dim), s(dim);
  for (int i = 0; i < dim; ++i) {
    o(i) = off(rng);
    s(i) = ext(rng);
  }
  if (exact) {
    ExactSeq e(o, s, 1, r);
    for (auto& x : e.data()) x = RadicalSum(static_cast<std::int64_t>(ival(rng)));
    return FilterSeq(e.trim());
  }
  FloatSeq f(o, s, 1, r);
  for (auto& x : f.data()) x = fval(rng);
  return FilterSeq(f);
}

bool bank_is_exact(const FilterBank& bank) {
  for (const auto& c : bank.channels())
    if (!c.primal.is_exact() || !c.dual.is_exact()) return false;
  return true;
}

}  // namespace

IntMatrix das_shift_matrix(const FilterBank& bank, int l, int j) {
  check_index(bank, l, j);
  if (j == 0) return identity_matrix(bank.dim());
  return int_product(int_power(bank.lowpass().dilation.matrix(), j - 1), bank.channel(l).dilation.matrix());
}

FilterSeq das_filter(const FilterBank& bank, int l, int j, Side side) {
  check_index(bank, l, j);
  const int r = bank.multiplicity();
  const IntMatrix& m0 = bank.lowpass().dilation.matrix();
  FilterSeq low = FilterSeq::delta(IntVector::Zero(bank.dim()), r, r);
  // b_{0,i} for i = 1 .. j-1
  for (int i = 1; i < j; ++i) low = convolve(upsample(pick(bank.lowpass(), side), int_power(m0, i - 1)), low);
  if (j == 0) return low;
  return convolve(upsample(pick(bank.channel(l), side), int_power(m0, j - 1)), low);
}

DasElement das_element(const FilterBank& bank, int l, int j, const IntVector& k, Side side) {
  const ElementMaker make(bank, l, j, side);
  return {l, j, k, make(k)};
}

std::pair<IntVector, IntVector> shift_range(const IntMatrix& s, const IntVector& x_lo, const IntVector& x_hi) {
  const int d = static_cast<int>(s.rows());
  const std::int64_t det = int_det(s);
  const IntMatrix adj = adjugate(s);
  IntVector lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    // extremes of the linear form adj.row(i) x over the box
    std::int64_t mn = 0, mx = 0;
    for (int c = 0; c < d; ++c) {
      const std::int64_t a = adj(i, c) * x_lo(c), b = adj(i, c) * x_hi(c);
      mn += std::min(a, b);
      mx += std::max(a, b);
    }
    const std::int64_t p = det > 0 ? mn : mx, q = det > 0 ? mx : mn;
    const Rational rl(p, det), rh(q, det);
    lo(i) = rl.is_integer() ? rl.num() : rl.floor() + 1;
    hi(i) = rh.floor();
  }
  return {lo, hi};
}

FilterSeq das_combination(const FilterBank& bank, int l, int j, const FilterSeq& band, Side side) {
  const ElementMaker make(bank, l, j, side);
  if (band.cols() != make.scaled.rows()) throw ShapeMismatch("band width differs from element rows");
  FilterSeq out = FilterSeq::zero(bank.dim(), band.rows(), make.scaled.cols());
  band.values().for_each([&](const IntVector& k, const cd*) { out = add(out, convolve(slice_at(band, k), make(k))); });
  return out;
}

FilterSeq das_coefficients(const FilterBank& bank, int l, int j, const FilterSeq& v) {
  const ElementMaker primal(bank, l, j, Side::primal);
  const int q = primal.scaled.rows();
  const int d = bank.dim();
  if (v.empty() || primal.scaled.empty()) return FilterSeq::zero(d, v.rows(), q);
  const IntVector vhi = v.offset() + v.shape() - IntVector::Ones(d);
  const auto [klo, khi] = shift_range(primal.shift_matrix, v.offset() - primal.hi(), vhi - primal.lo());
  if ((khi.array() < klo.array()).any()) return FilterSeq::zero(d, v.rows(), q);
  const IntVector shape = khi - klo + IntVector::Ones(d);
  ExactSeq ex(klo, shape, v.rows(), q);
  FloatSeq fl(klo, shape, v.rows(), q);
  bool exact = v.is_exact() && primal.scaled.is_exact();
  for_each_point(klo, shape, [&](const IntVector& k) {
    const FilterSeq e = primal(k);
    const Eigen::MatrixXcd m = inner(v, e);
    for (int i = 0; i < v.rows(); ++i)
      for (int t = 0; t < q; ++t) fl.at(k, i, t) = m(i, t);
    if (!exact) return;
    const auto me = inner_exact(v, e);
    if (!me) {
      exact = false;
      return;
    }
    for (int i = 0; i < v.rows(); ++i)
      for (int t = 0; t < q; ++t) ex.at(k, i, t) = (*me)[i * q + t];
  });
  return exact ? FilterSeq(ex.trim()) : FilterSeq(fl.trim());
}

VerificationReport check_cascade(const FilterBank& bank, int j, int trials, std::uint64_t seed, double tol) {
  if (j < 1) throw std::out_of_range("cascade level must be at least 1");
  std::mt19937_64 rng(seed);
  const bool exact = bank_is_exact(bank);
  Tally tally("cascade_structure", tol);
  for (int t = 0; t < trials; ++t) {
    const FilterSeq v = random_input(rng, bank.dim(), bank.multiplicity(), exact);
    const FilterSeq w = random_input(rng, bank.dim(), bank.multiplicity(), exact);
    Accum lhs, rhs;
    pairing_sum(lhs, bank, 0, j - 1, v, w);
    for (int l = 0; l <= bank.wavelets(); ++l) pairing_sum(rhs, bank, l, j, v, w);
    const std::string where = "trial " + std::to_string(t);
    const double res = std::abs(lhs.f - rhs.f);
    if (lhs.exact && rhs.exact) {
      tally.record(res, !(lhs.e == rhs.e), where, cd(lhs.e.to_double()), cd(rhs.e.to_double()));
    } else {
      tally.set_floating();
      tally.record(res, res > tol, where, lhs.f, rhs.f);
    }
  }
  return tally.finish();
}

VerificationReport check_frame_expansion(const FilterBank& bank, int levels, int trials, std::uint64_t seed,
                                         double tol) {
  if (levels < 1) throw std::out_of_range("level count must be at least 1");
  std::mt19937_64 rng(seed);
  const bool exact = bank_is_exact(bank);
  Tally tally("frame_expansion", tol);
  if (!exact) tally.set_floating();
  for (int t = 0; t <= trials; ++t) {
    // trial 0 is the zero vector
    const FilterSeq v = t == 0 ? FilterSeq::zero(bank.dim(), 1, bank.multiplicity())
                               : random_input(rng, bank.dim(), bank.multiplicity(), exact);
    FilterSeq recon = das_combination(bank, 0, levels, das_coefficients(bank, 0, levels, v), Side::dual);
    for (int j = 1; j <= levels; ++j)
      for (int l = 1; l <= bank.wavelets(); ++l)
        recon = add(recon, das_combination(bank, l, j, das_coefficients(bank, l, j, v), Side::dual));
    tally.compare(recon, v, "trial " + std::to_string(t));
  }
  return tally.finish();
}

VerificationReport check_das_biorthogonality(const FilterBank& bank, int levels, int window, double tol) {
  if (levels < 1) throw std::out_of_range("level count must be at least 1");
  const int d = bank.dim();
  struct Kind {
    int l, j;
  };
  std::vector<Kind> kinds;
  for (int j = 1; j <= levels; ++j)
    for (int l = 1; l <= bank.wavelets(); ++l) kinds.push_back({l, j});
  kinds.push_back({0, levels});

  std::vector<ElementMaker> primal, dual;
  for (const Kind& k : kinds) {
    primal.emplace_back(bank, k.l, k.j, Side::primal);
    dual.emplace_back(bank, k.l, k.j, Side::dual);
  }
  const bool exact = bank_is_exact(bank);
  Tally tally("das_biorthogonality", tol);
  if (!exact) tally.set_floating();
  const IntVector wlo = IntVector::Constant(d, -window), wshape = IntVector::Constant(d, 2 * window + 1);
  for (std::size_t a = 0; a < kinds.size(); ++a) {
    for_each_point(wlo, wshape, [&](const IntVector& k) {
      const FilterSeq e = primal[a](k);
      const IntVector elo = e.offset(), ehi = e.offset() + e.shape() - IntVector::Ones(d);
      for (std::size_t b = 0; b < kinds.size(); ++b) {
        std::vector<IntVector> partners;
        if (b == a) partners.push_back(k);
        if (!e.empty() && !dual[b].scaled.empty()) {
          const auto [lo, hi] = shift_range(dual[b].shift_matrix, elo - dual[b].hi(), ehi - dual[b].lo());
          if (!(hi.array() < lo.array()).any())
            for_each_point(lo, hi - lo + IntVector::Ones(d), [&](const IntVector& kp) {
              if (!(b == a && kp == k)) partners.push_back(kp);
            });
        }
        for (const IntVector& kp : partners) {
          const FilterSeq ed = dual[b](kp);
          const bool diag = b == a && kp == k;
          const int rows = ed.rows(), cols = e.rows();
          const Eigen::MatrixXcd g = inner(ed, e);
          const auto ge = inner_exact(ed, e);
          if (!ge) tally.set_floating();
          const std::string where = "dual (l=" + std::to_string(kinds[b].l) + ",j=" + std::to_string(kinds[b].j) +
                                    ",k=" + fmt(kp) + ") vs primal (l=" + std::to_string(kinds[a].l) +
                                    ",j=" + std::to_string(kinds[a].j) + ",k=" + fmt(k) + ")";
          for (int i = 0; i < rows; ++i)
            for (int c = 0; c < cols; ++c) {
              const double want = diag && i == c ? 1.0 : 0.0;
              const double res = std::abs(g(i, c) - want);
              const bool bad = ge ? !((*ge)[i * cols + c] == RadicalSum(static_cast<std::int64_t>(want)))
                                  : res > tol;
              tally.record(res, bad, where + " entry (" + std::to_string(i) + "," + std::to_string(c) + ")",
                           cd(want), g(i, c));
            }
        }
      }
    });
  }
  return tally.finish();
}

}  // namespace mixdil
