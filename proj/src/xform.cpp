#include "mixdil/xform.hpp"

#include <cmath>

#include "mixdil/errors.hpp"

namespace mixdil {
namespace {

const FilterSeq& pick(const Channel& c, Side side) { return side == Side::primal ? c.primal : c.dual; }

double root_det(const IntMatrix& m) { return std::sqrt(std::abs(static_cast<double>(int_det(m)))); }

void check_input(const FilterBank& bank, int dim, int cols, int levels) {
  if (dim != bank.dim()) throw ShapeMismatch("input dimension differs from bank dimension");
  if (cols != bank.multiplicity()) throw ShapeMismatch("input must have r columns");
  if (levels < 0) throw ShapeMismatch("level count must be nonnegative");
}

std::string where(int j, int l) { return "level " + std::to_string(j) + ", channel " + std::to_string(l); }

Lattice coarse_period_at(const IntMatrix& m, const Lattice& p, int j, int l) {
  try {
    return coarse_period(m, p);
  } catch (const PeriodNotDivisible& e) {
    throw PeriodNotDivisible(where(j, l) + ": " + e.what());
  }
}

}  // namespace

PeriodicArray::PeriodicArray(const Lattice& period, int rows, int cols)
    : box_(period), rows_(rows), cols_(cols), data_(static_cast<std::size_t>(box_.size()) * rows * cols) {}

PeriodicArray::PeriodicArray(const IntVector& period, int rows, int cols)
    : PeriodicArray(diagonal_lattice(period), rows, cols) {}

Lattice diagonal_lattice(const IntVector& period) {
  for (Eigen::Index i = 0; i < period.size(); ++i)
    if (period(i) < 1) throw PeriodNotDivisible("period entries must be positive");
  return Lattice(IntMatrix(period.asDiagonal()));
}

PeriodicArray periodize(const FilterSeq& u, const Lattice& period) {
  PeriodicArray out(period, u.rows(), u.cols());
  u.values().for_each([&](const IntVector& k, const cd* m) {
    const std::int64_t site = out.box().linear_of(k);
    for (int i = 0; i < u.rows(); ++i)
      for (int j = 0; j < u.cols(); ++j) out.at(site, i, j) += m[i * u.cols() + j];
  });
  return out;
}

double max_abs_diff(const PeriodicArray& a, const PeriodicArray& b) {
  if (!(a.period() == b.period()) || a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeMismatch("periodic arrays differ in layout");
  double out = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) out = std::max(out, std::abs(a.data()[i] - b.data()[i]));
  return out;
}

Lattice coarse_period(const IntMatrix& m, const Lattice& period) {
  if (m.rows() != period.dim()) throw DimensionMismatch("dilation and period dimensions differ");
  const std::int64_t det = int_det(m);
  const IntMatrix prod = int_product(adjugate(m), period.basis());
  IntMatrix out(prod.rows(), prod.cols());
  for (Eigen::Index i = 0; i < prod.rows(); ++i)
    for (Eigen::Index j = 0; j < prod.cols(); ++j) {
      if (prod(i, j) % det != 0) throw PeriodNotDivisible("M^{-1} P is not an integer lattice");
      out(i, j) = prod(i, j) / det;
    }
  return Lattice(out);
}

PeriodicArray transition(const FilterSeq& b, const IntMatrix& m, const PeriodicArray& u) {
  if (u.cols() != b.cols()) throw ShapeMismatch("transition: u.cols must equal b.cols");
  PeriodicArray out(coarse_period(m, u.period()), u.rows(), b.rows());
  const double s = root_det(m);
  const ResidueBox& in_box = u.box();
  for (std::int64_t site = 0; site < out.sites(); ++site) {
    const IntVector mn = int_apply(m, out.box().point(site));
    b.values().for_each([&](const IntVector& k, const cd* bk) {
      const std::int64_t src = in_box.linear_of(k + mn);
      for (int i = 0; i < u.rows(); ++i)
        for (int j = 0; j < b.rows(); ++j) {
          cd acc = 0.0;
          for (int t = 0; t < u.cols(); ++t) acc += u.at(src, i, t) * std::conj(bk[j * b.cols() + t]);
          out.at(site, i, j) += s * acc;
        }
    });
  }
  return out;
}

PeriodicArray subdivision(const FilterSeq& a, const IntMatrix& m, const PeriodicArray& u) {
  if (u.cols() != a.rows()) throw ShapeMismatch("subdivision: u.cols must equal a.rows");
  PeriodicArray out(Lattice(int_product(m, u.period().basis())), u.rows(), a.cols());
  const double s = root_det(m);
  for (std::int64_t site = 0; site < u.sites(); ++site) {
    const IntVector mk = int_apply(m, u.box().point(site));
    a.values().for_each([&](const IntVector& k, const cd* ak) {
      const std::int64_t dst = out.box().linear_of(mk + k);
      for (int i = 0; i < u.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
          cd acc = 0.0;
          for (int t = 0; t < u.cols(); ++t) acc += u.at(site, i, t) * ak[t * a.cols() + j];
          out.at(dst, i, j) += s * acc;
        }
    });
  }
  return out;
}

Pyramid analyze(const FilterBank& bank, const FilterSeq& v, int levels, Side side) {
  check_input(bank, v.dim(), v.cols(), levels);
  Pyramid pyr;
  pyr.bank_name = bank.name();
  pyr.levels = levels;
  pyr.detail.resize(bank.wavelets());
  FilterSeq cur = v;
  for (int j = 1; j <= levels; ++j) {
    for (int l = 1; l <= bank.wavelets(); ++l) {
      const Channel& c = bank.channel(l);
      pyr.detail[l - 1].push_back(transition(pick(c, side), c.dilation, cur));
    }
    cur = transition(pick(bank.lowpass(), side), bank.lowpass().dilation, cur);
  }
  pyr.approx = std::move(cur);
  return pyr;
}

FilterSeq synthesize(const FilterBank& bank, const Pyramid& pyr, Side side) {
  if (pyr.wavelets() != bank.wavelets()) throw ShapeMismatch("pyramid channel count differs from bank");
  FilterSeq cur = pyr.approx;
  for (int j = pyr.levels; j >= 1; --j) {
    FilterSeq next = subdivision(pick(bank.lowpass(), side), bank.lowpass().dilation, cur);
    for (int l = 1; l <= bank.wavelets(); ++l) {
      const Channel& c = bank.channel(l);
      next = add(next, subdivision(pick(c, side), c.dilation, pyr.band(l, j)));
    }
    cur = std::move(next);
  }
  return cur;
}

CoefficientPyramid<Lattice> band_periods(const FilterBank& bank, const Lattice& period, int levels) {
  if (period.dim() != bank.dim()) throw ShapeMismatch("period dimension differs from bank dimension");
  CoefficientPyramid<Lattice> out{bank.name(), levels, std::vector<std::vector<Lattice>>(bank.wavelets()), period};
  Lattice cur = period;
  for (int j = 1; j <= levels; ++j) {
    for (int l = 1; l <= bank.wavelets(); ++l)
      out.detail[l - 1].push_back(coarse_period_at(bank.channel(l).dilation, cur, j, l));
    cur = coarse_period_at(bank.lowpass().dilation, cur, j, 0);
  }
  out.approx = cur;
  return out;
}

PeriodicPyramid analyze_periodic(const FilterBank& bank, const PeriodicArray& v, int levels, Side side) {
  check_input(bank, v.dim(), v.cols(), levels);
  band_periods(bank, v.period(), levels);  // admissibility first, with level context
  PeriodicPyramid pyr{bank.name(), levels, std::vector<std::vector<PeriodicArray>>(bank.wavelets()), v};
  PeriodicArray cur = v;
  for (int j = 1; j <= levels; ++j) {
    for (int l = 1; l <= bank.wavelets(); ++l) {
      const Channel& c = bank.channel(l);
      pyr.detail[l - 1].push_back(transition(pick(c, side), c.dilation, cur));
    }
    cur = transition(pick(bank.lowpass(), side), bank.lowpass().dilation, cur);
  }
  pyr.approx = std::move(cur);
  return pyr;
}

PeriodicArray synthesize_periodic(const FilterBank& bank, const PeriodicPyramid& pyr, Side side) {
  if (pyr.wavelets() != bank.wavelets()) throw ShapeMismatch("pyramid channel count differs from bank");
  PeriodicArray cur = pyr.approx;
  for (int j = pyr.levels; j >= 1; --j) {
    PeriodicArray next = subdivision(pick(bank.lowpass(), side), bank.lowpass().dilation, cur);
    for (int l = 1; l <= bank.wavelets(); ++l) {
      const Channel& c = bank.channel(l);
      const PeriodicArray part = subdivision(pick(c, side), c.dilation, pyr.band(l, j));
      if (!(part.period() == next.period())) throw ShapeMismatch(where(j, l) + ": band period is inconsistent");
      for (std::size_t i = 0; i < next.data().size(); ++i) next.data()[i] += part.data()[i];
    }
    cur = std::move(next);
  }
  return cur;
}

int max_levels(const FilterBank& bank, const Lattice& period) {
  int levels = 0;
  Lattice cur = period;
  while (true) {
    try {
      for (int l = 1; l <= bank.wavelets(); ++l) coarse_period(bank.channel(l).dilation, cur);
      cur = coarse_period(bank.lowpass().dilation, cur);
    } catch (const PeriodNotDivisible&) {
      return levels;
    }
    ++levels;
  }
}

int max_levels(const FilterBank& bank, const IntVector& period) { return max_levels(bank, diagonal_lattice(period)); }

std::int64_t coefficient_count(const PeriodicPyramid& pyr) {
  auto n = [](const PeriodicArray& a) { return a.sites() * a.rows() * a.cols(); };
  std::int64_t total = n(pyr.approx);
  for (const auto& ch : pyr.detail)
    for (const auto& b : ch) total += n(b);
  return total;
}

Eigen::VectorXcd flatten(const PeriodicArray& a) {
  return Eigen::Map<const Eigen::VectorXcd>(a.data().data(), static_cast<Eigen::Index>(a.data().size()));
}

PeriodicArray unflatten(const Eigen::VectorXcd& x, const PeriodicArray& like) {
  if (x.size() != static_cast<Eigen::Index>(like.data().size())) throw ShapeMismatch("flat vector length mismatch");
  PeriodicArray out = like;
  for (Eigen::Index i = 0; i < x.size(); ++i) out.data()[i] = x(i);
  return out;
}

Eigen::VectorXcd flatten(const PeriodicPyramid& pyr) {
  Eigen::VectorXcd out(coefficient_count(pyr));
  Eigen::Index pos = 0;
  auto put = [&](const PeriodicArray& a) {
    for (const cd& v : a.data()) out(pos++) = v;
  };
  for (int j = 1; j <= pyr.levels; ++j)
    for (int l = 1; l <= pyr.wavelets(); ++l) put(pyr.band(l, j));
  put(pyr.approx);
  return out;
}

PeriodicPyramid unflatten(const Eigen::VectorXcd& x, const PeriodicPyramid& like) {
  if (x.size() != coefficient_count(like)) throw ShapeMismatch("flat vector length mismatch");
  PeriodicPyramid out = like;
  Eigen::Index pos = 0;
  auto take = [&](PeriodicArray& a) {
    for (cd& v : a.data()) v = x(pos++);
  };
  for (int j = 1; j <= out.levels; ++j)
    for (int l = 1; l <= out.wavelets(); ++l) take(out.band(l, j));
  take(out.approx);
  return out;
}

}  // namespace mixdil
