#include "mixdil/refine.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "mixdil/errors.hpp"
#include "tally.hpp"

namespace mixdil {
namespace {

using detail::fmt;

std::int64_t points_of(const IntVector& shape) {
  std::int64_t n = 1;
  for (Eigen::Index i = 0; i < shape.size(); ++i) {
    if (shape(i) <= 0) return 0;
    if (__builtin_mul_overflow(n, shape(i), &n)) return INT64_MAX;
  }
  return n;
}

void guard_points(std::int64_t n, const char* what) {
  if (n > kMaxSamples)
    throw EnvelopeExceeded(std::string(what) + " needs " + std::to_string(n) + " grid points, above the limit of " +
                           std::to_string(kMaxSamples));
}

double l2_diff(const FloatSeq& a, const FloatSeq& b) {
  const FloatSeq d = add(a, b, cd(-1.0));
  double s = 0.0;
  for (const cd& x : d.data()) s += std::norm(x);
  return std::sqrt(s);
}

double l2(const FloatSeq& a) {
  double s = 0.0;
  for (const cd& x : a.data()) s += std::norm(x);
  return std::sqrt(s);
}

// Copies u into the smallest box containing both its support and [lo, lo + shape).
FloatSeq embed(const FloatSeq& u, const IntVector& lo, const IntVector& shape) {
  IntVector a = lo, b = lo + shape;
  if (!u.empty()) {
    a = a.cwiseMin(u.offset());
    b = b.cwiseMax(u.offset() + u.shape());
  }
  FloatSeq out(a, b - a, u.rows(), u.cols());
  u.for_each([&](const IntVector& k, const cd* m) {
    for (int i = 0; i < u.rows(); ++i)
      for (int j = 0; j < u.cols(); ++j) out.at(k, i, j) = m[i * u.cols() + j];
  });
  return out;
}

// Predicted box size of a convolution.
std::int64_t conv_points(const FloatSeq& a, const FloatSeq& b) {
  if (a.empty() || b.empty()) return 0;
  return points_of(a.shape() + b.shape() - IntVector::Ones(a.dim()));
}

}  // namespace

Eigen::VectorXd SampledFunction::point(const IntVector& p) const {
  const Eigen::MatrixXd mn = int_power(base, level).cast<double>();
  return mn.partialPivLu().solve(p.cast<double>());
}

MaskDiagnostic mask_spectrum(const FilterSeq& b0) {
  MaskDiagnostic out;
  if (b0.rows() != b0.cols()) {
    out.message = "mask is not square";
    return out;
  }
  const Eigen::MatrixXcd at0 = symbol(b0, Eigen::VectorXd::Zero(b0.dim()));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(at0);
  int ones = 0;
  bool inside = true;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const cd ev = es.eigenvalues()(i);
    out.eigenvalues.push_back(ev);
    if (std::abs(ev - 1.0) <= 1e-9)
      ++ones;
    else if (std::abs(ev) >= 1.0)
      inside = false;
  }
  out.ok = ones == 1 && inside;
  if (ones == 0)
    out.message = "1 is not an eigenvalue of the mask symbol at the origin";
  else if (ones > 1)
    out.message = "eigenvalue 1 is not simple";
  else if (!inside)
    out.message = "an eigenvalue other than 1 has modulus at least 1";
  else
    out.message = "ok";
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> support_estimate(const FilterSeq& mask, const IntMatrix& m) {
  const int d = mask.dim();
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(d), hi = Eigen::VectorXd::Zero(d);
  if (mask.empty()) return {lo, hi};
  const Eigen::MatrixXd minv = m.cast<double>().inverse();
  const Eigen::VectorXd blo = mask.offset().cast<double>();
  const Eigen::VectorXd bhi = (mask.offset() + mask.shape() - IntVector::Ones(d)).cast<double>();
  Eigen::MatrixXd p = minv;
  for (int j = 1; j <= 2000 && p.cwiseAbs().maxCoeff() > 1e-18; ++j) {
    Eigen::VectorXd clo = Eigen::VectorXd::Constant(d, INFINITY), chi = Eigen::VectorXd::Constant(d, -INFINITY);
    for (int c = 0; c < (1 << d); ++c) {
      Eigen::VectorXd corner(d);
      for (int i = 0; i < d; ++i) corner(i) = (c >> i) & 1 ? bhi(i) : blo(i);
      const Eigen::VectorXd img = p * corner;
      clo = clo.cwiseMin(img);
      chi = chi.cwiseMax(img);
    }
    lo += clo;
    hi += chi;
    p = p * minv;
  }
  return {lo, hi};
}

SampledFunction cascade(const FilterSeq& mask, const IntMatrix& m, int level, int max_iter) {
  if (level < 0) throw std::invalid_argument("grid level must be nonnegative");
  const MaskDiagnostic diag = mask_spectrum(mask);
  if (!diag.ok) throw MaskDiagnosticFailed(diag.message);
  const int d = mask.dim();
  const int r = mask.rows();
  const double det = std::abs(static_cast<double>(int_det(m)));
  const FloatSeq b = mask.values();

  SampledFunction out;
  out.level = level;
  out.base = m;
  if (r > 1) out.warnings.push_back("initial iterate uses the first coordinate vector times the unit cube indicator");

  // integer-node values: g <- |det M| ((b * g) down M), from the cube indicator
  FloatSeq g(IntVector::Zero(d), IntVector::Ones(d), r, 1);
  g.at(IntVector::Zero(d), 0, 0) = 1.0;
  int growth = 0;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    guard_points(conv_points(b, g), "cascade iterate");
    FloatSeq next = scale(downsample(convolve(b, g), m), cd(det));
    next.trim();
    const double diff = l2_diff(next, g);
    const double prev = out.differences.empty() ? INFINITY : out.differences.back();
    out.differences.push_back(diff);
    g = std::move(next);
    if (diff <= 1e-15 * std::max(1.0, l2(g))) {
      converged = true;
      break;
    }
    growth = diff > prev && diff > 1e-12 ? growth + 1 : 0;
    if (growth >= 3) throw Diverged("cascade differences grew for 3 consecutive iterations");
  }
  if (!converged) out.warnings.push_back("integer-node iteration did not reach 1e-15 in " + std::to_string(max_iter) +
                                         " iterations");

  // refinement to level n: v_n = |det M| (b up M^{n-1}) * v_{n-1}
  for (int n = 1; n <= level; ++n) {
    const FloatSeq up = upsample(b, int_power(m, n - 1));
    guard_points(conv_points(up, g), "cascade refinement");
    g = scale(convolve(up, g), cd(det));
    g.trim();
  }

  const auto [lo, hi] = support_estimate(mask, m);
  const Eigen::MatrixXd mn = int_power(m, level).cast<double>();
  IntVector glo = IntVector::Constant(d, INT64_MAX), ghi = IntVector::Constant(d, INT64_MIN);
  for (int c = 0; c < (1 << d); ++c) {
    Eigen::VectorXd corner(d);
    for (int i = 0; i < d; ++i) corner(i) = (c >> i) & 1 ? hi(i) : lo(i);
    const Eigen::VectorXd img = mn * corner;
    for (int i = 0; i < d; ++i) {
      glo(i) = std::min<std::int64_t>(glo(i), static_cast<std::int64_t>(std::floor(img(i) - 1e-9)) - 1);
      ghi(i) = std::max<std::int64_t>(ghi(i), static_cast<std::int64_t>(std::ceil(img(i) + 1e-9)) + 1);
    }
  }
  const IntVector shape = ghi - glo + IntVector::Ones(d);
  guard_points(points_of(shape), "sampled function box");
  out.values = embed(g, glo, shape);
  return out;
}

SampledFunction cascade(const FilterBank& bank, int level, Side side, int max_iter) {
  const Channel& low = bank.lowpass();
  return cascade(side == Side::primal ? low.primal : low.dual, low.dilation.matrix(), level, max_iter);
}

SampledFunction refine_step(const FilterSeq& a, const SampledFunction& psi) {
  if (a.cols() != psi.components()) throw ShapeMismatch("filter width differs from the component count");
  const double det = std::abs(static_cast<double>(int_det(psi.base)));
  const FloatSeq up = upsample(a.values(), int_power(psi.base, psi.level));
  guard_points(conv_points(up, psi.values), "generator evaluation");
  SampledFunction out;
  out.level = psi.level;
  out.base = psi.base;
  out.values = scale(downsample(convolve(up, psi.values), psi.base), cd(det));
  out.values.trim();
  return out;
}

std::vector<SampledFunction> derive_generators(const FilterBank& bank, const SampledFunction& psi0, Side side) {
  std::vector<SampledFunction> out;
  for (int l = 1; l <= bank.wavelets(); ++l) {
    const Channel& c = bank.channel(l);
    out.push_back(refine_step(side == Side::primal ? c.primal : c.dual, psi0));
  }
  return out;
}

const Eigen::MatrixXcd& GramSequence::at(const IntVector& k) const {
  for (std::size_t i = 0; i < lags.size(); ++i)
    if (lags[i] == k) return values[i];
  throw std::out_of_range("lag " + fmt(k) + " not computed");
}

GramSequence gram_shifts(const SampledFunction& f, const SampledFunction& g, const Lattice& lags, int max_lag) {
  if (f.level != g.level || f.base != g.base) throw ShapeMismatch("functions live on different grids");
  if (lags.dim() != f.dim()) throw DimensionMismatch("lag lattice dimension differs");
  const int d = f.dim();
  const IntMatrix mn = int_power(f.base, f.level);
  const double weight = 1.0 / std::pow(std::abs(static_cast<double>(int_det(f.base))), f.level);
  GramSequence out;
  for_each_point(IntVector::Constant(d, -max_lag), IntVector::Constant(d, 2 * max_lag + 1), [&](const IntVector& k) {
    if (!lags.contains(k)) return;
    const IntVector off = int_apply(mn, k);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(f.components(), g.components());
    f.values.for_each([&](const IntVector& p, const cd* fv) {
      const IntVector q = p + off;
      if (!g.values.contains(q)) return;
      for (int i = 0; i < f.components(); ++i) {
        if (fv[i] == 0.0) continue;
        for (int j = 0; j < g.components(); ++j) acc(i, j) += fv[i] * std::conj(g.values.value(q, j, 0));
      }
    });
    out.lags.push_back(k);
    out.values.push_back(acc * weight);
  });
  return out;
}

Eigen::MatrixXcd bracket_symbol(const GramSequence& gram, const Eigen::VectorXd& xi) {
  if (gram.values.empty()) return {};
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(gram.values[0].rows(), gram.values[0].cols());
  for (std::size_t i = 0; i < gram.lags.size(); ++i)
    out += gram.values[i] * std::polar(1.0, -gram.lags[i].cast<double>().dot(xi));
  return out;
}

std::pair<double, double> riesz_bounds(const GramSequence& gram, int grid_n) {
  if (gram.lags.empty()) throw std::invalid_argument("empty Gram sequence");
  if (grid_n < 1) throw std::invalid_argument("grid size must be positive");
  const int d = static_cast<int>(gram.lags[0].size());
  double lo = INFINITY, hi = -INFINITY;
  for_each_point(IntVector::Zero(d), IntVector::Constant(d, grid_n), [&](const IntVector& t) {
    const Eigen::VectorXd xi = t.cast<double>() * (2.0 * std::numbers::pi / grid_n);
    const Eigen::MatrixXcd s = bracket_symbol(gram, xi);
    const Eigen::MatrixXcd h = 0.5 * (s + s.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
    hi = std::max(hi, es.eigenvalues().maxCoeff());
  });
  return {lo, hi};
}

VerificationReport check_function_biorthogonality(const FilterBank& bank, int level, int max_lag, double tol) {
  VerificationReport rep;
  rep.property = "function_biorthogonality";
  rep.tolerance = tol;
  rep.arithmetic = Arithmetic::floating;
  const CriticalSampling cs = critical_sampling(bank);
  if (!cs.critical) {
    rep.verdict = Verdict::not_applicable;
    rep.note = "the bank is not critically sampled (sum " + cs.sum.str() + "), so it cannot be biorthogonal";
    return rep;
  }
  const SampledFunction primal = cascade(bank, level, Side::primal);
  const SampledFunction dual = cascade(bank, level, Side::dual);
  const GramSequence g = gram_shifts(dual, primal, Lattice::integers(bank.dim()), max_lag);
  detail::Tally tally(rep.property, tol);
  tally.set_floating();
  for (std::size_t i = 0; i < g.lags.size(); ++i) {
    const bool zero = g.lags[i].isZero();
    const Eigen::MatrixXcd& v = g.values[i];
    for (Eigen::Index a = 0; a < v.rows(); ++a)
      for (Eigen::Index b = 0; b < v.cols(); ++b) {
        const cd want = zero && a == b ? 1.0 : 0.0;
        const double res = std::abs(v(a, b) - want);
        tally.record(res, res > tol, "lag " + fmt(g.lags[i]) + " entry (" + std::to_string(a) + "," +
                                         std::to_string(b) + ")", want, v(a, b));
      }
  }
  rep = tally.finish();
  rep.note = "grid level " + std::to_string(level) + ", lags up to " + std::to_string(max_lag);
  return rep;
}

void write_csv(const SampledFunction& f, std::ostream& out) {
  const int d = f.dim();
  bool complex_values = false;
  for (const cd& x : f.values.data()) complex_values = complex_values || x.imag() != 0.0;
  for (int i = 0; i < d; ++i) out << (i ? "," : "") << "x" << i + 1;
  for (int c = 0; c < f.components(); ++c) {
    out << ",c" << c + 1;
    if (complex_values) out << "_re,c" << c + 1 << "_im";
  }
  out << "\n";
  if (f.values.empty()) return;
  const Eigen::MatrixXd inv = int_power(f.base, f.level).cast<double>().inverse();
  f.values.for_each([&](const IntVector& p, const cd* v) {
    const Eigen::VectorXd x = inv * p.cast<double>();
    for (int i = 0; i < d; ++i) out << (i ? "," : "") << fmt(x(i));
    for (int c = 0; c < f.components(); ++c) {
      out << "," << fmt(v[c].real());
      if (complex_values) out << "," << fmt(v[c].imag());
    }
    out << "\n";
  });
}

void write_csv(const GramSequence& g, std::ostream& out) {
  if (g.lags.empty()) return;
  const int d = static_cast<int>(g.lags[0].size());
  for (int i = 0; i < d; ++i) out << (i ? "," : "") << "k" << i + 1;
  for (Eigen::Index a = 0; a < g.values[0].rows(); ++a)
    for (Eigen::Index b = 0; b < g.values[0].cols(); ++b) out << ",g" << a + 1 << b + 1 << "_re,g" << a + 1 << b + 1 << "_im";
  out << "\n";
  for (std::size_t n = 0; n < g.lags.size(); ++n) {
    for (int i = 0; i < d; ++i) out << (i ? "," : "") << g.lags[n](i);
    for (Eigen::Index a = 0; a < g.values[n].rows(); ++a)
      for (Eigen::Index b = 0; b < g.values[n].cols(); ++b)
        out << "," << fmt(g.values[n](a, b).real()) << "," << fmt(g.values[n](a, b).imag());
    out << "\n";
  }
}

}  // namespace mixdil
