#include "mixdil/filter.hpp"

#include <cmath>
#include <stdexcept>

namespace mixdil {
namespace {

// Runs the exact route when every operand carries exact data, falling back to the
// float route when any operand is float-only or the exact route overflows.
template <typename ExactFn, typename FloatFn>
FilterSeq dispatch(bool exact_ok, ExactFn&& exact_fn, FloatFn&& float_fn) {
  if (exact_ok) {
    try {
      return FilterSeq(exact_fn());
    } catch (const std::overflow_error&) {
    }
  }
  return FilterSeq(float_fn());
}

std::int64_t abs_det(const IntMatrix& m) {
  const std::int64_t d = int_det(m);
  if (d == 0) throw SingularMatrix("sampling matrix is singular");
  return d < 0 ? -d : d;
}

}  // namespace

FloatSeq to_float(const ExactSeq& e) {
  return map_seq<cd>(e, [](const RadicalSum& x) { return cd(x.to_double(), 0.0); });
}

FilterSeq::FilterSeq(ExactSeq exact) : values_(to_float(exact)), exact_(std::move(exact)) {}

FilterSeq FilterSeq::from_values(const IntVector& offset, const IntVector& shape, int rows, int cols,
                                 const std::vector<cd>& coeffs) {
  FloatSeq s(offset, shape, rows, cols);
  if (coeffs.size() != s.data().size()) throw ShapeMismatch("coefficient count does not match the support box");
  s.data() = coeffs;
  return FilterSeq(std::move(s.trim()));
}

FilterSeq FilterSeq::from_exact(const IntVector& offset, const IntVector& shape, int rows, int cols,
                                const std::vector<ScaledScalar>& coeffs) {
  ExactSeq s(offset, shape, rows, cols);
  if (coeffs.size() != s.data().size()) throw ShapeMismatch("coefficient count does not match the support box");
  for (std::size_t i = 0; i < coeffs.size(); ++i) s.data()[i] = RadicalSum(coeffs[i]);
  return FilterSeq(std::move(s.trim()));
}

bool FilterSeq::exact_is_single_term() const {
  if (!exact_) return false;
  for (const auto& x : exact_->data())
    if (!x.single()) return false;
  return true;
}

FilterSeq FilterSeq::perturbed(const IntVector& k, int i, int j, const Rational& delta) const {
  if (exact_) {
    ExactSeq bump(k, IntVector::Ones(k.size()), rows(), cols());
    bump.at(k, i, j) = RadicalSum(delta);
    return FilterSeq(add(*exact_, bump));
  }
  FloatSeq bump(k, IntVector::Ones(k.size()), rows(), cols());
  bump.at(k, i, j) = cd(delta.to_double(), 0.0);
  return FilterSeq(add(values_, bump));
}

FilterSeq convolve(const FilterSeq& u1, const FilterSeq& u2) {
  if (u1.cols() != u2.rows() || u1.dim() != u2.dim()) throw ShapeMismatch("convolve: inner dimensions differ");
  return dispatch(
      u1.is_exact() && u2.is_exact(), [&] { return convolve(*u1.exact(), *u2.exact()); },
      [&] { return convolve(u1.values(), u2.values()); });
}

FilterSeq upsample(const FilterSeq& u, const IntMatrix& m) {
  return dispatch(
      u.is_exact(), [&] { return upsample(*u.exact(), m); }, [&] { return upsample(u.values(), m); });
}

FilterSeq downsample(const FilterSeq& u, const IntMatrix& m) {
  return dispatch(
      u.is_exact(), [&] { return downsample(*u.exact(), m); }, [&] { return downsample(u.values(), m); });
}

FilterSeq star(const FilterSeq& u) {
  return dispatch(u.is_exact(), [&] { return star(*u.exact()); }, [&] { return star(u.values()); });
}

FilterSeq shift(const FilterSeq& u, const IntVector& by) {
  return dispatch(u.is_exact(), [&] { return shift(*u.exact(), by); }, [&] { return shift(u.values(), by); });
}

FilterSeq scale(const FilterSeq& u, const RadicalSum& c) {
  return dispatch(
      u.is_exact(), [&] { return scale(*u.exact(), c); }, [&] { return scale(u.values(), cd(c.to_double(), 0.0)); });
}

FilterSeq scale(const FilterSeq& u, const cd& c) { return FilterSeq(scale(u.values(), c)); }

FilterSeq add(const FilterSeq& a, const FilterSeq& b, const RadicalSum& beta) {
  return dispatch(
      a.is_exact() && b.is_exact(), [&] { return add(*a.exact(), *b.exact(), beta); },
      [&] { return add(a.values(), b.values(), cd(beta.to_double(), 0.0)); });
}

FilterSeq subtract(const FilterSeq& a, const FilterSeq& b) { return add(a, b, RadicalSum(-1)); }

Eigen::MatrixXcd symbol(const FilterSeq& u, const Eigen::VectorXd& xi) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(u.rows(), u.cols());
  u.values().for_each([&](const IntVector& k, const cd* m) {
    double phase = 0.0;
    for (Eigen::Index i = 0; i < k.size(); ++i) phase += static_cast<double>(k(i)) * xi(i);
    const cd e = std::polar(1.0, -phase);
    for (int i = 0; i < u.rows(); ++i)
      for (int j = 0; j < u.cols(); ++j) out(i, j) += m[i * u.cols() + j] * e;
  });
  return out;
}

FilterSeq subdivision(const FilterSeq& a, const IntMatrix& m, const FilterSeq& u) {
  if (u.cols() != a.rows()) throw ShapeMismatch("subdivision: u.cols must equal a.rows");
  return scale(convolve(upsample(u, m), a), RadicalSum::sqrt_of(abs_det(m)));
}

FilterSeq transition(const FilterSeq& b, const IntMatrix& m, const FilterSeq& u) {
  if (u.cols() != b.cols()) throw ShapeMismatch("transition: u.cols must equal b.cols");
  return scale(downsample(convolve(u, star(b)), m), RadicalSum::sqrt_of(abs_det(m)));
}

Eigen::MatrixXcd inner(const FilterSeq& u, const FilterSeq& v) {
  const std::vector<cd> flat = inner(u.values(), v.values());
  Eigen::MatrixXcd out(u.rows(), v.rows());
  for (int i = 0; i < u.rows(); ++i)
    for (int j = 0; j < v.rows(); ++j) out(i, j) = flat[i * v.rows() + j];
  return out;
}

std::optional<std::vector<RadicalSum>> inner_exact(const FilterSeq& u, const FilterSeq& v) {
  if (!u.is_exact() || !v.is_exact()) return std::nullopt;
  try {
    return inner(*u.exact(), *v.exact());
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

double norm2(const FilterSeq& u) {
  double acc = 0.0;
  for (const cd& x : u.values().data()) acc += std::norm(x);
  return acc;
}

double max_abs_diff(const FilterSeq& u, const FilterSeq& v) {
  const FloatSeq diff = add(u.values(), v.values(), cd(-1.0, 0.0));
  double out = 0.0;
  for (const cd& x : diff.data()) out = std::max(out, std::abs(x));
  return out;
}

std::optional<bool> exact_equal(const FilterSeq& u, const FilterSeq& v) {
  if (!u.is_exact() || !v.is_exact()) return std::nullopt;
  ExactSeq a = *u.exact();
  ExactSeq b = *v.exact();
  return a.trim() == b.trim();
}

}  // namespace mixdil
