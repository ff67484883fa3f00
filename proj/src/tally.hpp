#pragma once

#include <algorithm>
#include <charconv>
#include <string>

#include "mixdil/filter.hpp"
#include "mixdil/verify.hpp"

namespace mixdil::detail {

constexpr std::size_t kMaxWitnesses = 8;

inline std::string fmt(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string fmt(const cd& z) {
  if (z.imag() == 0.0) return fmt(z.real());
  return fmt(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt(std::abs(z.imag())) + "i";
}

inline std::string fmt(const IntVector& k) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k(i));
  return s + ")";
}

inline std::string fmt(const RationalVector& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + w[i].str();
  return s + ")";
}

// Tracks residuals and arithmetic mode over a sequence of probe comparisons.
class Tally {
 public:
  Tally(std::string property, double tol) {
    report_.property = std::move(property);
    report_.tolerance = tol;
  }

  // Compares got with want; `where` labels the probe.
  void compare(const FilterSeq& got, const FilterSeq& want, const std::string& where) {
    const FilterSeq diff = subtract(got, want);
    const bool exact = diff.is_exact();
    all_exact_ = all_exact_ && exact;
    diff.values().for_each([&](const IntVector& n, const cd* m) {
      for (int i = 0; i < diff.rows(); ++i)
        for (int j = 0; j < diff.cols(); ++j) {
          const double r = std::abs(m[i * diff.cols() + j]);
          record(r, exact ? !is_zero_value(diff.exact()->value(n, i, j)) : r > report_.tolerance,
                 where + " n=" + fmt(n) + " entry (" + std::to_string(i) + "," + std::to_string(j) + ")",
                 want.value(n, i, j), got.value(n, i, j));
        }
    });
  }

  void record(double residual, bool bad, const std::string& where, const cd& want, const cd& got) {
    report_.max_residual = std::max(report_.max_residual, residual);
    if (bad) {
      any_bad_ = true;
      if (report_.witnesses.size() < kMaxWitnesses) report_.witnesses.push_back({where, fmt(want), fmt(got)});
    }
  }

  void set_floating() { all_exact_ = false; }

  VerificationReport finish() {
    report_.arithmetic = all_exact_ ? Arithmetic::exact : Arithmetic::floating;
    if (all_exact_)
      report_.verdict = any_bad_ ? Verdict::fail : Verdict::pass;
    else
      report_.verdict = report_.max_residual <= report_.tolerance ? Verdict::pass_numeric : Verdict::fail;
    if (report_.verdict == Verdict::pass) report_.max_residual = 0.0;
    return report_;
  }

 private:
  VerificationReport report_;
  bool all_exact_ = true;
  bool any_bad_ = false;
};

}  // namespace mixdil::detail
