#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixdil/rational.hpp"

namespace mixdil {

/// Splits n > 0 as square * squarefree; returns (s, m) with n = s*s*m.
inline std::pair<std::int64_t, std::int64_t> squarefree_split(std::int64_t n) {
  if (n <= 0) throw std::domain_error("squarefree_split needs a positive integer");
  std::int64_t s = 1;
  std::int64_t m = 1;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    for (int i = 0; i < e / 2; ++i) s *= p;
    if (e % 2 == 1) m *= p;
  }
  m *= n;
  return {s, m};
}

/// The value (num/den)*sqrt(radicand), radicand square-free.
struct ScaledScalar {
  std::int64_t num = 0;
  std::int64_t den = 1;
  std::int64_t radicand = 1;

  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den) *
           std::sqrt(static_cast<double>(radicand));
  }
  friend bool operator==(const ScaledScalar&, const ScaledScalar&) = default;
};

/// Finite sum of rational multiples of square roots of square-free integers.
/// Closed under +, - and *, so subdivision/transition pipelines whose scales are
/// |det M|^{1/2} stay exact. Terms are kept sorted by radicand with no zero
/// coefficients, which makes equality structural.
class RadicalSum {
 public:
  struct Term {
    std::int64_t radicand;
    Rational coef;
    friend bool operator==(const Term&, const Term&) = default;
  };

  RadicalSum() = default;
  RadicalSum(Rational r) {  // NOLINT(implicit)
    if (!r.is_zero()) terms_.push_back({1, r});
  }
  RadicalSum(std::int64_t n) : RadicalSum(Rational(n)) {}  // NOLINT(implicit)
  RadicalSum(const ScaledScalar& s) {                      // NOLINT(implicit)
    const auto [sq, m] = squarefree_split(s.radicand);
    const Rational c = Rational(s.num, s.den) * Rational(sq);
    if (!c.is_zero()) terms_.push_back({m, c});
  }

  /// sqrt(n) for a positive integer n.
  static RadicalSum sqrt_of(std::int64_t n) {
    const auto [sq, m] = squarefree_split(n);
    RadicalSum r;
    r.terms_.push_back({m, Rational(sq)});
    return r;
  }

  bool is_zero() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }

  /// The single-term form, when the value has one.
  std::optional<ScaledScalar> single() const {
    if (terms_.empty()) return ScaledScalar{0, 1, 1};
    if (terms_.size() != 1) return std::nullopt;
    return ScaledScalar{terms_[0].coef.num(), terms_[0].coef.den(), terms_[0].radicand};
  }

  /// Rational value, when every irrational part cancelled.
  std::optional<Rational> rational() const {
    if (terms_.empty()) return Rational(0);
    if (terms_.size() == 1 && terms_[0].radicand == 1) return terms_[0].coef;
    return std::nullopt;
  }

  double to_double() const {
    double acc = 0.0;
    for (const auto& t : terms_) acc += t.coef.to_double() * std::sqrt(static_cast<double>(t.radicand));
    return acc;
  }

  friend RadicalSum operator+(const RadicalSum& a, const RadicalSum& b) {
    RadicalSum out;
    out.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].radicand < b.terms_[j].radicand)) {
        out.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || b.terms_[j].radicand < a.terms_[i].radicand) {
        out.terms_.push_back(b.terms_[j++]);
      } else {
        const Rational c = a.terms_[i].coef + b.terms_[j].coef;
        if (!c.is_zero()) out.terms_.push_back({a.terms_[i].radicand, c});
        ++i;
        ++j;
      }
    }
    return out;
  }
  friend RadicalSum operator-(const RadicalSum& a) {
    RadicalSum out = a;
    for (auto& t : out.terms_) t.coef = -t.coef;
    return out;
  }
  friend RadicalSum operator-(const RadicalSum& a, const RadicalSum& b) { return a + (-b); }
  friend RadicalSum operator*(const RadicalSum& a, const RadicalSum& b) {
    RadicalSum out;
    for (const auto& x : a.terms_) {
      for (const auto& y : b.terms_) {
        // sqrt(m)*sqrt(n) = g*sqrt((m/g)(n/g)), the product of coprime square-free parts.
        const std::int64_t g = std::gcd(x.radicand, y.radicand);
        RadicalSum t;
        t.terms_.push_back({(x.radicand / g) * (y.radicand / g), x.coef * y.coef * Rational(g)});
        out = out + t;
      }
    }
    return out;
  }
  RadicalSum& operator+=(const RadicalSum& o) { return *this = *this + o; }
  RadicalSum& operator-=(const RadicalSum& o) { return *this = *this - o; }
  RadicalSum& operator*=(const RadicalSum& o) { return *this = *this * o; }

  friend bool operator==(const RadicalSum& a, const RadicalSum& b) { return a.terms_ == b.terms_; }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i) s += " + ";
      s += terms_[i].coef.str();
      if (terms_[i].radicand != 1) s += "*sqrt(" + std::to_string(terms_[i].radicand) + ")";
    }
    return s;
  }

 private:
  std::vector<Term> terms_;
};

}  // namespace mixdil
