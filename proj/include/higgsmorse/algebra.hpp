#pragma once

// Exact univariate polynomials and truncated power series over Z.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "higgsmorse/errors.hpp"

namespace higgsmorse {

using Integer = boost::multiprecision::cpp_int;

/// Polynomial in t with exact integer coefficients; coeffs[i] multiplies t^i.
/// Trailing zeros are always stripped, so the zero polynomial has no coefficients.
class Polynomial {
public:
  Polynomial() = default;
  Polynomial(std::vector<Integer> c) : coeffs_(std::move(c)) { normalize(); }
  Polynomial(std::initializer_list<long long> c) {
    for (auto x : c) coeffs_.emplace_back(x);
    normalize();
  }

  static Polynomial constant(const Integer &c) { return Polynomial(std::vector<Integer>{c}); }
  static Polynomial monomial(std::size_t k, const Integer &c = 1) {
    std::vector<Integer> v(k + 1);
    v[k] = c;
    return Polynomial(std::move(v));
  }

  const std::vector<Integer> &coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// Degree; -1 for the zero polynomial.
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  Integer operator[](std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Integer(0); }

  Integer evaluate(const Integer &t) const {
    Integer acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  bool is_palindromic() const {
    return std::equal(coeffs_.begin(), coeffs_.end(), coeffs_.rbegin());
  }

  friend Polynomial operator+(const Polynomial &a, const Polynomial &b) {
    std::vector<Integer> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial &a) {
    std::vector<Integer> c = a.coeffs_;
    for (auto &x : c) x = -x;
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial &a, const Polynomial &b) { return a + (-b); }
  friend Polynomial operator*(const Polynomial &a, const Polynomial &b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Integer> c(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(c));
  }
  Polynomial &operator+=(const Polynomial &o) { return *this = *this + o; }
  Polynomial &operator*=(const Polynomial &o) { return *this = *this * o; }
  friend bool operator==(const Polynomial &, const Polynomial &) = default;

  Polynomial pow(unsigned e) const {
    Polynomial r = constant(1), b = *this;
    while (e) {
      if (e & 1u) r *= b;
      b *= b;
      e >>= 1u;
    }
    return r;
  }

  /// Multiply by t^k.
  Polynomial shifted(std::size_t k) const {
    if (is_zero()) return {};
    std::vector<Integer> c(k, Integer(0));
    c.insert(c.end(), coeffs_.begin(), coeffs_.end());
    return Polynomial(std::move(c));
  }

  /// "c0 + c1*t + c2*t^2", zero terms omitted; the zero polynomial is "0".
  std::string to_string() const {
    if (is_zero()) return "0";
    std::string out;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i] == 0) continue;
      std::string c = coeffs_[i].str();
      if (!out.empty()) {
        if (c.front() == '-') {
          out += " - ";
          c.erase(0, 1);
        } else {
          out += " + ";
        }
      }
      out += c;
      if (i == 1) out += "*t";
      else if (i > 1) out += "*t^" + std::to_string(i);
    }
    return out;
  }

  static Polynomial parse(std::string_view s);
  friend std::ostream &operator<<(std::ostream &os, const Polynomial &p) { return os << p.to_string(); }

private:
  void normalize() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }
  std::vector<Integer> coeffs_;
};

namespace detail {

class PolyParser {
public:
  explicit PolyParser(std::string_view s) : s_(s) {}

  Polynomial run() {
    Polynomial acc;
    skip();
    bool first = true;
    while (pos_ < s_.size()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      acc += term(sign);
      first = false;
      skip();
    }
    if (first) fail("empty polynomial");
    return acc;
  }

private:
  Polynomial term(int sign) {
    Integer c = 1;
    bool have_coeff = false;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      c = Integer(digits());
      have_coeff = true;
      skip();
      if (peek() != '*') return Polynomial::constant(sign * c);
      ++pos_;
      skip();
    }
    if (peek() != 't') fail(have_coeff ? "expected 't' after '*'" : "expected coefficient or 't'");
    ++pos_;
    skip();
    std::size_t e = 1;
    if (peek() == '^') {
      ++pos_;
      skip();
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected exponent");
      e = std::stoul(digits());
    }
    return Polynomial::monomial(e, sign * c);
  }

  std::string digits() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string &msg) const {
    throw ValidationError("polynomial parse error at offset " + std::to_string(pos_) + ": " + msg);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

} // namespace detail

inline Polynomial Polynomial::parse(std::string_view s) { return detail::PolyParser(s).run(); }

inline Polynomial poly_add(const Polynomial &a, const Polynomial &b) { return a + b; }
inline Polynomial poly_mul(const Polynomial &a, const Polynomial &b) { return a * b; }

/// Power series known modulo t^(order+1).
class TruncatedSeries {
public:
  TruncatedSeries() = default;
  TruncatedSeries(std::vector<Integer> c, std::size_t order) : coeffs_(std::move(c)), order_(order) {
    coeffs_.resize(order_ + 1);
  }
  TruncatedSeries(const Polynomial &p, std::size_t order) : order_(order) {
    coeffs_.resize(order_ + 1);
    for (std::size_t i = 0; i <= order_; ++i) coeffs_[i] = p[i];
  }

  std::size_t order() const { return order_; }
  const std::vector<Integer> &coeffs() const { return coeffs_; }
  const Integer &operator[](std::size_t i) const { return coeffs_.at(i); }

  /// The retained coefficients as a polynomial.
  Polynomial truncated() const { return Polynomial(coeffs_); }

  friend TruncatedSeries operator+(const TruncatedSeries &a, const TruncatedSeries &b) {
    std::size_t n = std::min(a.order_, b.order_);
    std::vector<Integer> c(n + 1);
    for (std::size_t i = 0; i <= n; ++i) c[i] = a.coeffs_[i] + b.coeffs_[i];
    return {std::move(c), n};
  }
  friend TruncatedSeries operator-(const TruncatedSeries &a, const TruncatedSeries &b) {
    std::size_t n = std::min(a.order_, b.order_);
    std::vector<Integer> c(n + 1);
    for (std::size_t i = 0; i <= n; ++i) c[i] = a.coeffs_[i] - b.coeffs_[i];
    return {std::move(c), n};
  }
  friend TruncatedSeries operator*(const TruncatedSeries &a, const TruncatedSeries &b) {
    std::size_t n = std::min(a.order_, b.order_);
    std::vector<Integer> c(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      if (a.coeffs_[i] == 0) continue;
      for (std::size_t j = 0; i + j <= n; ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return {std::move(c), n};
  }
  friend bool operator==(const TruncatedSeries &, const TruncatedSeries &) = default;

  friend std::ostream &operator<<(std::ostream &os, const TruncatedSeries &a) { return os << a.to_string(); }

  bool nonnegative() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Integer &x) { return x >= 0; });
  }

  /// Ascending terms up to the truncation order, followed by "+ O(t^(order+1))".
  std::string to_string() const {
    std::string body = truncated().to_string();
    return body + " + O(t^" + std::to_string(order_ + 1) + ")";
  }

private:
  std::vector<Integer> coeffs_{Integer(0)};
  std::size_t order_ = 0;
};

/// 1/(1 - t^step) up to t^order.
inline TruncatedSeries series_geometric(long step, long order) {
  require(step >= 1, "series_geometric: step must be >= 1");
  require(order >= 0, "series_geometric: order must be >= 0");
  std::vector<Integer> c(static_cast<std::size_t>(order) + 1);
  for (long i = 0; i <= order; i += step) c[static_cast<std::size_t>(i)] = 1;
  return {std::move(c), static_cast<std::size_t>(order)};
}

inline TruncatedSeries series_mul(const TruncatedSeries &a, const TruncatedSeries &b) { return a * b; }

/// t^k * a, keeping a's truncation order.
inline TruncatedSeries series_shift(const TruncatedSeries &a, long k) {
  require(k >= 0, "series_shift: negative shift");
  std::size_t n = a.order();
  std::vector<Integer> c(n + 1);
  for (std::size_t i = 0; i + static_cast<std::size_t>(k) <= n; ++i) c[i + static_cast<std::size_t>(k)] = a[i];
  return {std::move(c), n};
}

/// Binomial coefficient C(n, k), zero outside 0 <= k <= n.
inline Integer binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  Integer r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

} // namespace higgsmorse
