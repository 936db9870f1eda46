#pragma once

#include <cstdint>
#include <string>

namespace gravcs {

// Exact rational number on 64-bit components.  Always stored reduced with a
// positive denominator, so equal values have equal representations.  Every
// operation reduces through 128-bit intermediates and throws
// std::overflow_error if the reduced result no longer fits.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : num_(n) {}  // NOLINT: implicit by design
  Rational(std::int64_t n, std::int64_t d);

  // accepts "p" or "p/q" with optional sign
  static Rational parse(const std::string& text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  std::string str() const;

  // canonical representative in [0, 1)
  Rational mod1() const;

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend bool operator<(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace gravcs
