#pragma once

#include <iosfwd>
#include <string>

#include <gmpxx.h>

#include "finrec/ffield.hpp"

namespace finrec {

  /// Arbitrary-precision rational in lowest terms with positive denominator.
  class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(long v) : num_(v), den_(1) {}
    Rational(int v) : num_(v), den_(1) {}
    explicit Rational(const mpz_class& v) : num_(v), den_(1) {}
    Rational(const mpz_class& numerator, const mpz_class& denominator);

    const mpz_class& numerator() const { return num_; }
    const mpz_class& denominator() const { return den_; }
    bool is_zero() const { return num_ == 0; }

    Rational operator-() const;
    Rational& operator+=(const Rational& b);
    Rational& operator-=(const Rational& b);
    Rational& operator*=(const Rational& b);
    Rational& operator/=(const Rational& b);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend bool operator==(const Rational& a, const Rational& b) {
      return a.num_ == b.num_ && a.den_ == b.den_;
    }

    /// Image in the current prime field. The denominator must be a unit mod p.
    FFInt to_ffint() const;
    /// Parses "n" or "n/d".
    static Rational parse(const std::string& text);
    std::string str() const;

  private:
    void canonicalize();

    mpz_class num_;
    mpz_class den_;
  };

  std::ostream& operator<<(std::ostream& out, const Rational& r);

}
