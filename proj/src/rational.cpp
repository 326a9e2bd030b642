#include "finrec/rational.hpp"

#include <ostream>
#include <stdexcept>

namespace finrec {

  Rational::Rational(const mpz_class& numerator, const mpz_class& denominator)
      : num_(numerator), den_(denominator) {
    if (den_ == 0) throw std::domain_error("zero denominator");
    canonicalize();
  }

  void Rational::canonicalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
    if (g != 1 && g != 0) {
      mpz_divexact(num_.get_mpz_t(), num_.get_mpz_t(), g.get_mpz_t());
      mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
    }
    if (num_ == 0) den_ = 1;
  }

  Rational Rational::operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
  }

  Rational& Rational::operator+=(const Rational& b) {
    num_ = num_ * b.den_ + b.num_ * den_;
    den_ *= b.den_;
    canonicalize();
    return *this;
  }

  Rational& Rational::operator-=(const Rational& b) { return *this += -b; }

  Rational& Rational::operator*=(const Rational& b) {
    num_ *= b.num_;
    den_ *= b.den_;
    canonicalize();
    return *this;
  }

  Rational& Rational::operator/=(const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("division by zero");
    num_ *= b.den_;
    den_ *= b.num_;
    canonicalize();
    return *this;
  }

  FFInt Rational::to_ffint() const { return FFInt(num_) / FFInt(den_); }

  Rational Rational::parse(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(mpz_class(text));
    return Rational(mpz_class(text.substr(0, slash)), mpz_class(text.substr(slash + 1)));
  }

  std::string Rational::str() const {
    if (den_ == 1) return num_.get_str();
    return num_.get_str() + "/" + den_.get_str();
  }

  std::ostream& operator<<(std::ostream& out, const Rational& r) { return out << r.str(); }

}
