#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "finrec/polynomial.hpp"

namespace finrec {

  /// P / Q as a pair of sparse polynomials in the same variables.
  template <class C>
  struct RationalFunction {
    SparsePolynomial<C> numerator;
    SparsePolynomial<C> denominator;

    std::size_t num_vars() const { return numerator.num_vars(); }

    /**
     * Scales so that the lowest-degree denominator monomial, smallest in colex
     * order among equal degrees, has coefficient 1.
     */
    void normalize() {
      if (denominator.is_zero()) throw std::domain_error("zero denominator");
      C inv = C(1) / denominator.terms().begin()->second;
      numerator *= inv;
      denominator *= inv;
    }

    C evaluate(std::span<const C> values) const {
      return numerator.evaluate(values) / denominator.evaluate(values);
    }

    std::string to_string(const std::vector<std::string>& vars) const {
      return "(" + numerator.to_string(vars) + ")/(" + denominator.to_string(vars) + ")";
    }
    std::string to_string() const {
      return "(" + numerator.to_string() + ")/(" + denominator.to_string() + ")";
    }

    friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
      return a.numerator == b.numerator && a.denominator == b.denominator;
    }
  };

  using FFRationalFunction = RationalFunction<FFInt>;
  using QRationalFunction = RationalFunction<Rational>;

  FFRationalFunction reduce(const QRationalFunction& f);

  /**
   * Expands P(z + s) - P(z) and buckets the terms by total degree.
   * Only the shifted variables (s_i != 0) are expanded.
   */
  template <class C>
  std::map<std::uint32_t, SparsePolynomial<C>> shift_subtraction(const SparsePolynomial<C>& p,
                                                                  std::span<const C> shift);

  extern template std::map<std::uint32_t, FFPolynomial> shift_subtraction(const FFPolynomial&,
                                                                          std::span<const FFInt>);
  extern template std::map<std::uint32_t, QPolynomial> shift_subtraction(const QPolynomial&,
                                                                         std::span<const Rational>);

}
