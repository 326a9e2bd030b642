#pragma once

#include <atomic>
#include <vector>

#include "finrec/driver.hpp"

namespace finrec::testing {

  /// Black box over a list of rational functions with rational coefficients.
  class QBox : public BlackBox {
  public:
    QBox(std::size_t n, std::vector<QRationalFunction> fs) : n_(n), fs_(std::move(fs)) { prime_changed(); }

    std::size_t num_vars() const override { return n_; }
    std::size_t num_functions() const override { return fs_.size(); }
    std::vector<FFInt> evaluate(std::span<const FFInt> x) const override {
      ++calls;
      std::vector<FFInt> out;
      for (const auto& f : reduced_) out.push_back(f.evaluate(x));
      return out;
    }
    void prime_changed() override {
      reduced_.clear();
      for (const auto& f : fs_) reduced_.push_back(reduce(f));
    }

    mutable std::atomic<std::size_t> calls{0};

  private:
    std::size_t n_;
    std::vector<QRationalFunction> fs_;
    std::vector<FFRationalFunction> reduced_;
  };

  inline QRationalFunction qfun(std::size_t n, const std::vector<std::pair<MultiIndex, Rational>>& num,
                                const std::vector<std::pair<MultiIndex, Rational>>& den) {
    QRationalFunction f{QPolynomial(n), QPolynomial(n)};
    for (const auto& [a, c] : num) f.numerator.add_term(a, c);
    for (const auto& [a, c] : den) f.denominator.add_term(a, c);
    return f;
  }

}
