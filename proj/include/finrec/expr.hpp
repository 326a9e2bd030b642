#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "finrec/driver.hpp"
#include "finrec/ratfunc.hpp"

namespace finrec {

  /// Syntax or semantic error at a byte offset of the input.
  struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
  };

  /**
   * Arithmetic expression over integer literals and named variables with
   * + - * / ^, unary minus and parentheses. Exponents must be non-negative
   * integer constants.
   */
  class Expression {
  public:
    enum class Op : std::uint8_t { literal, variable, neg, add, sub, mul, div, pow };

    struct Node {
      Op op;
      std::uint32_t a = 0, b = 0;  // children
      std::uint64_t small = 0;     // variable index, exponent, or literal below 2^64
      bool big = false;            // literal stored in bigs_[small]
    };

    /// Variables must be listed in vars.
    static Expression parse(std::string_view text, const std::vector<std::string>& vars);
    /// Identifiers in text, sorted naturally (z2 before z10).
    static std::vector<std::string> collect_variables(std::string_view text);

    std::size_t num_vars() const { return vars_.size(); }
    const std::vector<std::string>& variables() const { return vars_; }

    /// Value in the current prime field; division by zero gives 0.
    FFInt evaluate(std::span<const FFInt> x) const;
    /// Exact value, or nothing on division by zero.
    std::optional<Rational> evaluate(std::span<const Rational> x) const;

    /// Expanded numerator and denominator, without cancellation of common factors.
    QRationalFunction expand() const;

    /// Rendering with minimal parentheses; parsing it gives the same tree.
    std::string to_string() const;

  private:
    FFInt eval_ff(std::uint32_t i, std::span<const FFInt> x) const;
    std::optional<Rational> eval_q(std::uint32_t i, std::span<const Rational> x) const;
    QRationalFunction expand(std::uint32_t i) const;
    void render(std::uint32_t i, std::string& out) const;

    friend class ExprParser;

    std::vector<std::string> vars_;
    std::vector<Node> nodes_;
    std::vector<mpz_class> bigs_;
    std::uint32_t root_ = 0;
  };

  /// Black box evaluating one expression per function.
  class ExpressionBox : public BlackBox {
  public:
    explicit ExpressionBox(std::vector<Expression> exprs);

    std::size_t num_vars() const override { return n_; }
    std::size_t num_functions() const override { return exprs_.size(); }
    std::vector<FFInt> evaluate(std::span<const FFInt> x) const override;

  private:
    std::vector<Expression> exprs_;
    std::size_t n_;
  };

}
