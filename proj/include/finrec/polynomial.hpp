#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "finrec/ffield.hpp"
#include "finrec/rational.hpp"

namespace finrec {

  using MultiIndex = std::vector<std::uint32_t>;

  inline std::uint32_t total_degree(const MultiIndex& a) {
    return std::accumulate(a.begin(), a.end(), std::uint32_t{0});
  }

  /// Colexicographic order: the last differing position decides.
  inline bool colex_less(const MultiIndex& a, const MultiIndex& b) {
    for (std::size_t i = a.size(); i-- > 0;) {
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  }

  /// Total degree first, colex within a degree.
  struct DegColexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
      auto da = total_degree(a), db = total_degree(b);
      if (da != db) return da < db;
      return colex_less(a, b);
    }
  };

  template <class C>
  class SparsePolynomial {
  public:
    using Terms = std::map<MultiIndex, C, DegColexLess>;

    SparsePolynomial() = default;
    explicit SparsePolynomial(std::size_t nvars) : nvars_(nvars) {}

    static SparsePolynomial constant(std::size_t nvars, const C& c) {
      SparsePolynomial p(nvars);
      p.add_term(MultiIndex(nvars, 0), c);
      return p;
    }

    std::size_t num_vars() const { return nvars_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    /// Adds c * z^alpha, dropping the term if it cancels.
    void add_term(const MultiIndex& alpha, const C& c) {
      if (alpha.size() != nvars_) throw std::invalid_argument("multi-index length mismatch");
      if (c.is_zero()) return;
      auto [it, inserted] = terms_.try_emplace(alpha, c);
      if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
      }
    }

    C coefficient(const MultiIndex& alpha) const {
      auto it = terms_.find(alpha);
      return it == terms_.end() ? C(0) : it->second;
    }

    std::uint32_t degree() const {
      std::uint32_t d = 0;
      for (const auto& [a, c] : terms_) d = std::max(d, total_degree(a));
      return d;
    }

    C evaluate(std::span<const C> values) const {
      C result(0);
      for (const auto& [alpha, c] : terms_) {
        C term = c;
        for (std::size_t i = 0; i < nvars_; ++i) {
          for (std::uint32_t e = 0; e < alpha[i]; ++e) term *= values[i];
        }
        result += term;
      }
      return result;
    }

    SparsePolynomial& operator+=(const SparsePolynomial& b) {
      for (const auto& [a, c] : b.terms_) add_term(a, c);
      return *this;
    }
    SparsePolynomial& operator-=(const SparsePolynomial& b) {
      for (const auto& [a, c] : b.terms_) add_term(a, -c);
      return *this;
    }
    SparsePolynomial& operator*=(const C& s) {
      if (s.is_zero()) {
        terms_.clear();
        return *this;
      }
      for (auto& [a, c] : terms_) c *= s;
      return *this;
    }
    friend SparsePolynomial operator+(SparsePolynomial a, const SparsePolynomial& b) { return a += b; }
    friend SparsePolynomial operator-(SparsePolynomial a, const SparsePolynomial& b) { return a -= b; }
    friend SparsePolynomial operator*(SparsePolynomial a, const C& s) { return a *= s; }
    friend SparsePolynomial operator*(const SparsePolynomial& a, const SparsePolynomial& b) {
      SparsePolynomial r(a.nvars_);
      for (const auto& [x, cx] : a.terms_) {
        for (const auto& [y, cy] : b.terms_) {
          MultiIndex z(x);
          for (std::size_t i = 0; i < z.size(); ++i) z[i] += y[i];
          r.add_term(z, cx * cy);
        }
      }
      return r;
    }
    friend bool operator==(const SparsePolynomial& a, const SparsePolynomial& b) {
      return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

    /**
     * Renders as `c*z1^a1*...*zn^an` terms joined by `+`/`-`, ascending in
     * degree then colex. Unit coefficients and exponents are omitted.
     */
    std::string to_string(const std::vector<std::string>& vars) const;
    std::string to_string() const {
      std::vector<std::string> vars;
      for (std::size_t i = 0; i < nvars_; ++i) vars.push_back("z" + std::to_string(i + 1));
      return to_string(vars);
    }

  private:
    std::size_t nvars_ = 0;
    Terms terms_;
  };

  namespace detail {
    inline bool is_negative(const FFInt&) { return false; }
    inline bool is_negative(const Rational& r) { return r.numerator() < 0; }
    inline bool is_one(const FFInt& c) { return c.value() == 1; }
    inline bool is_one(const Rational& r) { return r.numerator() == 1 && r.denominator() == 1; }
    inline std::string coef_str(const FFInt& c) { return std::to_string(c.value()); }
    inline std::string coef_str(const Rational& r) { return r.str(); }
  }

  template <class C>
  std::string SparsePolynomial<C>::to_string(const std::vector<std::string>& vars) const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [alpha, c] : terms_) {
      bool neg = detail::is_negative(c);
      C mag = neg ? -c : c;
      if (neg) {
        out << "-";
      } else if (!first) {
        out << "+";
      }
      first = false;
      bool constant = total_degree(alpha) == 0;
      bool wrote = false;
      if (constant || !detail::is_one(mag)) {
        out << detail::coef_str(mag);
        wrote = true;
      }
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] == 0) continue;
        if (wrote) out << "*";
        out << vars.at(i);
        if (alpha[i] > 1) out << "^" << alpha[i];
        wrote = true;
      }
    }
    return out.str();
  }

  using FFPolynomial = SparsePolynomial<FFInt>;
  using QPolynomial = SparsePolynomial<Rational>;

  /// Reduces every coefficient into the current prime field.
  FFPolynomial reduce(const QPolynomial& p);

}

namespace finrec {

  /// Powers x_i^e for e <= max degree, for repeated evaluation at one point.
  class PowerTable {
  public:
    PowerTable(std::span<const FFInt> x, std::uint32_t max_degree)
        : n_(x.size()), stride_(max_degree + 1), x_(x.begin(), x.end()), table_(n_ * stride_) {
      for (std::size_t i = 0; i < n_; ++i) {
        FFInt v(1);
        for (std::uint32_t e = 0; e <= max_degree; ++e) {
          table_[i * stride_ + e] = v;
          v *= x[i];
        }
      }
    }
    FFInt operator()(std::size_t i, std::uint32_t e) const {
      return e < stride_ ? table_[i * stride_ + e] : x_[i].pow(e);
    }
    std::uint32_t max_degree() const { return static_cast<std::uint32_t>(stride_ - 1); }

  private:
    std::size_t n_, stride_;
    std::vector<FFInt> x_;
    std::vector<FFInt> table_;
  };

  inline FFInt evaluate(const FFPolynomial& p, const PowerTable& pw) {
    FFInt sum;
    for (const auto& [alpha, c] : p.terms()) {
      FFInt term = c;
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] != 0) term *= pw(i, alpha[i]);
      }
      sum += term;
    }
    return sum;
  }

}
