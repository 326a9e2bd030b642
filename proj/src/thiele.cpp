#include "finrec/thiele.hpp"

#include <stdexcept>

#include "finrec/errors.hpp"

namespace finrec {

  FFInt evaluate(const UniPoly& p, FFInt t) {
    FFInt r;
    for (std::size_t k = p.size(); k-- > 0;) r = r * t + p[k];
    return r;
  }

  void trim(UniPoly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
  }

  namespace {

    // a = q * b + r; returns r and writes q
    UniPoly poly_divmod(UniPoly a, const UniPoly& b, UniPoly* q) {
      trim(a);
      if (b.empty()) throw std::domain_error("polynomial division by zero");
      FFInt lead = b.back().inverse();
      if (q) q->assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, FFInt());
      while (a.size() >= b.size()) {
        FFInt f = a.back() * lead;
        std::size_t shift = a.size() - b.size();
        if (q) (*q)[shift] = f;
        for (std::size_t k = 0; k < b.size(); ++k) a[shift + k] -= f * b[k];
        a.pop_back();
        trim(a);
      }
      return a;
    }

  }

  UniPoly poly_gcd(UniPoly a, UniPoly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
      UniPoly r = poly_divmod(a, b, nullptr);
      a = std::move(b);
      b = std::move(r);
    }
    if (!a.empty()) {
      FFInt inv = a.back().inverse();
      for (auto& c : a) c *= inv;
    }
    return a;
  }

  UniPoly poly_div(const UniPoly& a, const UniPoly& b) {
    UniPoly q;
    if (!poly_divmod(a, b, &q).empty()) throw std::domain_error("inexact polynomial division");
    trim(q);
    return q;
  }

  bool ThieleState::feed(FFInt t, FFInt value) {
    if (done_) return true;
    for (FFInt prev : ts_) {
      if (prev == t) throw CoincidentPoints("repeated Thiele interpolation point");
    }
    ++probes_;
    if (!bs_.empty()) {
      // the continued fraction at t as a projective pair p / q
      FFInt p = bs_.back(), q(1);
      for (std::size_t j = bs_.size() - 1; j-- > 0;) {
        FFInt np = bs_[j] * p + (t - ts_[j]) * q;
        q = p;
        p = np;
      }
      if (!q.is_zero() && p == value * q) {
        done_ = true;
        return true;
      }
    }
    // reciprocal differences
    FFInt b = value;
    for (std::size_t j = 0; j < bs_.size(); ++j) {
      FFInt diff = b - bs_[j];
      if (diff.is_zero()) throw UnluckyZero("vanishing reciprocal difference");
      b = (t - ts_[j]) / diff;
    }
    ts_.push_back(t);
    bs_.push_back(b);
    return false;
  }

  UniRational ThieleState::to_rational() const {
    UniRational out;
    if (bs_.empty()) {
      out.denominator = {FFInt(1)};
      return out;
    }
    // fold from the innermost level: value_j = b_j + (t - t_j) / value_{j+1}
    UniPoly num{bs_.back()}, den{FFInt(1)};
    for (std::size_t j = bs_.size() - 1; j-- > 0;) {
      UniPoly next(std::max(num.size(), den.size() + 1));
      for (std::size_t k = 0; k < num.size(); ++k) next[k] += bs_[j] * num[k];
      for (std::size_t k = 0; k < den.size(); ++k) {
        next[k + 1] += den[k];
        next[k] -= ts_[j] * den[k];
      }
      den = std::move(num);
      num = std::move(next);
    }
    trim(num);
    trim(den);
    UniPoly g = poly_gcd(num, den);
    if (g.size() > 1) {
      num = poly_div(num, g);
      den = poly_div(den, g);
    }
    std::size_t low = 0;
    while (low < den.size() && den[low].is_zero()) ++low;
    if (low == den.size()) throw UnluckyZero("vanishing Thiele denominator");
    FFInt inv = den[low].inverse();
    for (auto& c : num) c *= inv;
    for (auto& c : den) c *= inv;
    out.numerator = std::move(num);
    out.denominator = std::move(den);
    return out;
  }

}
