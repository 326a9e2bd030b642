#pragma once

#include <utility>
#include <vector>

#include "finrec/ffield.hpp"

namespace finrec {

  /// Dense univariate polynomial, coefficient k belongs to t^k.
  using UniPoly = std::vector<FFInt>;

  /// Univariate rational function N(t)/D(t) with the lowest nonzero coefficient of D equal to 1.
  struct UniRational {
    UniPoly numerator;
    UniPoly denominator;
  };

  /**
   * Thiele continued-fraction interpolation
   *   f(t) = b_0 + (t - t_0) / (b_1 + (t - t_1) / (b_2 + ...)).
   *
   * A probe that the current fraction already reproduces ends the interpolation
   * and is not added as a point.
   */
  class ThieleState {
  public:
    /// Returns done(). Throws UnluckyZero or CoincidentPoints.
    bool feed(FFInt t, FFInt value);
    bool done() const { return done_; }
    /// Number of probes consumed, including the terminating one.
    std::size_t probes() const { return probes_; }
    const std::vector<FFInt>& coefficients() const { return bs_; }
    const std::vector<FFInt>& points() const { return ts_; }

    UniRational to_rational() const;

  private:
    std::vector<FFInt> ts_;
    std::vector<FFInt> bs_;
    std::size_t probes_ = 0;
    bool done_ = false;
  };

  FFInt evaluate(const UniPoly& p, FFInt t);
  /// Drops trailing zero coefficients.
  void trim(UniPoly& p);
  UniPoly poly_gcd(UniPoly a, UniPoly b);
  /// Exact division; the remainder must vanish.
  UniPoly poly_div(const UniPoly& a, const UniPoly& b);

}
