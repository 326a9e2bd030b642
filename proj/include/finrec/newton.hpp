#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "finrec/ffield.hpp"
#include "finrec/polynomial.hpp"

namespace finrec {

  /**
   * Univariate Newton interpolation with early termination.
   *
   * Coefficients are computed by divided differences and never change once
   * emitted. Interpolation is done when `eta` consecutive coefficients vanish,
   * or, given a degree bound D, after D + 1 points.
   */
  class NewtonState {
  public:
    explicit NewtonState(unsigned eta = 1, std::optional<std::uint32_t> degree_bound = std::nullopt)
        : eta_(eta), bound_(degree_bound) {}

    /// Adds f(y) = value. Returns done(). Throws CoincidentPoints on a repeated y.
    bool feed(FFInt y, FFInt value);
    bool done() const { return done_; }

    std::size_t points() const { return ys_.size(); }
    const std::vector<FFInt>& points_used() const { return ys_; }
    /// Newton coefficients a_0..a_k computed so far.
    const std::vector<FFInt>& newton_coefficients() const { return as_; }

    /// Dense coefficients c_0..c_D of the interpolated polynomial in z.
    std::vector<FFInt> to_canonical() const;
    FFInt evaluate(FFInt z) const;

  private:
    std::size_t significant_terms() const;

    unsigned eta_;
    std::optional<std::uint32_t> bound_;
    std::vector<FFInt> ys_;
    std::vector<FFInt> as_;
    unsigned zero_run_ = 0;
    bool done_ = false;
  };

  /// Black box over the current prime field.
  using FieldFunction = std::function<FFInt(std::span<const FFInt>)>;

  struct DenseNewtonResult {
    FFPolynomial polynomial;
    std::size_t probes = 0;
  };

  /**
   * Recursive dense multivariate Newton interpolation: each Newton coefficient
   * in z1 is itself interpolated in z2..zn. With a total degree bound every
   * univariate interpolation stops after at most bound + 1 points.
   */
  DenseNewtonResult dense_newton_interpolate(const FieldFunction& f, std::size_t n,
                                             std::span<const FFInt> anchors,
                                             std::optional<std::uint32_t> degree_bound = std::nullopt,
                                             unsigned eta = 1);

}
