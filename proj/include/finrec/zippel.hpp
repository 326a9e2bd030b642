#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "finrec/ffield.hpp"
#include "finrec/newton.hpp"
#include "finrec/polynomial.hpp"
#include "finrec/rational.hpp"

namespace finrec {

  /// Per-variable anchor powers: variable i is evaluated at anchor_i^order[i].
  using ZOrder = std::vector<std::uint32_t>;

  struct ZippelOptions {
    bool temporary_pruning = true;
    /// Total degree bound; enables permanent pruning.
    std::optional<std::uint32_t> degree_bound;
    unsigned eta = 1;
  };

  /**
   * Zippel's sparse interpolation as a feed-driven state machine.
   *
   * Stage s interpolates variable s by univariate Newton interpolation of each
   * coefficient surviving stage s - 1. The values of those coefficients at
   * z_s = y_s^j come from a shifted transposed Vandermonde system built from
   * probes at the orders (k, ..., k, j, 1, ..., 1), k = 1..T. Callers query
   * needed(), supply each value through feed() and call advance().
   */
  class ZippelReconst {
  public:
    ZippelReconst(std::vector<FFInt> anchors, ZippelOptions opts = {});

    bool done() const { return done_; }
    std::size_t num_vars() const { return anchors_.size(); }
    std::size_t stage() const { return stage_; }

    /// Orders still missing for the current step.
    std::vector<ZOrder> needed() const;
    /// Stores a value if its order belongs to the current step.
    bool feed(const ZOrder& order, FFInt value);
    /// Processes complete steps. Returns true if anything changed.
    bool advance();

    /// Interpolated polynomial; only meaningful once done().
    const FFPolynomial& result() const { return result_; }

  private:
    struct Term {
      MultiIndex alpha;
      FFInt v;
      NewtonState newton;
      bool finished = false;
    };

    std::vector<ZOrder> step_orders() const;
    void start_stage(std::size_t s, const std::vector<std::pair<MultiIndex, FFInt>>& coefs);
    void finish_stage();
    void process_step();

    std::vector<FFInt> anchors_;
    ZippelOptions opts_;
    std::size_t stage_ = 0;
    std::uint32_t step_ = 1;
    std::vector<Term> terms_;
    std::vector<std::size_t> system_;  // indices of terms in the current Vandermonde system
    std::map<ZOrder, FFInt> values_;
    FFPolynomial result_;
    bool done_ = false;
  };

  struct ZippelResult {
    FFPolynomial polynomial;
    std::size_t probes = 0;
  };

  /// Runs Zippel's algorithm against a polynomial black box in n variables.
  ZippelResult zippel_interpolate(const FieldFunction& f, std::span<const FFInt> anchors,
                                  ZippelOptions opts = {});

  /// 1 - (D + 1) (D / p)^eta: lower bound on early-termination success.
  Rational newton_success_bound(std::uint64_t degree, unsigned eta, std::uint64_t p);
  /// n D^2 T^2 / p: upper bound on Zippel failure with random anchors.
  Rational zippel_failure_bound(std::uint64_t n, std::uint64_t degree, std::uint64_t terms, std::uint64_t p);

}
