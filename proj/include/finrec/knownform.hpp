#pragma once

#include <map>
#include <optional>
#include <vector>

#include "finrec/ratint.hpp"

namespace finrec {

  /// A coefficient of a rational function: side and exponent vector in user order.
  struct FormKey {
    Side side;
    MultiIndex alpha;
    auto operator<=>(const FormKey&) const = default;
  };

  struct KnownFormSpec {
    /// Every monomial of the form; known values are in the system normalization.
    std::map<FormKey, std::optional<FFInt>> coefficients;
    /// Side whose shifted constant is 1. Only used when the geometry carries a shift.
    Side norm_side = Side::denominator;
  };

  /**
   * Interpolation of a rational function whose monomials are known.
   *
   * Point k is the z-order (k, ..., k), so each t-degree with U unknown
   * monomials is a shifted Vandermonde system solved after U points. Without
   * a shift some t-degree must be fully known to fix the scale. With a shift,
   * t-degrees are solved from the top down and every coefficient is treated as
   * unknown.
   */
  class KnownFormInterp {
  public:
    KnownFormInterp(ProbeGeometry geom, KnownFormSpec spec);

    bool done() const { return done_; }
    std::vector<ProbeRequest> needed() const;
    std::vector<FFInt> point(const ProbeRequest& req) const { return geom_.point(req); }
    void feed(const ProbeRequest& req, FFInt value);
    /// Throws SingularSystem on degenerate systems.
    void advance();

    std::size_t probes() const { return probes_; }
    /// Number of unknowns at each point, index k - 1.
    const std::vector<std::size_t>& schedule() const { return schedule_; }
    /// All coefficients in the system normalization.
    const std::map<FormKey, FFInt>& result() const { return result_; }

  private:
    struct Degree {
      Side side;
      std::uint32_t r;
      std::vector<MultiIndex> unknown;  // internal order
      FFPolynomial known;               // internal order
      std::size_t solve_point = 0;
      std::vector<FFInt> values;        // t-coefficient at points 1..solve_point
      bool solved = false;
      FFPolynomial poly;
    };

    ZOrder order_of(std::size_t k) const { return ZOrder(geom_.num_vars() - 1, static_cast<std::uint32_t>(k)); }
    bool is_normalizer(const Degree& d) const;
    void solve_point(std::size_t k);
    void solve_degree(Degree& d);

    ProbeGeometry geom_;
    KnownFormSpec spec_;
    std::vector<Degree> degrees_;  // per side, descending in r
    std::vector<FFPolynomial> shift_acc_[2];
    std::vector<std::size_t> schedule_;
    std::map<std::size_t, std::map<std::uint32_t, FFInt>> pending_;
    std::size_t next_point_ = 1;
    std::uint32_t max_degree_ = 0;
    std::size_t probes_ = 0;
    bool done_ = false;
    std::map<FormKey, FFInt> result_;
  };

}
