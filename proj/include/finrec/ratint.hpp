#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "finrec/ffield.hpp"
#include "finrec/ratfunc.hpp"
#include "finrec/thiele.hpp"
#include "finrec/zippel.hpp"

namespace finrec {

  /// One black-box evaluation: anchor powers for z_2..z_n and the index of t.
  struct ProbeRequest {
    ZOrder zorder;
    std::uint32_t t_index = 0;
    auto operator<=>(const ProbeRequest&) const = default;
  };

  /**
   * Maps probe requests to points. Internally z_1 is fixed to 1 and the point is
   *   x = t (1, y_2^o_2, ..., y_n^o_n) + s,
   * with internal position i holding user variable order[i].
   */
  class ProbeGeometry {
  public:
    ProbeGeometry() = default;
    /// Empty anchors are drawn from the seed. The shift is in user order; empty means none.
    ProbeGeometry(std::size_t n, std::vector<std::size_t> order, const std::vector<FFInt>& shift,
                  std::vector<FFInt> anchors, std::uint64_t seed);

    std::size_t num_vars() const { return n_; }
    const std::vector<std::size_t>& order() const { return order_; }
    const std::vector<FFInt>& anchors() const { return anchors_; }
    /// Shift in internal order.
    const std::vector<FFInt>& shift() const { return shift_; }
    bool shifted() const { return shifted_; }
    std::uint64_t seed() const { return seed_; }

    /// t_k = a + k b with a, b derived from the seed, the prime and the z-order.
    FFInt t_value(const ZOrder& o, std::uint32_t index) const;
    /// (1, y^o) in internal order.
    std::vector<FFInt> direction(const ZOrder& o) const;
    /// Full black-box argument in user order.
    std::vector<FFInt> point(const ProbeRequest& req) const;
    ZOrder ones() const { return ZOrder(n_ == 0 ? 0 : n_ - 1, 1); }

    /// Internal-order polynomial to user order.
    FFPolynomial to_user(const FFPolynomial& p) const;

  private:
    std::size_t n_ = 0;
    std::vector<std::size_t> order_;
    std::vector<FFInt> shift_;
    std::vector<FFInt> anchors_;
    std::uint64_t seed_ = 0;
    bool shifted_ = false;
  };

  /// Thiele interpolation along t at the all-ones z-order, retrying with fresh t on unlucky zeros.
  class ThieleRun {
  public:
    explicit ThieleRun(unsigned retry_budget = 3) : budget_(retry_budget) {}

    bool done() const { return state_.done(); }
    std::optional<ProbeRequest> needed(const ProbeGeometry& g) const;
    /// Throws UnluckyZero once the retry budget is spent.
    void feed(const ProbeGeometry& g, const ProbeRequest& req, FFInt value);
    std::size_t probes() const { return probes_; }
    UniRational result() const { return state_.to_rational(); }

  private:
    ThieleState state_;
    std::uint32_t next_ = 0;
    unsigned budget_;
    unsigned retries_ = 0;
    std::size_t probes_ = 0;
  };

  struct RatInterpOptions {
    /// User order; empty means no shift.
    std::vector<FFInt> shift;
    /// order[i] is the user variable at internal position i; empty means identity.
    std::vector<std::size_t> order;
    /// Anchors of internal variables 2..n; empty means drawn from the seed.
    std::vector<FFInt> anchors;
    std::uint64_t seed = 0;
    unsigned retry_budget = 3;
  };

  enum class Side { numerator = 0, denominator = 1 };

  /**
   * Rational function interpolation in one prime field.
   *
   * Thiele along t fixes the t-degrees; each t-degree coefficient is then a
   * polynomial in z_2..z_n reconstructed by Zippel's algorithm with the
   * degree as bound. Values at further z-points come from small linear
   * systems in t. With a shift, degrees are solved from the top down and the
   * shift of every solved degree is subtracted from the lower ones.
   */
  class RatInterp {
  public:
    RatInterp(std::size_t n, RatInterpOptions opts);

    bool done() const { return done_; }
    std::vector<ProbeRequest> needed() const;
    std::vector<FFInt> point(const ProbeRequest& req) const { return geom_.point(req); }
    void feed(const ProbeRequest& req, FFInt value);
    /// Processes what the fed values allow. Throws UnluckyZero, SingularSystem, InconsistentProbes.
    void advance();

    std::size_t probes() const { return probes_; }
    std::size_t thiele_probes() const { return thiele_.probes(); }
    const ProbeGeometry& geometry() const { return geom_; }

    /// Result in user variable order, scaled so that f(s) has unit normalizer.
    const FFRationalFunction& result() const { return result_; }
    /// Thiele form at the first z-point, already normalized.
    const UniRational& first_form() const { return first_; }
    Side normalizer_side() const { return norm_side_; }

    struct DegreeInfo {
      Side side;
      std::uint32_t r;
      bool solved;
      FFPolynomial polynomial;  // homogenized, user order
      FFInt first_value;        // shift-corrected value at the first z-point
    };
    std::vector<DegreeInfo> degree_info() const;

  private:
    struct Degree {
      Side side;
      std::uint32_t r;
      ZippelReconst zippel;
      bool solved = false;
      FFPolynomial poly;  // homogenized, internal order
      std::optional<FFInt> first_value;
    };

    void setup_degrees();
    bool solve_systems();
    bool feed_degrees();
    bool active(std::size_t idx) const;
    std::size_t unsolved() const;
    std::uint32_t max_degree() const;
    FFInt correction(const Degree& d, const PowerTable& pw) const;
    void mark_solved(Degree& d);
    void finalize();

    std::size_t n_;
    RatInterpOptions opts_;
    ProbeGeometry geom_;
    ThieleRun thiele_;
    UniRational first_;
    Side norm_side_ = Side::denominator;
    std::vector<Degree> degrees_;
    std::map<ZOrder, std::map<std::size_t, FFInt>> stored_;
    std::map<ZOrder, std::map<std::uint32_t, FFInt>> pending_;
    std::vector<FFPolynomial> shift_acc_[2];  // shift effect of solved degrees, by t-degree
    std::size_t probes_ = 0;
    bool setup_ = false;
    bool done_ = false;
    FFRationalFunction result_;
  };

  struct RatInterpResult {
    FFRationalFunction function;
    std::size_t probes = 0;
  };

  /// Drives RatInterp against a black box in the current field. The result is normalized.
  RatInterpResult interpolate_rational(const FieldFunction& f, std::size_t n, RatInterpOptions opts);

  struct ShiftScanResult {
    std::vector<bool> shifted;  // user order
    std::size_t probes = 0;
    std::size_t baseline_probes = 0;
  };

  /// Candidate shifts in scan order: none, single variables from last to first, then pairs, ...
  std::vector<std::vector<bool>> shift_candidates(std::size_t n, std::size_t limit);

  /// Homogenized t-degrees of the Thiele form for a given shift pattern.
  struct DegreeCheck {
    std::uint32_t num_degree = 0, den_degree = 0;
    bool has_constant = false;
  };
  DegreeCheck degree_check(const UniRational& form);

  /// Draws distinct small nonzero shift values for the marked variables.
  std::vector<FFInt> make_shift(const std::vector<bool>& pattern, std::uint64_t seed);

  /**
   * Feed-driven shift scan. The first Thiele run shifts every variable and
   * fixes the target t-degrees; candidates follow in scan order until one
   * keeps those degrees and has a constant term.
   */
  class ShiftScanState {
  public:
    ShiftScanState(std::size_t n, std::vector<std::size_t> order, std::uint64_t seed, std::vector<FFInt> anchors = {});

    bool done() const { return done_; }
    /// Candidate 0 is the all-shifted baseline.
    std::uint32_t candidate() const { return candidate_; }
    std::optional<ProbeRequest> needed() const;
    std::vector<FFInt> point(const ProbeRequest& req) const { return geom_.point(req); }
    void feed(const ProbeRequest& req, FFInt value);
    void advance();

    const std::vector<bool>& result() const { return result_; }
    std::size_t probes() const { return probes_; }
    std::size_t baseline_probes() const { return baseline_probes_; }

  private:
    bool next_candidate();
    void start(const std::vector<bool>& pattern);

    std::size_t n_;
    std::vector<std::size_t> order_;
    std::uint64_t seed_;
    std::vector<FFInt> anchors_;
    ProbeGeometry geom_;
    ThieleRun run_;
    std::vector<bool> pattern_;
    std::vector<std::size_t> pos_;  // current subset, positions counted from the last variable
    std::uint32_t candidate_ = 0;
    DegreeCheck target_;
    std::vector<bool> result_;
    std::size_t probes_ = 0, baseline_probes_ = 0;
    bool done_ = false;
  };

  /// Finds a minimal set of shifted variables preserving the all-shifted degrees.
  ShiftScanResult shift_scan(const FieldFunction& f, std::size_t n, std::uint64_t seed,
                             std::vector<std::size_t> order = {});

  std::uint64_t mix_hash(std::uint64_t h, std::uint64_t v);

}
