#include "finrec/ratint.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "finrec/errors.hpp"
#include "finrec/linalg.hpp"

namespace finrec {

  std::uint64_t mix_hash(std::uint64_t h, std::uint64_t v) {
    // splitmix64 finalizer over the running state
    std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // ---------------------------------------------------------------- geometry

  ProbeGeometry::ProbeGeometry(std::size_t n, std::vector<std::size_t> order, const std::vector<FFInt>& shift,
                               std::vector<FFInt> anchors, std::uint64_t seed)
      : n_(n), order_(std::move(order)), anchors_(std::move(anchors)), seed_(seed) {
    if (n_ == 0) throw std::invalid_argument("rational interpolation needs at least one variable");
    if (order_.empty()) {
      order_.resize(n_);
      std::iota(order_.begin(), order_.end(), std::size_t{0});
    }
    std::vector<std::size_t> check(order_);
    std::sort(check.begin(), check.end());
    for (std::size_t i = 0; i < n_; ++i) {
      if (check.size() != n_ || check[i] != i) throw std::invalid_argument("variable order is not a permutation");
    }
    shift_.assign(n_, FFInt());
    if (!shift.empty()) {
      if (shift.size() != n_) throw std::invalid_argument("shift size mismatch");
      for (std::size_t i = 0; i < n_; ++i) shift_[i] = shift[order_[i]];
    }
    shifted_ = std::any_of(shift_.begin(), shift_.end(), [](FFInt s) { return !s.is_zero(); });
    if (anchors_.empty()) {
      std::mt19937_64 rng(mix_hash(seed_, FFInt::prime()));
      std::uniform_int_distribution<std::uint64_t> dist(2, FFInt::prime() - 1);
      for (std::size_t i = 1; i < n_; ++i) anchors_.push_back(FFInt::from_reduced(dist(rng)));
    }
    if (anchors_.size() != n_ - 1) throw std::invalid_argument("anchor count must be n - 1");
  }

  FFInt ProbeGeometry::t_value(const ZOrder& o, std::uint32_t index) const {
    std::uint64_t h = mix_hash(seed_, FFInt::prime());
    for (auto e : o) h = mix_hash(h, e);
    FFInt a(mix_hash(h, 1)), b(mix_hash(h, 2));
    if (b.is_zero()) b = FFInt(1);
    return a + FFInt(static_cast<std::uint64_t>(index)) * b;
  }

  std::vector<FFInt> ProbeGeometry::direction(const ZOrder& o) const {
    std::vector<FFInt> x(n_);
    x[0] = FFInt(1);
    for (std::size_t i = 1; i < n_; ++i) x[i] = anchors_[i - 1].pow(o[i - 1]);
    return x;
  }

  std::vector<FFInt> ProbeGeometry::point(const ProbeRequest& req) const {
    auto x = direction(req.zorder);
    FFInt t = t_value(req.zorder, req.t_index);
    std::vector<FFInt> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[order_[i]] = t * x[i] + shift_[i];
    return out;
  }

  FFPolynomial ProbeGeometry::to_user(const FFPolynomial& p) const {
    FFPolynomial out(n_);
    for (const auto& [alpha, c] : p.terms()) {
      MultiIndex a(n_);
      for (std::size_t i = 0; i < n_; ++i) a[order_[i]] = alpha[i];
      out.add_term(a, c);
    }
    return out;
  }

  // ---------------------------------------------------------------- Thiele run

  std::optional<ProbeRequest> ThieleRun::needed(const ProbeGeometry& g) const {
    if (state_.done()) return std::nullopt;
    return ProbeRequest{g.ones(), next_};
  }

  void ThieleRun::feed(const ProbeGeometry& g, const ProbeRequest& req, FFInt value) {
    if (state_.done() || req.t_index != next_ || req.zorder != g.ones()) return;
    ++next_;
    ++probes_;
    try {
      state_.feed(g.t_value(req.zorder, req.t_index), value);
    } catch (const UnluckyZero&) {
      if (++retries_ > budget_) throw;
      state_ = ThieleState();
    }
  }

  DegreeCheck degree_check(const UniRational& form) {
    DegreeCheck d;
    d.num_degree = form.numerator.empty() ? 0 : static_cast<std::uint32_t>(form.numerator.size() - 1);
    d.den_degree = form.denominator.empty() ? 0 : static_cast<std::uint32_t>(form.denominator.size() - 1);
    d.has_constant = (!form.denominator.empty() && !form.denominator[0].is_zero()) ||
                     (!form.numerator.empty() && !form.numerator[0].is_zero());
    return d;
  }

  // ---------------------------------------------------------------- RatInterp

  RatInterp::RatInterp(std::size_t n, RatInterpOptions opts)
      : n_(n), opts_(std::move(opts)),
        geom_(n, opts_.order, opts_.shift, opts_.anchors, opts_.seed), thiele_(opts_.retry_budget) {}

  std::size_t RatInterp::unsolved() const {
    return static_cast<std::size_t>(
        std::count_if(degrees_.begin(), degrees_.end(), [](const Degree& d) { return !d.solved; }));
  }

  bool RatInterp::active(std::size_t idx) const {
    const Degree& d = degrees_[idx];
    if (d.solved) return false;
    if (!geom_.shifted()) return true;
    for (const Degree& e : degrees_) {
      if (e.side == d.side && !e.solved && e.r > d.r) return false;
    }
    return true;
  }

  std::vector<ProbeRequest> RatInterp::needed() const {
    std::vector<ProbeRequest> out;
    if (done_) return out;
    if (!setup_) {
      if (auto r = thiele_.needed(geom_)) out.push_back(*r);
      return out;
    }
    std::set<ZOrder> orders;
    for (std::size_t i = 0; i < degrees_.size(); ++i) {
      if (!active(i)) continue;
      for (auto& o : degrees_[i].zippel.needed()) {
        if (!stored_.contains(o)) orders.insert(o);
      }
    }
    const auto k = static_cast<std::uint32_t>(unsolved());
    for (const auto& o : orders) {
      auto it = pending_.find(o);
      for (std::uint32_t j = 0; j < k; ++j) {
        if (it == pending_.end() || !it->second.contains(j)) out.push_back({o, j});
      }
    }
    return out;
  }

  void RatInterp::feed(const ProbeRequest& req, FFInt value) {
    if (done_) return;
    if (!setup_) {
      std::size_t before = thiele_.probes();
      thiele_.feed(geom_, req, value);
      probes_ += thiele_.probes() - before;
      return;
    }
    if (stored_.contains(req.zorder)) return;
    if (pending_[req.zorder].try_emplace(req.t_index, value).second) ++probes_;
  }

  void RatInterp::advance() {
    if (done_) return;
    if (!setup_) {
      if (!thiele_.done()) return;
      setup_degrees();
    }
    while (solve_systems() || feed_degrees()) {
    }
    if (unsolved() == 0) finalize();
  }

  void RatInterp::setup_degrees() {
    first_ = thiele_.result();
    UniPoly& num = first_.numerator;
    UniPoly& den = first_.denominator;
    if (!den.empty() && !den[0].is_zero()) {
      norm_side_ = Side::denominator;
    } else if (!num.empty() && !num[0].is_zero()) {
      norm_side_ = Side::numerator;
      FFInt inv = num[0].inverse();
      for (auto& c : num) c *= inv;
      for (auto& c : den) c *= inv;
    } else {
      throw InconsistentProbes("no constant term in numerator or denominator; a shift is required");
    }

    const ZOrder ones = geom_.ones();
    auto& first_values = stored_[ones];
    auto add_side = [&](Side side, const UniPoly& coefs) {
      for (std::uint32_t r = 0; r < coefs.size(); ++r) {
        if (side == norm_side_ && r == 0) continue;
        // a shifted degree that vanishes is minus the shift effect of the higher ones
        if (coefs[r].is_zero()) continue;
        ZippelOptions zo;
        zo.degree_bound = r;
        degrees_.push_back(Degree{side, r, ZippelReconst(geom_.anchors(), zo), false, FFPolynomial(n_), {}});
        first_values[degrees_.size() - 1] = coefs[r];
      }
    };
    add_side(Side::numerator, num);
    add_side(Side::denominator, den);
    if (geom_.shifted()) {
      for (auto& acc : shift_acc_) acc.assign(max_degree() + 1, FFPolynomial(n_));
    }
    setup_ = true;
  }

  std::uint32_t RatInterp::max_degree() const {
    return static_cast<std::uint32_t>(std::max(first_.numerator.size(), first_.denominator.size()));
  }

  FFInt RatInterp::correction(const Degree& d, const PowerTable& pw) const {
    const auto& acc = shift_acc_[static_cast<int>(d.side)];
    return d.r < acc.size() ? evaluate(acc[d.r], pw) : FFInt();
  }

  void RatInterp::mark_solved(Degree& d) {
    d.solved = true;
    if (!geom_.shifted()) return;
    auto& acc = shift_acc_[static_cast<int>(d.side)];
    for (auto& [r, bucket] : shift_subtraction(d.poly, std::span<const FFInt>(geom_.shift()))) {
      if (r >= acc.size()) continue;
      acc[r] += bucket;
    }
  }

  bool RatInterp::solve_systems() {
    bool changed = false;
    const std::size_t k = unsolved();
    for (auto it = pending_.begin(); it != pending_.end();) {
      if (it->second.size() < k) {
        ++it;
        continue;
      }
      const ZOrder& o = it->first;
      PowerTable pw(geom_.direction(o), max_degree());
      std::vector<std::size_t> unknown;
      // known t-coefficients per side, including the normalizer
      UniPoly known[2] = {UniPoly(max_degree() + 1), UniPoly(max_degree() + 1)};
      known[static_cast<int>(norm_side_)][0] = FFInt(1);
      for (std::size_t i = 0; i < degrees_.size(); ++i) {
        const Degree& d = degrees_[i];
        if (!d.solved) {
          unknown.push_back(i);
        } else {
          known[static_cast<int>(d.side)][d.r] = evaluate(d.poly, pw) + correction(d, pw);
        }
      }

      FFMatrix a(k, k);
      std::vector<FFInt> b(k);
      std::size_t row = 0;
      for (const auto& [j, fval] : it->second) {
        if (row == k) break;
        FFInt t = geom_.t_value(o, j);
        for (std::size_t col = 0; col < k; ++col) {
          const Degree& d = degrees_[unknown[col]];
          FFInt tp = t.pow(d.r);
          a(row, col) = d.side == Side::numerator ? tp : -(fval * tp);
        }
        b[row] = fval * finrec::evaluate(known[1], t) - finrec::evaluate(known[0], t);
        ++row;
      }
      auto sol = solve_linear(std::move(a), std::move(b));
      if (!sol) throw SingularSystem("singular system in t");
      auto& dest = stored_[o];
      for (std::size_t col = 0; col < k; ++col) dest[unknown[col]] = (*sol)[col];
      it = pending_.erase(it);
      changed = true;
    }
    return changed;
  }

  bool RatInterp::feed_degrees() {
    bool changed = false;
    for (std::size_t i = 0; i < degrees_.size(); ++i) {
      if (!active(i)) continue;
      Degree& d = degrees_[i];
      bool fed = false;
      for (auto& o : d.zippel.needed()) {
        auto it = stored_.find(o);
        if (it == stored_.end()) continue;
        auto v = it->second.find(i);
        if (v == it->second.end()) throw InconsistentProbes("missing stored coefficient value");
        FFInt value = v->second;
        if (geom_.shifted()) value -= correction(d, PowerTable(geom_.direction(o), max_degree()));
        if (!d.first_value) d.first_value = value;
        d.zippel.feed(o, value);
        fed = true;
      }
      if (!fed) continue;
      d.zippel.advance();
      changed = true;
      if (!d.zippel.done()) continue;
      for (const auto& [alpha, c] : d.zippel.result().terms()) {
        auto low = total_degree(alpha);
        if (low > d.r) throw InconsistentProbes("coefficient exceeds its t-degree");
        MultiIndex full(n_);
        full[0] = d.r - low;
        std::copy(alpha.begin(), alpha.end(), full.begin() + 1);
        d.poly.add_term(full, c);
      }
      mark_solved(d);
    }
    return changed;
  }

  void RatInterp::finalize() {
    FFPolynomial side[2] = {FFPolynomial(n_), FFPolynomial(n_)};
    std::vector<bool> tracked[2] = {std::vector<bool>(max_degree() + 1), std::vector<bool>(max_degree() + 1)};
    for (const Degree& d : degrees_) {
      side[static_cast<int>(d.side)] += d.poly;
      tracked[static_cast<int>(d.side)][d.r] = true;
    }
    side[static_cast<int>(norm_side_)].add_term(MultiIndex(n_, 0), FFInt(1));
    tracked[static_cast<int>(norm_side_)][0] = true;
    for (int s = 0; s < 2; ++s) {
      const auto& acc = shift_acc_[s];
      for (std::uint32_t r = 0; r < acc.size(); ++r) {
        if (!tracked[s][r] || (s == static_cast<int>(norm_side_) && r == 0)) side[s] -= acc[r];
      }
    }
    result_.numerator = geom_.to_user(side[0]);
    result_.denominator = geom_.to_user(side[1]);
    done_ = true;
  }

  std::vector<RatInterp::DegreeInfo> RatInterp::degree_info() const {
    std::vector<DegreeInfo> out;
    for (const Degree& d : degrees_) {
      out.push_back({d.side, d.r, d.solved, geom_.to_user(d.poly), d.first_value.value_or(FFInt())});
    }
    return out;
  }

  RatInterpResult interpolate_rational(const FieldFunction& f, std::size_t n, RatInterpOptions opts) {
    RatInterp ri(n, std::move(opts));
    while (!ri.done()) {
      auto reqs = ri.needed();
      if (reqs.empty()) throw InconsistentProbes("interpolation stalled");
      for (const auto& r : reqs) ri.feed(r, f(ri.point(r)));
      ri.advance();
    }
    RatInterpResult out{ri.result(), ri.probes()};
    out.function.normalize();
    return out;
  }

  // ---------------------------------------------------------------- shift scan

  namespace {

    // next k-subset of {0..n-1} in the scan order, walking positions from the last variable
    bool next_subset(std::vector<std::size_t>& pos, std::size_t n) {
      const std::size_t k = pos.size();
      for (std::size_t i = k; i-- > 0;) {
        if (pos[i] < n - k + i) {
          ++pos[i];
          for (std::size_t j = i + 1; j < k; ++j) pos[j] = pos[j - 1] + 1;
          return true;
        }
      }
      return false;
    }

    std::vector<bool> pattern_of(const std::vector<std::size_t>& pos, std::size_t n) {
      // position p counts variables from the last one backwards
      std::vector<bool> pat(n, false);
      for (auto p : pos) pat[n - 1 - p] = true;
      return pat;
    }

    template <class Visit>
    void for_each_candidate(std::size_t n, Visit&& visit) {
      for (std::size_t k = 0; k <= n; ++k) {
        std::vector<std::size_t> pos(k);
        std::iota(pos.begin(), pos.end(), std::size_t{0});
        do {
          if (!visit(pattern_of(pos, n))) return;
        } while (k > 0 && next_subset(pos, n));
      }
    }

  }

  std::vector<std::vector<bool>> shift_candidates(std::size_t n, std::size_t limit) {
    std::vector<std::vector<bool>> out;
    for_each_candidate(n, [&](std::vector<bool> p) {
      out.push_back(std::move(p));
      return out.size() < limit;
    });
    return out;
  }

  std::vector<FFInt> make_shift(const std::vector<bool>& pattern, std::uint64_t seed) {
    std::mt19937_64 rng(mix_hash(seed, 0x5851f42d4c957f2dULL));
    std::uniform_int_distribution<std::uint64_t> dist(1, 1u << 16);
    std::set<std::uint64_t> used;
    std::vector<FFInt> out(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      std::uint64_t v;
      do {
        v = dist(rng);
      } while (!used.insert(v).second);
      if (pattern[i]) out[i] = FFInt(v);
    }
    return out;
  }

  ShiftScanState::ShiftScanState(std::size_t n, std::vector<std::size_t> order, std::uint64_t seed,
                                 std::vector<FFInt> anchors)
      : n_(n), order_(std::move(order)), seed_(seed), anchors_(std::move(anchors)) {
    start(std::vector<bool>(n_, true));
  }

  void ShiftScanState::start(const std::vector<bool>& pattern) {
    pattern_ = pattern;
    geom_ = ProbeGeometry(n_, order_, make_shift(pattern, seed_), anchors_, seed_);
    run_ = ThieleRun();
  }

  bool ShiftScanState::next_candidate() {
    const std::size_t k = pos_.size();
    if (candidate_ == 0) {
      pos_.clear();
    } else if (k == 0 || !next_subset(pos_, n_)) {
      if (k + 1 >= n_) return false;  // the full pattern is the baseline itself
      pos_.resize(k + 1);
      std::iota(pos_.begin(), pos_.end(), std::size_t{0});
    }
    ++candidate_;
    start(pattern_of(pos_, n_));
    return true;
  }

  std::optional<ProbeRequest> ShiftScanState::needed() const {
    if (done_) return std::nullopt;
    return run_.needed(geom_);
  }

  void ShiftScanState::feed(const ProbeRequest& req, FFInt value) {
    if (done_) return;
    std::size_t before = run_.probes();
    try {
      run_.feed(geom_, req, value);
    } catch (const UnluckyZero&) {
      if (candidate_ == 0) throw;
      // give up on this candidate
      probes_ += run_.probes() - before;
      if (!next_candidate()) {
        result_.assign(n_, true);
        done_ = true;
      }
      return;
    }
    probes_ += run_.probes() - before;
  }

  void ShiftScanState::advance() {
    if (done_ || !run_.done()) return;
    DegreeCheck d = degree_check(run_.result());
    if (candidate_ == 0) {
      target_ = d;
      baseline_probes_ = probes_;
    } else if (d.has_constant && d.num_degree == target_.num_degree && d.den_degree == target_.den_degree) {
      result_ = pattern_;
      done_ = true;
      return;
    }
    if (!next_candidate()) {
      result_.assign(n_, true);
      done_ = true;
    }
  }

  ShiftScanResult shift_scan(const FieldFunction& f, std::size_t n, std::uint64_t seed,
                             std::vector<std::size_t> order) {
    ShiftScanState st(n, std::move(order), seed);
    while (!st.done()) {
      auto req = st.needed();
      st.feed(*req, f(st.point(*req)));
      st.advance();
    }
    return {st.result(), st.probes(), st.baseline_probes()};
  }

}
