#include "finrec/zippel.hpp"

#include <algorithm>

#include "finrec/errors.hpp"
#include "finrec/linalg.hpp"

namespace finrec {

  ZippelReconst::ZippelReconst(std::vector<FFInt> anchors, ZippelOptions opts)
      : anchors_(std::move(anchors)), opts_(opts), result_(anchors_.size()) {
    if (anchors_.empty()) return;
    Term t{MultiIndex{}, FFInt(1), NewtonState(opts_.eta, opts_.degree_bound)};
    terms_.push_back(std::move(t));
  }

  std::vector<ZOrder> ZippelReconst::step_orders() const {
    const std::size_t m = anchors_.size();
    if (done_) return {};
    if (m == 0) return {ZOrder{}};
    if (stage_ == 0) {
      ZOrder o(m, 1);
      o[0] = step_;
      return {o};
    }
    std::vector<ZOrder> orders;
    orders.reserve(system_.size());
    for (std::uint32_t k = 1; k <= system_.size(); ++k) {
      ZOrder o(m, 1);
      for (std::size_t i = 0; i < stage_; ++i) o[i] = k;
      o[stage_] = step_;
      orders.push_back(std::move(o));
    }
    return orders;
  }

  std::vector<ZOrder> ZippelReconst::needed() const {
    std::vector<ZOrder> out;
    for (auto& o : step_orders()) {
      if (!values_.contains(o)) out.push_back(std::move(o));
    }
    return out;
  }

  bool ZippelReconst::feed(const ZOrder& order, FFInt value) {
    if (done_ || order.size() != anchors_.size()) return false;
    const std::size_t m = anchors_.size();
    if (m > 0) {
      if (order[stage_] != step_) return false;
      for (std::size_t i = stage_ + 1; i < m; ++i) {
        if (order[i] != 1) return false;
      }
      if (stage_ > 0) {
        std::uint32_t k = order[0];
        if (k < 1 || k > system_.size()) return false;
        for (std::size_t i = 1; i < stage_; ++i) {
          if (order[i] != k) return false;
        }
      }
    }
    values_[order] = value;
    return true;
  }

  bool ZippelReconst::advance() {
    bool changed = false;
    while (!done_) {
      auto orders = step_orders();
      bool complete = std::all_of(orders.begin(), orders.end(),
                                  [&](const ZOrder& o) { return values_.contains(o); });
      if (!complete) break;
      process_step();
      changed = true;
    }
    return changed;
  }

  void ZippelReconst::process_step() {
    const std::size_t m = anchors_.size();
    if (m == 0) {
      result_ = FFPolynomial(0);
      result_.add_term(MultiIndex{}, values_.begin()->second);
      values_.clear();
      done_ = true;
      return;
    }

    const FFInt y = anchors_[stage_].pow(step_);
    if (stage_ == 0) {
      terms_[0].newton.feed(y, values_.begin()->second);
      values_.clear();
      if (terms_[0].newton.done()) {
        terms_[0].finished = true;
        finish_stage();
      } else {
        ++step_;
      }
      return;
    }

    auto orders = step_orders();
    const std::size_t rows = orders.size();
    std::vector<FFInt> rhs(rows);
    for (std::size_t k = 0; k < rows; ++k) rhs[k] = values_.at(orders[k]);
    values_.clear();

    // remove the contributions of terms pruned from the system
    std::vector<bool> in_system(terms_.size(), false);
    for (auto idx : system_) in_system[idx] = true;
    for (std::size_t idx = 0; idx < terms_.size(); ++idx) {
      if (in_system[idx]) continue;
      FFInt c = terms_[idx].newton.evaluate(y);
      if (c.is_zero()) continue;
      FFInt vk = terms_[idx].v;
      for (std::size_t k = 0; k < rows; ++k) {
        rhs[k] -= c * vk;
        vk *= terms_[idx].v;
      }
    }

    std::vector<FFInt> vs;
    vs.reserve(system_.size());
    for (auto idx : system_) vs.push_back(terms_[idx].v);
    auto coefs = solve_shifted_vandermonde(vs, rhs);
    for (std::size_t i = 0; i < system_.size(); ++i) {
      Term& t = terms_[system_[i]];
      if (t.finished) continue;
      t.newton.feed(y, coefs[i]);
      if (t.newton.done()) t.finished = true;
    }

    if (std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.finished; })) {
      finish_stage();
      return;
    }
    ++step_;
    if (opts_.temporary_pruning) {
      system_.clear();
      for (std::size_t idx = 0; idx < terms_.size(); ++idx) {
        if (!terms_[idx].finished) system_.push_back(idx);
      }
    }
  }

  void ZippelReconst::finish_stage() {
    std::vector<std::pair<MultiIndex, FFInt>> coefs;
    for (const Term& t : terms_) {
      auto canon = t.newton.to_canonical();
      for (std::uint32_t e = 0; e < canon.size(); ++e) {
        if (canon[e].is_zero()) continue;
        MultiIndex a = t.alpha;
        a.push_back(e);
        coefs.emplace_back(std::move(a), canon[e]);
      }
    }
    if (stage_ + 1 == anchors_.size()) {
      result_ = FFPolynomial(anchors_.size());
      for (const auto& [a, c] : coefs) result_.add_term(a, c);
      terms_.clear();
      system_.clear();
      done_ = true;
      return;
    }
    start_stage(stage_ + 1, coefs);
  }

  void ZippelReconst::start_stage(std::size_t s, const std::vector<std::pair<MultiIndex, FFInt>>& coefs) {
    stage_ = s;
    step_ = 2;
    terms_.clear();
    system_.clear();
    if (coefs.empty()) {
      result_ = FFPolynomial(anchors_.size());
      done_ = true;
      return;
    }
    const FFInt y = anchors_[s];
    for (const auto& [alpha, c] : coefs) {
      FFInt v(1);
      for (std::size_t i = 0; i < s; ++i) v *= anchors_[i].pow(alpha[i]);
      std::optional<std::uint32_t> bound;
      if (opts_.degree_bound) {
        auto d = total_degree(alpha);
        bound = d >= *opts_.degree_bound ? 0 : *opts_.degree_bound - d;
      }
      Term t{alpha, v, NewtonState(opts_.eta, bound)};
      t.newton.feed(y, c);
      t.finished = t.newton.done();
      terms_.push_back(std::move(t));
    }

    std::vector<std::uint64_t> vs;
    for (const Term& t : terms_) vs.push_back(t.v.value());
    std::sort(vs.begin(), vs.end());
    if (std::adjacent_find(vs.begin(), vs.end()) != vs.end()) {
      throw SingularSystem("coincident monomial evaluations at the anchor point");
    }

    for (std::size_t idx = 0; idx < terms_.size(); ++idx) {
      if (!opts_.temporary_pruning || !terms_[idx].finished) system_.push_back(idx);
    }
    if (std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.finished; })) {
      finish_stage();
    }
  }

  ZippelResult zippel_interpolate(const FieldFunction& f, std::span<const FFInt> anchors, ZippelOptions opts) {
    ZippelReconst z(std::vector<FFInt>(anchors.begin(), anchors.end()), opts);
    ZippelResult out;
    std::vector<FFInt> point(anchors.size());
    while (!z.done()) {
      for (const ZOrder& o : z.needed()) {
        for (std::size_t i = 0; i < o.size(); ++i) point[i] = anchors[i].pow(o[i]);
        z.feed(o, f(point));
        ++out.probes;
      }
      z.advance();
    }
    out.polynomial = z.result();
    return out;
  }

  Rational newton_success_bound(std::uint64_t degree, unsigned eta, std::uint64_t p) {
    mpz_class num = 1, den = 1;
    for (unsigned i = 0; i < eta; ++i) {
      num *= static_cast<unsigned long>(degree);
      den *= static_cast<unsigned long>(p);
    }
    num *= static_cast<unsigned long>(degree + 1);
    return Rational(1) - Rational(num, den);
  }

  Rational zippel_failure_bound(std::uint64_t n, std::uint64_t degree, std::uint64_t terms, std::uint64_t p) {
    mpz_class num = static_cast<unsigned long>(n);
    num *= static_cast<unsigned long>(degree);
    num *= static_cast<unsigned long>(degree);
    num *= static_cast<unsigned long>(terms);
    num *= static_cast<unsigned long>(terms);
    return Rational(num, mpz_class(static_cast<unsigned long>(p)));
  }

}
