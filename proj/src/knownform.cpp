#include "finrec/knownform.hpp"

#include <algorithm>

#include "finrec/errors.hpp"
#include "finrec/linalg.hpp"

namespace finrec {

  KnownFormInterp::KnownFormInterp(ProbeGeometry geom, KnownFormSpec spec)
      : geom_(std::move(geom)), spec_(std::move(spec)) {
    const std::size_t n = geom_.num_vars();
    const bool shifted = geom_.shifted();
    const auto& order = geom_.order();

    std::map<std::pair<int, std::uint32_t>, Degree> by_degree;
    std::uint32_t maxdeg[2] = {0, 0};
    bool present[2] = {false, false};
    for (const auto& [key, value] : spec_.coefficients) {
      MultiIndex internal(n);
      for (std::size_t i = 0; i < n; ++i) internal[i] = key.alpha[order[i]];
      const std::uint32_t r = total_degree(internal);
      const int s = static_cast<int>(key.side);
      maxdeg[s] = std::max(maxdeg[s], r);
      present[s] = true;
      auto [it, inserted] = by_degree.try_emplace({s, r});
      Degree& d = it->second;
      if (inserted) {
        d.side = key.side;
        d.r = r;
        d.known = FFPolynomial(n);
        d.poly = FFPolynomial(n);
      }
      if (shifted || !value) {
        d.unknown.push_back(internal);
      } else {
        d.known.add_term(internal, *value);
      }
    }
    max_degree_ = std::max(maxdeg[0], maxdeg[1]);

    if (shifted) {
      // every t-degree below the top carries shift effects, present in the form or not
      for (int s = 0; s < 2; ++s) {
        if (!present[s]) continue;
        for (std::uint32_t r = 0; r <= maxdeg[s]; ++r) {
          auto [it, inserted] = by_degree.try_emplace({s, r});
          if (inserted) {
            it->second.side = static_cast<Side>(s);
            it->second.r = r;
            it->second.known = FFPolynomial(n);
            it->second.poly = FFPolynomial(n);
          }
        }
        shift_acc_[s].assign(max_degree_ + 1, FFPolynomial(n));
      }
    }

    for (auto& [k, d] : by_degree) degrees_.push_back(std::move(d));
    std::sort(degrees_.begin(), degrees_.end(), [](const Degree& a, const Degree& b) {
      return a.side != b.side ? a.side < b.side : a.r > b.r;
    });
    if (shifted) {
      degrees_.erase(std::remove_if(degrees_.begin(), degrees_.end(),
                                    [&](const Degree& d) { return is_normalizer(d); }),
                     degrees_.end());
    }

    bool scale_fixed = shifted;
    std::size_t prev[2] = {0, 0};
    for (Degree& d : degrees_) {
      d.solve_point = d.unknown.size();
      if (shifted) {
        d.solve_point = std::max(d.solve_point, prev[static_cast<int>(d.side)]);
        prev[static_cast<int>(d.side)] = d.solve_point;
      }
      if (d.solve_point == 0) {
        d.solved = true;
        d.poly = d.known;
        if (!d.known.is_zero()) scale_fixed = true;
        if (shifted) {
          auto& acc = shift_acc_[static_cast<int>(d.side)];
          for (auto& [r, bucket] : shift_subtraction(d.poly, std::span<const FFInt>(geom_.shift()))) acc[r] += bucket;
        }
      }
    }
    if (!scale_fixed) throw std::invalid_argument("known form needs a fully known t-degree or a shift");

    std::size_t points = 0;
    for (const Degree& d : degrees_) points = std::max(points, d.solve_point);
    schedule_.assign(points, 0);
    for (const Degree& d : degrees_) {
      for (std::size_t k = 0; k < d.solve_point; ++k) ++schedule_[k];
    }
  }

  bool KnownFormInterp::is_normalizer(const Degree& d) const {
    return geom_.shifted() && d.side == spec_.norm_side && d.r == 0;
  }

  std::vector<ProbeRequest> KnownFormInterp::needed() const {
    std::vector<ProbeRequest> out;
    if (done_) return out;
    for (std::size_t k = next_point_; k <= schedule_.size(); ++k) {
      auto it = pending_.find(k);
      for (std::uint32_t j = 0; j < schedule_[k - 1]; ++j) {
        if (it == pending_.end() || !it->second.contains(j)) out.push_back({order_of(k), j});
      }
    }
    return out;
  }

  void KnownFormInterp::feed(const ProbeRequest& req, FFInt value) {
    if (done_) return;
    const std::size_t k = req.zorder.empty() ? 1 : req.zorder[0];
    if (k < next_point_ || k > schedule_.size() || req.t_index >= schedule_[k - 1]) return;
    if (req.zorder != order_of(k)) return;
    if (pending_[k].try_emplace(req.t_index, value).second) ++probes_;
  }

  void KnownFormInterp::advance() {
    while (!done_) {
      if (next_point_ <= schedule_.size()) {
        auto it = pending_.find(next_point_);
        if (it == pending_.end() || it->second.size() < schedule_[next_point_ - 1]) return;
        solve_point(next_point_);
        pending_.erase(next_point_);
        ++next_point_;
        continue;
      }
      const std::size_t n = geom_.num_vars();
      FFPolynomial side[2] = {FFPolynomial(n), FFPolynomial(n)};
      for (const Degree& d : degrees_) side[static_cast<int>(d.side)] += d.poly;
      if (geom_.shifted()) {
        const int s = static_cast<int>(spec_.norm_side);
        FFInt c(1);
        if (!shift_acc_[s].empty()) c -= shift_acc_[s][0].coefficient(MultiIndex(n, 0));
        side[s].add_term(MultiIndex(n, 0), c);
      }
      FFPolynomial user[2] = {geom_.to_user(side[0]), geom_.to_user(side[1])};
      for (const auto& [key, v] : spec_.coefficients) {
        result_[key] = user[static_cast<int>(key.side)].coefficient(key.alpha);
      }
      done_ = true;
    }
  }

  void KnownFormInterp::solve_point(std::size_t k) {
    const ZOrder o = order_of(k);
    PowerTable pw(geom_.direction(o), max_degree_);
    UniPoly known[2] = {UniPoly(max_degree_ + 1), UniPoly(max_degree_ + 1)};
    if (geom_.shifted()) known[static_cast<int>(spec_.norm_side)][0] = FFInt(1);
    std::vector<std::size_t> unknown;
    for (std::size_t i = 0; i < degrees_.size(); ++i) {
      const Degree& d = degrees_[i];
      if (!d.solved) {
        unknown.push_back(i);
        continue;
      }
      FFInt v = evaluate(d.poly, pw);
      if (geom_.shifted()) v += evaluate(shift_acc_[static_cast<int>(d.side)][d.r], pw);
      known[static_cast<int>(d.side)][d.r] += v;
    }

    const std::size_t K = unknown.size();
    FFMatrix a(K, K);
    std::vector<FFInt> b(K);
    std::size_t row = 0;
    for (const auto& [j, fval] : pending_.at(k)) {
      if (row == K) break;
      FFInt t = geom_.t_value(o, j);
      for (std::size_t col = 0; col < K; ++col) {
        const Degree& d = degrees_[unknown[col]];
        FFInt tp = t.pow(d.r);
        a(row, col) = d.side == Side::numerator ? tp : -(fval * tp);
      }
      b[row] = fval * finrec::evaluate(known[1], t) - finrec::evaluate(known[0], t);
      ++row;
    }
    auto sol = solve_linear(std::move(a), std::move(b));
    if (!sol) throw SingularSystem("singular system in t");
    for (std::size_t col = 0; col < K; ++col) degrees_[unknown[col]].values.push_back((*sol)[col]);
    for (std::size_t col = 0; col < K; ++col) {
      Degree& d = degrees_[unknown[col]];
      if (d.solve_point == k) solve_degree(d);
    }
  }

  void KnownFormInterp::solve_degree(Degree& d) {
    const std::size_t T = d.unknown.size();
    const auto& anchors = geom_.anchors();
    std::vector<FFInt> rhs(T), vs(T);
    for (std::size_t j = 0; j < T; ++j) {
      PowerTable pw(geom_.direction(order_of(j + 1)), max_degree_);
      FFInt v = d.values[j] - evaluate(d.known, pw);
      if (geom_.shifted()) v -= evaluate(shift_acc_[static_cast<int>(d.side)][d.r], pw);
      rhs[j] = v;
    }
    for (std::size_t u = 0; u < T; ++u) {
      FFInt v(1);
      for (std::size_t i = 1; i < d.unknown[u].size(); ++i) v *= anchors[i - 1].pow(d.unknown[u][i]);
      vs[u] = v;
    }
    auto c = solve_shifted_vandermonde(vs, rhs);
    d.poly = d.known;
    for (std::size_t u = 0; u < T; ++u) d.poly.add_term(d.unknown[u], c[u]);
    d.solved = true;
    if (geom_.shifted()) {
      auto& acc = shift_acc_[static_cast<int>(d.side)];
      for (auto& [r, bucket] : shift_subtraction(d.poly, std::span<const FFInt>(geom_.shift()))) acc[r] += bucket;
    }
  }

}
