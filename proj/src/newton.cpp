#include "finrec/newton.hpp"

#include "finrec/errors.hpp"

namespace finrec {

  bool NewtonState::feed(FFInt y, FFInt value) {
    if (done_) return true;
    for (FFInt prev : ys_) {
      if (prev == y) throw CoincidentPoints("repeated Newton interpolation point");
    }
    FFInt a = value;
    for (std::size_t j = 0; j < as_.size(); ++j) a = (a - as_[j]) / (y - ys_[j]);
    ys_.push_back(y);
    as_.push_back(a);

    zero_run_ = a.is_zero() ? zero_run_ + 1 : 0;
    if (zero_run_ >= eta_ && as_.size() > 1) done_ = true;
    if (bound_ && ys_.size() >= *bound_ + 1) done_ = true;
    return done_;
  }

  std::size_t NewtonState::significant_terms() const {
    std::size_t k = as_.size();
    while (k > 0 && as_[k - 1].is_zero()) --k;
    return k;
  }

  std::vector<FFInt> NewtonState::to_canonical() const {
    std::size_t k = significant_terms();
    std::vector<FFInt> c;
    if (k == 0) return c;
    // Horner in the Newton basis: p <- p * (z - y_i) + a_i
    c.assign(1, as_[k - 1]);
    for (std::size_t i = k - 1; i-- > 0;) {
      std::vector<FFInt> next(c.size() + 1);
      for (std::size_t e = 0; e < c.size(); ++e) {
        next[e + 1] += c[e];
        next[e] -= c[e] * ys_[i];
      }
      next[0] += as_[i];
      c = std::move(next);
    }
    while (!c.empty() && c.back().is_zero()) c.pop_back();
    return c;
  }

  FFInt NewtonState::evaluate(FFInt z) const {
    std::size_t k = significant_terms();
    if (k == 0) return FFInt();
    FFInt r = as_[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) r = r * (z - ys_[i]) + as_[i];
    return r;
  }

  namespace {

    struct DenseRecursion {
      const FieldFunction& f;
      std::size_t n;
      std::span<const FFInt> anchors;
      std::optional<std::uint32_t> bound;
      unsigned eta;
      std::size_t probes = 0;
      std::vector<FFInt> point;

      FFPolynomial run(std::size_t v) {
        if (v == n) {
          ++probes;
          return FFPolynomial::constant(n, f(point));
        }
        std::vector<FFInt> ys;
        std::vector<FFPolynomial> as;
        unsigned zero_run = 0;
        for (std::uint32_t j = 1;; ++j) {
          FFInt y = anchors[v].pow(j);
          point[v] = y;
          FFPolynomial a = run(v + 1);
          for (std::size_t i = 0; i < as.size(); ++i) {
            a -= as[i];
            a *= (y - ys[i]).inverse();
          }
          ys.push_back(y);
          zero_run = a.is_zero() ? zero_run + 1 : 0;
          as.push_back(std::move(a));
          if (zero_run >= eta && as.size() > 1) break;
          if (bound && as.size() >= *bound + 1) break;
        }
        point[v] = FFInt();
        // back to the monomial basis in z_v
        FFPolynomial result(n);
        for (std::size_t i = as.size(); i-- > 0;) {
          FFPolynomial shifted(n);
          for (const auto& [alpha, c] : result.terms()) {
            MultiIndex up(alpha);
            ++up[v];
            shifted.add_term(up, c);
            shifted.add_term(alpha, -(c * ys[i]));
          }
          result = shifted + as[i];
        }
        return result;
      }
    };

  }

  DenseNewtonResult dense_newton_interpolate(const FieldFunction& f, std::size_t n,
                                             std::span<const FFInt> anchors,
                                             std::optional<std::uint32_t> degree_bound, unsigned eta) {
    DenseRecursion rec{f, n, anchors, degree_bound, eta, 0, std::vector<FFInt>(n)};
    DenseNewtonResult out;
    out.polynomial = rec.run(0);
    out.probes = rec.probes;
    return out;
  }

}
