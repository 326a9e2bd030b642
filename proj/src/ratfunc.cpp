#include "finrec/ratfunc.hpp"

namespace finrec {

  FFRationalFunction reduce(const QRationalFunction& f) {
    return {reduce(f.numerator), reduce(f.denominator)};
  }

  namespace {

    template <class C>
    struct Expander {
      std::span<const C> shift;
      const MultiIndex* alpha = nullptr;
      std::map<std::uint32_t, SparsePolynomial<C>>* out = nullptr;
      MultiIndex beta;

      // walks all beta <= alpha that differ from alpha only in shifted variables
      void walk(std::size_t i, const C& c) {
        if (i == beta.size()) {
          if (beta == *alpha) return;
          auto d = total_degree(beta);
          auto it = out->try_emplace(d, SparsePolynomial<C>(beta.size())).first;
          it->second.add_term(beta, c);
          return;
        }
        const std::uint32_t a = (*alpha)[i];
        if (shift[i].is_zero() || a == 0) {
          beta[i] = a;
          walk(i + 1, c);
          return;
        }
        // (z + s)^a = sum_b binom(a, b) s^(a - b) z^b
        C spow(1);
        mpz_class binom = 1;
        for (std::uint32_t k = 0; k <= a; ++k) {
          // k = a - b
          const std::uint32_t b = a - k;
          beta[i] = b;
          walk(i + 1, c * C(binom) * spow);
          spow *= shift[i];
          binom *= b;
          binom /= k + 1;
        }
      }
    };

  }

  template <class C>
  std::map<std::uint32_t, SparsePolynomial<C>> shift_subtraction(const SparsePolynomial<C>& p,
                                                                  std::span<const C> shift) {
    std::map<std::uint32_t, SparsePolynomial<C>> out;
    Expander<C> ex{shift, nullptr, &out, MultiIndex(p.num_vars())};
    for (const auto& [alpha, c] : p.terms()) {
      ex.alpha = &alpha;
      ex.walk(0, c);
    }
    for (auto it = out.begin(); it != out.end();) {
      it = it->second.is_zero() ? out.erase(it) : std::next(it);
    }
    return out;
  }

  template std::map<std::uint32_t, FFPolynomial> shift_subtraction(const FFPolynomial&, std::span<const FFInt>);
  template std::map<std::uint32_t, QPolynomial> shift_subtraction(const QPolynomial&, std::span<const Rational>);

}
