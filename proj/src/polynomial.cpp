#include "finrec/polynomial.hpp"

namespace finrec {

  FFPolynomial reduce(const QPolynomial& p) {
    FFPolynomial r(p.num_vars());
    for (const auto& [alpha, c] : p.terms()) r.add_term(alpha, c.to_ffint());
    return r;
  }

}
