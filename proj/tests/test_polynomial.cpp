#include <doctest.h>

#include "finrec/errors.hpp"
#include "finrec/linalg.hpp"
#include "finrec/polynomial.hpp"

using namespace finrec;

TEST_CASE("degree-colex ordering") {
  DegColexLess less;
  CHECK(less({0, 0}, {1, 0}));
  CHECK(less({1, 0}, {0, 1}));
  CHECK(less({0, 1}, {2, 0}));
  CHECK(less({2, 0}, {1, 1}));
  CHECK(less({1, 1}, {0, 2}));
  CHECK_FALSE(less({0, 2}, {0, 2}));
}

TEST_CASE("rendering") {
  QPolynomial p(2);
  CHECK(p.to_string() == "0");
  p.add_term({1, 1}, Rational(4));
  p.add_term({0, 1}, Rational(1));
  p.add_term({1, 0}, Rational(-1, 2));
  p.add_term({0, 0}, Rational(3));
  CHECK(p.to_string() == "3-1/2*z1+z2+4*z1*z2");
  CHECK(p.to_string({"x", "y"}) == "3-1/2*x+y+4*x*y");
  QPolynomial q(2);
  q.add_term({0, 3}, Rational(-1));
  CHECK(q.to_string() == "-z2^3");
}

TEST_CASE("arithmetic and evaluation") {
  FFInt::set_new_prime(509);
  FFPolynomial a(2), b(2);
  a.add_term({1, 0}, FFInt(3));
  a.add_term({0, 1}, FFInt(7));
  b.add_term({1, 0}, FFInt(1));
  b.add_term({0, 1}, FFInt(1));
  std::vector<FFInt> pt{FFInt(1), FFInt(10)};
  CHECK(a.evaluate(pt) == FFInt(73));
  CHECK((a * b).evaluate(pt) == FFInt(73 * 11));
  CHECK((a - a).is_zero());
  CHECK((a + b).coefficient({1, 0}) == FFInt(4));
  FFInt::set_new_prime(nth_prime(0));
}

TEST_CASE("shifted vandermonde") {
  FFInt::set_new_prime(509);
  std::vector<FFInt> v{FFInt(7)}, pr{FFInt(21)};
  CHECK(solve_shifted_vandermonde(v, pr)[0] == FFInt(3));

  std::vector<FFInt> v2{FFInt(1), FFInt(10)}, pr2{FFInt(73), FFInt(194)};
  auto c = solve_shifted_vandermonde(v2, pr2);
  CHECK(c[0] == FFInt(3));
  CHECK(c[1] == FFInt(7));

  std::vector<FFInt> bad{FFInt(2), FFInt(2)};
  CHECK_THROWS_AS(solve_shifted_vandermonde(bad, pr2), SingularSystem);
  FFInt::set_new_prime(nth_prime(0));

  // agreement with dense elimination
  std::vector<FFInt> vs, cs, probes(6);
  for (int i = 0; i < 6; ++i) {
    vs.push_back(FFInt(std::uint64_t(12345 + 977 * i * i)));
    cs.push_back(FFInt(std::uint64_t(99 + i)));
  }
  FFMatrix m(6, 6);
  for (int k = 0; k < 6; ++k) {
    for (int i = 0; i < 6; ++i) {
      m(k, i) = vs[i].pow(k + 1);
      probes[k] += cs[i] * m(k, i);
    }
  }
  CHECK(solve_shifted_vandermonde(vs, probes) == cs);
  CHECK(*solve_linear(m, probes) == cs);
}
