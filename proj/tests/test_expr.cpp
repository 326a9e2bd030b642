#include <doctest.h>

#include <random>

#include "finrec/bench.hpp"
#include "finrec/expr.hpp"

using namespace finrec;

namespace {
  const std::vector<std::string> z2{"z1", "z2"};

  struct PrimeGuard {
    explicit PrimeGuard(std::uint64_t p) { FFInt::set_new_prime(p); }
    ~PrimeGuard() { FFInt::set_new_prime(nth_prime(0)); }
  };

  std::size_t error_position(const std::string& text, const std::vector<std::string>& vars) {
    try {
      Expression::parse(text, vars);
    } catch (const ParseError& e) {
      return e.position;
    }
    return std::string::npos;
  }

  std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
    switch (pick(rng)) {
      case 0:
        return std::to_string(rng() % 20);
      case 1:
        return "z" + std::to_string(1 + rng() % 3);
      case 2:
        return "(" + random_expr(rng, depth - 1) + ")+(" + random_expr(rng, depth - 1) + ")";
      case 3:
        return "(" + random_expr(rng, depth - 1) + ")-(" + random_expr(rng, depth - 1) + ")";
      case 4:
        return "(" + random_expr(rng, depth - 1) + ")*(" + random_expr(rng, depth - 1) + ")";
      case 5:
        return "(" + random_expr(rng, depth - 1) + ")/(" + random_expr(rng, depth - 1) + ")";
      case 6:
        return "-(" + random_expr(rng, depth - 1) + ")";
      default:
        return "(" + random_expr(rng, depth - 1) + ")^" + std::to_string(rng() % 4);
    }
  }
}

TEST_CASE("worked example evaluates mod 509") {
  PrimeGuard g(509);
  auto e = Expression::parse("(3*z1+7*z2)/(z1+z2+4*z1*z2)", z2);
  CHECK(e.num_vars() == 2);
  std::vector<FFInt> x{FFInt(1), FFInt(10)};
  CHECK(e.evaluate(x) == FFInt(221));
  CHECK(FFInt(51).inverse() == FFInt(10));
}

TEST_CASE("single variable") {
  auto e = Expression::parse("z1", {"z1"});
  std::vector<FFInt> x{FFInt(7)};
  CHECK(e.evaluate(x) == FFInt(7));
}

TEST_CASE("big literals keep full precision") {
  PrimeGuard g(509);
  const std::string text = "123456789109898799879870980*(1+z1)";
  auto e = Expression::parse(text, {"z1"});
  CHECK(e.to_string() == text);
  mpz_class c("123456789109898799879870980");
  mpz_class r = c % 509;
  std::vector<FFInt> x{FFInt(0)};
  CHECK(e.evaluate(x) == FFInt(r.get_ui()));
  std::vector<Rational> q{Rational(1)};
  CHECK(*e.evaluate(q) == Rational(c * 2));
}

TEST_CASE("precedence and associativity") {
  std::vector<std::string> v{"z1", "z2", "z3"};
  auto value = [&](const std::string& s) {
    std::vector<Rational> x{Rational(3), Rational(5), Rational(7)};
    return *Expression::parse(s, v).evaluate(x);
  };
  CHECK(value("-z1^2") == Rational(-9));
  CHECK(value("(-z1)^2") == Rational(9));
  CHECK(value("2^3^2") == Rational(512));
  CHECK(value("z1-z2-z3") == Rational(-9));
  CHECK(value("z1/z2/z3") == Rational(3, 35));
  CHECK(value("z1+z2*z3") == Rational(38));
  CHECK(value("-z1*z2") == Rational(-15));
  CHECK(value("z1*-z2") == Rational(-15));
  CHECK(value("z1--z2") == Rational(8));
  CHECK(value("z1^0") == Rational(1));
  CHECK(value("z1^(1+1)") == Rational(9));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(Expression::parse("z1^-1", {"z1"}), ParseError);
  CHECK(error_position("z1^-1", {"z1"}) == 3);
  CHECK(error_position("z1^(1/2)", {"z1"}) == 3);
  CHECK(error_position("z1^z1", {"z1"}) == 3);
  CHECK(error_position("3*", {"z1"}) == 2);
  CHECK(error_position("z1+z3", {"z1"}) == 3);
  CHECK(error_position("1.5", {"z1"}) == 0);
  CHECK(error_position("(z1", {"z1"}) == 3);
  CHECK(error_position("z1 z1", {"z1"}) == 3);
  CHECK(error_position("z1+#", {"z1"}) == 3);
  CHECK(error_position("", {"z1"}) == 0);
  CHECK_THROWS_AS(Expression::parse("z1", {"z1", "z1"}), std::invalid_argument);
  CHECK_THROWS_AS(Expression::parse("z1", {"1z"}), std::invalid_argument);
}

TEST_CASE("division by zero") {
  auto e = Expression::parse("1/(z1-z1)", {"z1"});
  std::vector<FFInt> x{FFInt(4)};
  CHECK(e.evaluate(x) == FFInt(0));
  std::vector<Rational> q{Rational(4)};
  CHECK_FALSE(e.evaluate(q).has_value());
}

TEST_CASE("variable collection sorts naturally") {
  CHECK(Expression::collect_variables("z10+z2*a-3*z1^2") == std::vector<std::string>{"a", "z1", "z2", "z10"});
  CHECK(Expression::collect_variables("12+3").empty());
}

TEST_CASE("rendering round trip") {
  std::mt19937_64 rng(11);
  std::vector<std::string> v{"z1", "z2", "z3"};
  for (int i = 0; i < 1000; ++i) {
    auto text = random_expr(rng, 4);
    auto e = Expression::parse(text, v);
    auto r1 = e.to_string();
    auto e2 = Expression::parse(r1, v);
    CHECK(e2.to_string() == r1);
    std::vector<FFInt> x{FFInt(rng() % 1000), FFInt(rng() % 1000), FFInt(rng() % 1000)};
    CHECK(e.evaluate(x) == e2.evaluate(x));
  }
}

TEST_CASE("field evaluation matches exact evaluation") {
  std::mt19937_64 rng(12);
  std::vector<std::string> v{"z1", "z2", "z3"};
  const mpz_class p(static_cast<unsigned long>(FFInt::prime()));
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    auto e = Expression::parse(random_expr(rng, 4), v);
    std::vector<Rational> q;
    std::vector<FFInt> x;
    for (int k = 0; k < 3; ++k) {
      auto a = static_cast<long>(rng() % 2000) - 1000;
      q.emplace_back(a);
      x.push_back(FFInt(static_cast<std::int64_t>(a)));
    }
    auto exact = e.evaluate(q);
    if (!exact || exact->denominator() % p == 0) continue;
    CHECK(e.evaluate(x) == exact->to_ffint());
    ++compared;
  }
  CHECK(compared > 500);
}

TEST_CASE("expansion") {
  auto e = Expression::parse("(3*z1+7*z2)/(z1+z2+4*z1*z2)", z2);
  auto f = e.expand();
  f.normalize();
  CHECK(f.to_string() == "(3*z1+7*z2)/(z1+z2+4*z1*z2)");

  auto g = Expression::parse("(z1+1)^2/z2 - 1/(2*z2)", z2).expand();
  g.normalize();
  // no cancellation of common factors
  CHECK(g.to_string() == "(1/2*z2+2*z1*z2+z1^2*z2)/(z2^2)");
}

TEST_CASE("benchmark functions parse and expand") {
  auto f4 = bench_function("f4");
  auto e = Expression::parse(f4.expression, f4.variables);
  auto f = e.expand();
  f.normalize();
  CHECK(f.to_string() == "(z1^100+z2^200+z3^300)/(z1*z2*z3*z4*z5+z1^4*z2^4*z3^4*z4^4*z5^4)");
  auto f2 = bench_function("f2");
  auto g = Expression::parse(f2.expression, f2.variables).expand();
  CHECK(g.denominator.size() == 3);
  CHECK(g.numerator.size() == 26334 - 1);  // C(22, 5) monomials minus the constant
  CHECK_THROWS_AS(bench_function("f5"), std::invalid_argument);
  CHECK(bench_table().size() == 12);
}

TEST_CASE("expression black box") {
  std::vector<Expression> es{Expression::parse("z1+z2", z2), Expression::parse("z1*z2", z2)};
  ExpressionBox box(std::move(es));
  CHECK(box.num_vars() == 2);
  CHECK(box.num_functions() == 2);
  std::vector<FFInt> x{FFInt(3), FFInt(4)};
  auto v = box.evaluate(x);
  CHECK(v == std::vector<FFInt>{FFInt(7), FFInt(12)});
  std::vector<Expression> mixed{Expression::parse("z1", {"z1"}), Expression::parse("z1", z2)};
  CHECK_THROWS_AS(ExpressionBox(std::move(mixed)), std::invalid_argument);
}
