#include <doctest.h>

#include <random>

#include "finrec/ffield.hpp"

using finrec::FFInt;

namespace {
  struct Prime509 {
    Prime509() { FFInt::set_new_prime(509); }
    ~Prime509() { FFInt::set_new_prime(finrec::nth_prime(0)); }
  };
}

TEST_CASE("field arithmetic mod 509") {
  Prime509 guard;
  CHECK(FFInt(10) * FFInt(13) == FFInt(130));
  CHECK(FFInt(243) * FFInt(243) == FFInt(5));
  CHECK(FFInt(3).pow(10) == FFInt(5));
  CHECK(FFInt(7).pow(0) == FFInt(1));
  CHECK(FFInt(10).pow(13).value() == 202);
  CHECK(FFInt(10).inverse().value() == 51);
  CHECK((FFInt(3) / FFInt(10)).value() == 153);
  CHECK((FFInt(10).pow(13) + FFInt(3) / FFInt(10)).value() == 355);
  CHECK((FFInt(5) / FFInt(0)).value() == 0);
  CHECK((FFInt(1) / FFInt(1)).value() == 1);
  CHECK(FFInt(-1).value() == 508);
  CHECK(FFInt(std::string_view("1000")).value() == 1000 % 509);
  CHECK(FFInt(mpz_class("-1018")).value() == 0);
}

TEST_CASE("128-bit reduction near 2^63") {
  FFInt a(std::uint64_t{1} << 62);
  CHECK((a * FFInt(2)).value() == 25);
  CHECK((-FFInt(1)).value() == finrec::nth_prime(0) - 1);
}

TEST_CASE("prime table") {
  CHECK(finrec::nth_prime(0) == 9223372036854775783ULL);
  const auto& ps = finrec::primes();
  for (std::size_t i = 0; i < finrec::kPrimeCount; ++i) {
    CHECK(finrec::is_prime_u64(ps[i]));
    CHECK(ps[i] < (std::uint64_t{1} << 63));
    if (i + 1 < finrec::kPrimeCount) CHECK(ps[i] > ps[i + 1]);
  }
  // no prime skipped between consecutive entries
  for (std::uint64_t q = ps[1] + 1; q < ps[0]; ++q) CHECK_FALSE(finrec::is_prime_u64(q));
  CHECK_THROWS_AS(finrec::nth_prime(100), std::out_of_range);
}

TEST_CASE("field axioms against GMP") {
  std::mt19937_64 rng(7);
  const mpz_class p(static_cast<unsigned long>(FFInt::prime()));
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t x = rng() % FFInt::prime(), y = rng() % FFInt::prime(), z = rng() % FFInt::prime();
    FFInt a(x), b(y), c(z);
    mpz_class prod = mpz_class(static_cast<unsigned long>(x)) * static_cast<unsigned long>(y) % p;
    CHECK((a * b).value() == prod.get_ui());
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    if (!b.is_zero()) CHECK((a * b) / b == a);
    if (!a.is_zero()) CHECK(a.pow(FFInt::prime() - 1) == FFInt(1));
  }
}
