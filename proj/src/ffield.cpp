#include "finrec/ffield.hpp"

#include <cassert>
#include <ostream>
#include <stdexcept>

namespace finrec {

  FFInt::FFInt(std::int64_t v) {
    if (v >= 0) {
      n = static_cast<std::uint64_t>(v) % p;
    } else {
      // -(v + 1) avoids overflow at INT64_MIN
      std::uint64_t m = (static_cast<std::uint64_t>(-(v + 1)) + 1) % p;
      n = m == 0 ? 0 : p - m;
    }
  }

  FFInt::FFInt(const mpz_class& v) {
    const mpz_class mod(static_cast<unsigned long>(p));
    mpz_class r = v % mod;
    if (r < 0) r += mod;
    n = r.get_ui();
  }

  FFInt::FFInt(std::string_view decimal) : FFInt(mpz_class(std::string(decimal))) {}

  void FFInt::set_new_prime(std::uint64_t prime) {
    if (prime < 2 || prime >= (1ULL << 63)) throw std::invalid_argument("prime out of range");
    p = prime;
  }

  FFInt FFInt::pow(std::uint64_t e) const {
    std::uint64_t base = n;
    std::uint64_t result = 1 % p;
    while (e > 0) {
      if (e & 1) result = mul_mod(result, base, p);
      base = mul_mod(base, base, p);
      e >>= 1;
    }
    return from_reduced(result);
  }

  FFInt FFInt::inverse() const {
    if (n == 0) return FFInt();
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(p), new_r = static_cast<std::int64_t>(n);
    while (new_r != 0) {
      std::int64_t q = r / new_r;
      std::int64_t tmp = t - q * new_t;
      t = new_t;
      new_t = tmp;
      tmp = r - q * new_r;
      r = new_r;
      new_r = tmp;
    }
    assert(r == 1);
    if (t < 0) t += static_cast<std::int64_t>(p);
    return from_reduced(static_cast<std::uint64_t>(t));
  }

  FFInt pow(FFInt a, std::uint64_t e) { return a.pow(e); }

  std::ostream& operator<<(std::ostream& out, FFInt a) { return out << a.value(); }

  namespace {
    std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
      std::uint64_t r = 1;
      b %= m;
      while (e) {
        if (e & 1) r = FFInt::mul_mod(r, b, m);
        b = FFInt::mul_mod(b, b, m);
        e >>= 1;
      }
      return r;
    }
  }

  bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t sp : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
      if (n % sp == 0) return n == sp;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
      d >>= 1;
      ++s;
    }
    // these bases are sufficient for all n < 2^64
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
      std::uint64_t x = pow_mod(a, d, n);
      if (x == 1 || x == n - 1) continue;
      bool composite = true;
      for (int i = 1; i < s; ++i) {
        x = FFInt::mul_mod(x, x, n);
        if (x == n - 1) {
          composite = false;
          break;
        }
      }
      if (composite) return false;
    }
    return true;
  }

  const std::array<std::uint64_t, kPrimeCount>& primes() {
    static const std::array<std::uint64_t, kPrimeCount> table = [] {
      std::array<std::uint64_t, kPrimeCount> t{};
      std::size_t count = 0;
      for (std::uint64_t c = (1ULL << 63) - 1; count < kPrimeCount; c -= 2) {
        if (is_prime_u64(c)) t[count++] = c;
      }
      return t;
    }();
    return table;
  }

  std::uint64_t nth_prime(std::size_t i) {
    if (i >= kPrimeCount) throw std::out_of_range("prime index out of range");
    return primes()[i];
  }

}
