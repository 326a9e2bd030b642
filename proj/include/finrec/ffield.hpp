#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace finrec {

  /**
   * An element of Z_p for a prime p < 2^63.
   *
   * The prime is process-global and shared by every element. It may only be
   * changed while no arithmetic is running (the reconstruction driver switches
   * it between prime fields behind a barrier).
   */
  class FFInt {
  public:
    constexpr FFInt() = default;
    FFInt(std::uint64_t v) : n(v % p) {}
    FFInt(std::int64_t v);
    FFInt(int v) : FFInt(static_cast<std::int64_t>(v)) {}
    FFInt(unsigned v) : FFInt(static_cast<std::uint64_t>(v)) {}
    explicit FFInt(const mpz_class& v);
    explicit FFInt(std::string_view decimal);

    /// Wraps an already reduced value without a modulo operation.
    static constexpr FFInt from_reduced(std::uint64_t v) {
      FFInt r;
      r.n = v;
      return r;
    }

    static void set_new_prime(std::uint64_t prime);
    static std::uint64_t prime() { return p; }

    std::uint64_t value() const { return n; }
    bool is_zero() const { return n == 0; }

    FFInt pow(std::uint64_t e) const;
    /// Multiplicative inverse by the extended Euclidean algorithm; 0 maps to 0.
    FFInt inverse() const;

    FFInt& operator+=(FFInt b) {
      n = n >= p - b.n ? n - (p - b.n) : n + b.n;
      return *this;
    }
    FFInt& operator-=(FFInt b) {
      n = n >= b.n ? n - b.n : n + (p - b.n);
      return *this;
    }
    FFInt& operator*=(FFInt b) {
      n = mul_mod(n, b.n, p);
      return *this;
    }
    FFInt& operator/=(FFInt b) { return *this *= b.inverse(); }

    FFInt operator-() const { return from_reduced(n == 0 ? 0 : p - n); }
    FFInt operator+() const { return *this; }

    friend FFInt operator+(FFInt a, FFInt b) { return a += b; }
    friend FFInt operator-(FFInt a, FFInt b) { return a -= b; }
    friend FFInt operator*(FFInt a, FFInt b) { return a *= b; }
    friend FFInt operator/(FFInt a, FFInt b) { return a /= b; }
    friend bool operator==(FFInt a, FFInt b) { return a.n == b.n; }
    friend auto operator<=>(FFInt a, FFInt b) { return a.n <=> b.n; }

    static std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
      return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
    }

  private:
    std::uint64_t n = 0;
    inline static std::uint64_t p = 9223372036854775783ULL;
  };

  FFInt pow(FFInt a, std::uint64_t e);
  std::ostream& operator<<(std::ostream& out, FFInt a);

  inline constexpr std::size_t kPrimeCount = 100;

  /// The i-th largest prime below 2^63 (i = 0 is 2^63 - 25), descending.
  std::uint64_t nth_prime(std::size_t i);
  const std::array<std::uint64_t, kPrimeCount>& primes();

  /// Deterministic Miller-Rabin for 64-bit integers.
  bool is_prime_u64(std::uint64_t n);

}
