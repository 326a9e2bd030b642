#include "finrec/ratrec.hpp"

#include <stdexcept>

namespace finrec {

  namespace {
    mpz_class gcd(const mpz_class& a, const mpz_class& b) {
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
      return g;
    }

    mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
      return q;
    }
  }

  std::optional<Rational> wang_rr(const ModularImage& img) {
    const mpz_class& m = img.modulus;
    mpz_class old_t = 0, t = 1;
    mpz_class old_r = m, r = img.residue;
    while (2 * r * r > m) {
      mpz_class q = floor_div(old_r, r);
      mpz_class tmp = old_r - q * r;
      old_r = r;
      r = tmp;
      tmp = old_t - q * t;
      old_t = t;
      t = tmp;
    }
    if (2 * t * t > m || gcd(r, t) != 1) return std::nullopt;
    return Rational(r, t);
  }

  mpz_class mqrr_threshold(const mpz_class& modulus, unsigned c) {
    // ceil(log2 m): bit length, minus one for exact powers of two
    mpz_class abs_m = abs(modulus);
    std::size_t bits = mpz_sizeinbase(abs_m.get_mpz_t(), 2);
    if (mpz_popcount(abs_m.get_mpz_t()) == 1) --bits;
    mpz_class T(static_cast<unsigned long>(bits));
    T <<= c;
    return T;
  }

  std::optional<Rational> mqrr(const ModularImage& img, const mpz_class& threshold) {
    const mpz_class& m = img.modulus;
    mpz_class T = threshold;
    if (img.residue == 0) {
      if (m > T) return Rational(0);
      return std::nullopt;
    }
    mpz_class n = 0, d = 0;
    mpz_class t = 1, old_t = 0;
    mpz_class r = img.residue, old_r = m;
    while (r != 0 && old_r > T) {
      mpz_class q = floor_div(old_r, r);
      if (q > T) {
        n = r;
        d = t;
        T = q;
      }
      mpz_class tmp = old_r - q * r;
      old_r = r;
      r = tmp;
      tmp = old_t - q * t;
      old_t = t;
      t = tmp;
    }
    if (d == 0 || gcd(n, d) != 1) return std::nullopt;
    return Rational(n, d);
  }

  ModularImage crt_pair(const ModularImage& a, const ModularImage& b) {
    mpz_class p3 = a.modulus * b.modulus;
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), b.modulus.get_mpz_t(), a.modulus.get_mpz_t()) == 0) {
      throw std::invalid_argument("moduli are not coprime");
    }
    mpz_class m1 = inv * b.modulus;
    mpz_class m2 = (1 - m1) % p3;
    if (m2 < 0) m2 += p3;
    mpz_class c3 = (m1 * a.residue + m2 * b.residue) % p3;
    if (c3 < 0) c3 += p3;
    return {c3, p3};
  }

  RaceResult race_and_accept(const std::optional<Rational>& prev_guess, const ModularImage& img,
                             const std::optional<ModularImage>& prev, unsigned c) {
    auto by_wang = wang_rr(img);
    auto by_mqrr = mqrr(img, mqrr_threshold(img.modulus, c));

    RaceResult out;
    if (prev_guess) {
      if ((by_wang && *by_wang == *prev_guess) || (by_mqrr && *by_mqrr == *prev_guess)) {
        out.guess = prev_guess;
        out.accepted = true;
        return out;
      }
    }
    if (prev) {
      // stable symmetric residue: an integer, possibly beyond the Wang bound
      mpz_class v = img.residue, w = prev->residue;
      if (2 * v > img.modulus) v -= img.modulus;
      if (2 * w > prev->modulus) w -= prev->modulus;
      if (v == w) {
        out.guess = Rational(v);
        out.accepted = true;
        return out;
      }
    }
    out.guess = by_wang ? by_wang : by_mqrr;
    return out;
  }

}
