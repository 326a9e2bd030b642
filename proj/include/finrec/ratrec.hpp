#pragma once

#include <optional>
#include <utility>

#include <gmpxx.h>

#include "finrec/rational.hpp"

namespace finrec {

  /// Residue e modulo m with 0 <= e < m.
  struct ModularImage {
    mpz_class residue;
    mpz_class modulus;
  };

  /// Wang's rational reconstruction. Succeeds with n/d if |n|, |d| <= sqrt(m/2).
  std::optional<Rational> wang_rr(const ModularImage& img);

  /// Default MQRR tolerance 2^c * ceil(log2 m).
  mpz_class mqrr_threshold(const mpz_class& modulus, unsigned c = 10);

  /// Maximal quotient rational reconstruction with tolerance T > 0.
  std::optional<Rational> mqrr(const ModularImage& img, const mpz_class& threshold);
  inline std::optional<Rational> mqrr(const ModularImage& img) {
    return mqrr(img, mqrr_threshold(img.modulus));
  }

  /// Combines residues modulo two coprime moduli into one modulo their product.
  ModularImage crt_pair(const ModularImage& a, const ModularImage& b);

  struct RaceResult {
    std::optional<Rational> guess;
    bool accepted = false;
  };

  /**
   * Races Wang against MQRR on the combined image. A guess is accepted when
   * either algorithm reproduces the previous ring's guess, or when the symmetric
   * residue did not change with the newest prime; the guess is then the
   * residue read as a signed integer. Unaccepted guesses are still
   * returned since they may be correct.
   */
  RaceResult race_and_accept(const std::optional<Rational>& prev_guess, const ModularImage& img,
                             const std::optional<ModularImage>& prev = std::nullopt,
                             unsigned c = 10);

}
