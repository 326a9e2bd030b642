#pragma once

#include <optional>
#include <span>
#include <vector>

#include "finrec/ffield.hpp"

namespace finrec {

  /// Dense row-major square matrix over the current prime field.
  struct FFMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<FFInt> data;

    FFMatrix() = default;
    FFMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
    FFInt& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    FFInt operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  };

  /// Gaussian elimination; nullopt if the system is singular.
  std::optional<std::vector<FFInt>> solve_linear(FFMatrix a, std::vector<FFInt> b);

  /**
   * Solves the shifted transposed Vandermonde system
   *   sum_i c_i v_i^k = probes[k-1],  k = 1..T
   * in O(T^2). Throws SingularSystem for repeated or vanishing v_i.
   */
  std::vector<FFInt> solve_shifted_vandermonde(std::span<const FFInt> v, std::span<const FFInt> probes);

}
