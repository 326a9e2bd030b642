#include "finrec/linalg.hpp"

#include <stdexcept>

#include "finrec/errors.hpp"

namespace finrec {

  namespace {

    // x * w mod p with the precomputed quotient wp = floor(w 2^64 / p)
    inline std::uint64_t mul_shoup(std::uint64_t x, std::uint64_t w, std::uint64_t wp, std::uint64_t p) {
      std::uint64_t q = static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * wp) >> 64);
      std::uint64_t r = x * w - q * p;
      return r >= p ? r - p : r;
    }

    inline std::uint64_t shoup_quotient(std::uint64_t w, std::uint64_t p) {
      return static_cast<std::uint64_t>((static_cast<unsigned __int128>(w) << 64) / p);
    }

  }

  std::optional<std::vector<FFInt>> solve_linear(FFMatrix a, std::vector<FFInt> b) {
    const std::size_t n = a.rows;
    if (a.cols != n || b.size() != n) throw std::invalid_argument("solve_linear expects a square system");
    const std::uint64_t p = FFInt::prime();
    // augmented rows of raw residues
    const std::size_t w = n + 1;
    std::vector<std::uint64_t> m(n * w);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m[i * w + j] = a(i, j).value();
      m[i * w + n] = b[i].value();
    }
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t pivot = col;
      while (pivot < n && m[pivot * w + col] == 0) ++pivot;
      if (pivot == n) return std::nullopt;
      if (pivot != col) {
        for (std::size_t j = col; j < w; ++j) std::swap(m[pivot * w + j], m[col * w + j]);
      }
      std::uint64_t* prow = &m[col * w];
      const std::uint64_t inv = FFInt::from_reduced(prow[col]).inverse().value();
      const std::uint64_t invq = shoup_quotient(inv, p);
      for (std::size_t j = col; j < w; ++j) prow[j] = mul_shoup(prow[j], inv, invq, p);
      for (std::size_t i = col + 1; i < n; ++i) {
        std::uint64_t* row = &m[i * w];
        const std::uint64_t f = row[col];
        if (f == 0) continue;
        const std::uint64_t fq = shoup_quotient(f, p);
        for (std::size_t j = col; j < w; ++j) {
          std::uint64_t t = mul_shoup(prow[j], f, fq, p);
          row[j] = row[j] >= t ? row[j] - t : row[j] + (p - t);
        }
      }
    }
    // back substitution on the unit upper triangle
    std::vector<FFInt> x(n);
    for (std::size_t i = n; i-- > 0;) {
      FFInt v = FFInt::from_reduced(m[i * w + n]);
      for (std::size_t j = i + 1; j < n; ++j) v -= FFInt::from_reduced(m[i * w + j]) * x[j];
      x[i] = v;
    }
    return x;
  }

  std::vector<FFInt> solve_shifted_vandermonde(std::span<const FFInt> v, std::span<const FFInt> probes) {
    const std::size_t m = v.size();
    if (probes.size() < m) throw std::invalid_argument("not enough probes for Vandermonde system");
    std::vector<FFInt> c(m);
    if (m == 0) return c;
    for (std::size_t i = 0; i < m; ++i) {
      if (v[i].is_zero()) throw SingularSystem("vanishing monomial evaluation");
    }

    // master polynomial B(z) = prod (z - v_i) = sum d_k z^k, monic
    std::vector<FFInt> d(m + 1);
    d[0] = FFInt(1);
    for (std::size_t i = 0; i < m; ++i) {
      // multiply by (z - v_i); degree grows from i to i + 1
      for (std::size_t k = i + 1; k > 0; --k) d[k] = d[k - 1] - v[i] * d[k];
      d[0] = -(v[i] * d[0]);
    }

    std::vector<FFInt> q(m);
    for (std::size_t i = 0; i < m; ++i) {
      // q(z) = B(z) / (z - v_i), so B_i(z) = z q(z) / (v_i q(v_i))
      q[m - 1] = d[m];
      for (std::size_t k = m - 1; k > 0; --k) q[k - 1] = d[k] + v[i] * q[k];
      FFInt s, norm;
      for (std::size_t k = m; k-- > 0;) {
        s += q[k] * probes[k];
        norm = norm * v[i] + q[k];
      }
      norm *= v[i];
      if (norm.is_zero()) throw SingularSystem("repeated monomial evaluation");
      c[i] = s / norm;
    }
    return c;
  }

}
