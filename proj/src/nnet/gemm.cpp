#include "specsense/nnet/gemm.hpp"

#include <vector>

namespace specsense::nnet {

namespace {

// 8x16 register tile: two 8-wide accumulators per row. GCC vector extensions
// keep this portable; with AVX-512 each v8d is one zmm register.
typedef double v8d __attribute__((vector_size(64)));
// Unaligned, aliasing-safe view for loading rows of B.
typedef double v8du __attribute__((vector_size(64), aligned(8), may_alias));

constexpr std::size_t kMr = 8;
constexpr std::size_t kNr = 16;
constexpr std::size_t kKc = 256;  // keeps a packed A panel plus B rows in L1/L2

}  // namespace

void gemm_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t rsa, std::size_t csa,
              const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  if (m == 0 || n == 0 || k == 0) return;
  const std::size_t panels = m / kMr;
  thread_local std::vector<double> pack;
  pack.resize(panels * kMr * k);
  for (std::size_t p = 0; p < panels; ++p)
    for (std::size_t kk = 0; kk < k; ++kk)
      for (std::size_t r = 0; r < kMr; ++r) pack[(p * k + kk) * kMr + r] = a[(p * kMr + r) * rsa + kk * csa];

  const std::size_t n_main = n - n % kNr;
  for (std::size_t k0 = 0; k0 < k; k0 += kKc) {
    const std::size_t k1 = k0 + kKc < k ? k0 + kKc : k;
    for (std::size_t j = 0; j < n_main; j += kNr) {
      for (std::size_t p = 0; p < panels; ++p) {
        const double* ap = pack.data() + p * k * kMr;
        v8d acc0[kMr] = {}, acc1[kMr] = {};
        for (std::size_t kk = k0; kk < k1; ++kk) {
          const v8d b0 = *reinterpret_cast<const v8du*>(b + kk * ldb + j);
          const v8d b1 = *reinterpret_cast<const v8du*>(b + kk * ldb + j + 8);
          for (std::size_t r = 0; r < kMr; ++r) {
            const double av = ap[kk * kMr + r];
            acc0[r] += av * b0;
            acc1[r] += av * b1;
          }
        }
        for (std::size_t r = 0; r < kMr; ++r) {
          double* cr = c + (p * kMr + r) * ldc + j;
          for (int q = 0; q < 8; ++q) {
            cr[q] += acc0[r][q];
            cr[q + 8] += acc1[r][q];
          }
        }
      }
    }
  }
  // column tail
  for (std::size_t p = 0; p < panels; ++p)
    for (std::size_t jj = n_main; jj < n; ++jj)
      for (std::size_t r = 0; r < kMr; ++r) {
        double s = 0.0;
        for (std::size_t kk = 0; kk < k; ++kk) s += pack[(p * k + kk) * kMr + r] * b[kk * ldb + jj];
        c[(p * kMr + r) * ldc + jj] += s;
      }
  // row tail
  for (std::size_t i = panels * kMr; i < m; ++i)
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double av = a[i * rsa + kk * csa];
      const double* br = b + kk * ldb;
      double* cr = c + i * ldc;
      for (std::size_t jj = 0; jj < n; ++jj) cr[jj] += av * br[jj];
    }
}

void transpose(const double* in, std::size_t rows, std::size_t cols, double* out) {
  constexpr std::size_t kBlock = 32;
  for (std::size_t i0 = 0; i0 < rows; i0 += kBlock)
    for (std::size_t j0 = 0; j0 < cols; j0 += kBlock) {
      const std::size_t i1 = i0 + kBlock < rows ? i0 + kBlock : rows;
      const std::size_t j1 = j0 + kBlock < cols ? j0 + kBlock : cols;
      for (std::size_t i = i0; i < i1; ++i)
        for (std::size_t j = j0; j < j1; ++j) out[j * rows + i] = in[i * cols + j];
    }
}

}  // namespace specsense::nnet
