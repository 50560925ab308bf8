#pragma once

#include <cstddef>

namespace specsense::nnet {

/// C[M,N] += A[M,K] * B[K,N].
/// A(i,k) is read at a[i*rsa + k*csa], so transposed operands are free
/// (rsa=1, csa=lda). B and C are row-major with leading dimensions ldb, ldc.
/// Summation order over k is fixed, so results do not depend on threading.
void gemm_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t rsa, std::size_t csa,
              const double* b, std::size_t ldb, double* c, std::size_t ldc);

/// out[cols, rows] = in[rows, cols]^T
void transpose(const double* in, std::size_t rows, std::size_t cols, double* out);

}  // namespace specsense::nnet
