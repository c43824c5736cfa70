// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>

// Dense row-major matrix kernels used by the tape. Each routine exists twice:
// serial:: is the reference implementation the tests compare against, omp::
// splits the output across OpenMP threads. The unqualified entry points pick
// one based on problem size and the current thread budget.
namespace loadfc::kernels {

struct GemmDims {
  std::size_t m = 0;  // rows of A / C
  std::size_t k = 0;  // cols of A, rows of B
  std::size_t n = 0;  // cols of B / C
};

namespace serial {
/// C[m,n] = A[m,k] * B[k,n]
void gemm(GemmDims d, std::span<const double> a, std::span<const double> b,
          std::span<double> c);
/// C[m,n] += A[m,k] * B[k,n]
void gemm_acc(GemmDims d, std::span<const double> a, std::span<const double> b,
              std::span<double> c);
/// dA[m,k] += dC[m,n] * B[k,n]^T
void gemm_acc_nt(GemmDims d, std::span<const double> dc,
                 std::span<const double> b, std::span<double> da);
/// dB[k,n] += A[m,k]^T * dC[m,n]
void gemm_acc_tn(GemmDims d, std::span<const double> a,
                 std::span<const double> dc, std::span<double> db);
}  // namespace serial

namespace omp {
void gemm(GemmDims d, std::span<const double> a, std::span<const double> b,
          std::span<double> c);
void gemm_acc(GemmDims d, std::span<const double> a, std::span<const double> b,
              std::span<double> c);
void gemm_acc_nt(GemmDims d, std::span<const double> dc,
                 std::span<const double> b, std::span<double> da);
void gemm_acc_tn(GemmDims d, std::span<const double> a,
                 std::span<const double> dc, std::span<double> db);
}  // namespace omp

/// Below this many multiply-adds a parallel region costs more than it saves.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 16;

bool use_parallel(GemmDims d) noexcept;

inline void gemm(GemmDims d, std::span<const double> a,
                 std::span<const double> b, std::span<double> c) {
  use_parallel(d) ? omp::gemm(d, a, b, c) : serial::gemm(d, a, b, c);
}
inline void gemm_acc(GemmDims d, std::span<const double> a,
                     std::span<const double> b, std::span<double> c) {
  use_parallel(d) ? omp::gemm_acc(d, a, b, c) : serial::gemm_acc(d, a, b, c);
}
inline void gemm_acc_nt(GemmDims d, std::span<const double> dc,
                        std::span<const double> b, std::span<double> da) {
  use_parallel(d) ? omp::gemm_acc_nt(d, dc, b, da)
                  : serial::gemm_acc_nt(d, dc, b, da);
}
inline void gemm_acc_tn(GemmDims d, std::span<const double> a,
                        std::span<const double> dc, std::span<double> db) {
  use_parallel(d) ? omp::gemm_acc_tn(d, a, dc, db)
                  : serial::gemm_acc_tn(d, a, dc, db);
}

}  // namespace loadfc::kernels
