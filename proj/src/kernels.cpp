// SPDX-License-Identifier: Apache-2.0
#include "loadfc/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace loadfc::kernels {

namespace {

// Eight independent partial sums so the loop vectorizes without reassociation
// flags; the summation order is fixed, so results are reproducible.
inline double dot(std::size_t n, const double* __restrict a,
                  const double* __restrict b) {
  double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    for (std::size_t l = 0; l < 8; ++l) acc[l] += a[j + l] * b[j + l];
  }
  double tail = 0.0;
  for (; j < n; ++j) tail += a[j] * b[j];
  return ((acc[0] + acc[4]) + (acc[1] + acc[5])) +
         ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail;
}

// da_row[p0,p1) += dc_row . B[p, :] for each p
inline void nt_row_block(GemmDims d, const double* dc_row, const double* b,
                         double* da_row, std::size_t p0, std::size_t p1) {
  for (std::size_t p = p0; p < p1; ++p) da_row[p] += dot(d.n, dc_row, b + p * d.n);
}

// Accumulators for up to 64 consecutive output columns stay in registers
// while the reduction index runs; each output is summed in increasing index
// order, so the column blocking never changes a result.
template <std::size_t W>
inline void c_cols(std::size_t k, std::size_t n, const double* __restrict a_row,
                   const double* __restrict b, double* __restrict c, bool acc_in) {
  double acc[W];
  for (std::size_t l = 0; l < W; ++l) acc[l] = acc_in ? c[l] : 0.0;
  for (std::size_t p = 0; p < k; ++p) {
    const double s = a_row[p];
    const double* bp = b + p * n;
    for (std::size_t l = 0; l < W; ++l) acc[l] += s * bp[l];
  }
  for (std::size_t l = 0; l < W; ++l) c[l] = acc[l];
}

// c_row[j0,j1) (+)= a_row * B[:, j0:j1)
inline void gemm_row_block(GemmDims d, const double* a_row, const double* b,
                           double* c_row, std::size_t j0, std::size_t j1,
                           bool acc_in) {
  std::size_t j = j0;
  for (; j + 64 <= j1; j += 64) c_cols<64>(d.k, d.n, a_row, b + j, c_row + j, acc_in);
  for (; j + 32 <= j1; j += 32) c_cols<32>(d.k, d.n, a_row, b + j, c_row + j, acc_in);
  for (; j < j1; ++j) c_cols<1>(d.k, d.n, a_row, b + j, c_row + j, acc_in);
}

template <std::size_t W>
inline void tn_cols(GemmDims d, std::size_t p, const double* __restrict a,
                    const double* __restrict dc, double* __restrict db) {
  double acc[W];
  for (std::size_t l = 0; l < W; ++l) acc[l] = db[l];
  for (std::size_t i = 0; i < d.m; ++i) {
    const double s = a[i * d.k + p];
    const double* g = dc + i * d.n;
    for (std::size_t l = 0; l < W; ++l) acc[l] += s * g[l];
  }
  for (std::size_t l = 0; l < W; ++l) db[l] = acc[l];
}

// dB[p, j0:j1) += A[:, p]^T dC[:, j0:j1)
inline void tn_row_block(GemmDims d, std::size_t p, const double* a,
                         const double* dc, double* db, std::size_t j0,
                         std::size_t j1) {
  double* db_row = db + p * d.n;
  std::size_t j = j0;
  for (; j + 64 <= j1; j += 64) tn_cols<64>(d, p, a, dc + j, db_row + j);
  for (; j + 32 <= j1; j += 32) tn_cols<32>(d, p, a, dc + j, db_row + j);
  for (; j < j1; ++j) tn_cols<1>(d, p, a, dc + j, db_row + j);
}

constexpr std::size_t kColBlock = 64;

}  // namespace

bool use_parallel(GemmDims d) noexcept {
  return d.m * d.k * d.n >= kParallelThreshold && !omp_in_parallel() &&
         omp_get_max_threads() > 1;
}

namespace serial {

void gemm(GemmDims d, std::span<const double> a, std::span<const double> b,
          std::span<double> c) {
  for (std::size_t i = 0; i < d.m; ++i)
    gemm_row_block(d, a.data() + i * d.k, b.data(), c.data() + i * d.n, 0, d.n, false);
}

void gemm_acc(GemmDims d, std::span<const double> a, std::span<const double> b,
              std::span<double> c) {
  for (std::size_t i = 0; i < d.m; ++i)
    gemm_row_block(d, a.data() + i * d.k, b.data(), c.data() + i * d.n, 0, d.n, true);
}

void gemm_acc_nt(GemmDims d, std::span<const double> dc,
                 std::span<const double> b, std::span<double> da) {
  for (std::size_t i = 0; i < d.m; ++i)
    nt_row_block(d, dc.data() + i * d.n, b.data(), da.data() + i * d.k, 0, d.k);
}

void gemm_acc_tn(GemmDims d, std::span<const double> a,
                 std::span<const double> dc, std::span<double> db) {
  for (std::size_t p = 0; p < d.k; ++p)
    tn_row_block(d, p, a.data(), dc.data(), db.data(), 0, d.n);
}

}  // namespace serial

namespace omp {

// Work is split on output elements only, so every C/dA/dB entry is produced
// by exactly one thread with the same summation order as serial::.

namespace {

void gemm_blocks(GemmDims d, std::span<const double> a, std::span<const double> b,
                 std::span<double> c, bool acc_in) {
  const std::size_t blocks = (d.n + kColBlock - 1) / kColBlock;
  const auto tasks = static_cast<long>(d.m * blocks);
#pragma omp parallel for schedule(static)
  for (long t = 0; t < tasks; ++t) {
    const std::size_t i = std::size_t(t) / blocks;
    const std::size_t j0 = (std::size_t(t) % blocks) * kColBlock;
    const std::size_t j1 = std::min(d.n, j0 + kColBlock);
    gemm_row_block(d, a.data() + i * d.k, b.data(), c.data() + i * d.n, j0, j1,
                   acc_in);
  }
}

}  // namespace

void gemm(GemmDims d, std::span<const double> a, std::span<const double> b,
          std::span<double> c) {
  gemm_blocks(d, a, b, c, false);
}

void gemm_acc(GemmDims d, std::span<const double> a, std::span<const double> b,
              std::span<double> c) {
  gemm_blocks(d, a, b, c, true);
}

void gemm_acc_nt(GemmDims d, std::span<const double> dc,
                 std::span<const double> b, std::span<double> da) {
  const std::size_t blocks = (d.k + kColBlock - 1) / kColBlock;
  const auto tasks = static_cast<long>(d.m * blocks);
#pragma omp parallel for schedule(static)
  for (long t = 0; t < tasks; ++t) {
    const std::size_t i = std::size_t(t) / blocks;
    const std::size_t p0 = (std::size_t(t) % blocks) * kColBlock;
    const std::size_t p1 = std::min(d.k, p0 + kColBlock);
    nt_row_block(d, dc.data() + i * d.n, b.data(), da.data() + i * d.k, p0, p1);
  }
}

void gemm_acc_tn(GemmDims d, std::span<const double> a,
                 std::span<const double> dc, std::span<double> db) {
  const std::size_t blocks = (d.n + kColBlock - 1) / kColBlock;
  const auto tasks = static_cast<long>(d.k * blocks);
#pragma omp parallel for schedule(static)
  for (long t = 0; t < tasks; ++t) {
    const std::size_t p = std::size_t(t) / blocks;
    const std::size_t j0 = (std::size_t(t) % blocks) * kColBlock;
    const std::size_t j1 = std::min(d.n, j0 + kColBlock);
    tn_row_block(d, p, a.data(), dc.data(), db.data(), j0, j1);
  }
}

}  // namespace omp

}  // namespace loadfc::kernels
