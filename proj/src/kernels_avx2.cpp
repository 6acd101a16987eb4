// Compiled with -mavx2 only; never called unless the CPU reports AVX2.
#include <immintrin.h>

#include <cmath>

#include "ads3/kernels.hpp"

namespace ads3::kernels::avx2 {

namespace {

inline __m256d form4(__m256d a1, __m256d a2, __m256d a3, __m256d a4, const double* b1, const double* b2,
                     const double* b3, const double* b4, std::size_t j) {
  const __m256d s12 = _mm256_add_pd(_mm256_mul_pd(a1, _mm256_loadu_pd(b1 + j)), _mm256_mul_pd(a2, _mm256_loadu_pd(b2 + j)));
  const __m256d s123 = _mm256_sub_pd(s12, _mm256_mul_pd(a3, _mm256_loadu_pd(b3 + j)));
  return _mm256_sub_pd(s123, _mm256_mul_pd(a4, _mm256_loadu_pd(b4 + j)));
}

}  // namespace

void inner_batch(const LorentzVec& a, const double* b1, const double* b2, const double* b3, const double* b4,
                 std::size_t n, double* out) {
  const __m256d a1 = _mm256_set1_pd(a.x1), a2 = _mm256_set1_pd(a.x2), a3 = _mm256_set1_pd(a.x3),
                a4 = _mm256_set1_pd(a.x4);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) _mm256_storeu_pd(out + j, form4(a1, a2, a3, a4, b1, b2, b3, b4, j));
  for (; j < n; ++j) out[j] = ((a.x1 * b1[j] + a.x2 * b2[j]) - a.x3 * b3[j]) - a.x4 * b4[j];
}

ArgMin min_abs_inner(const LorentzVec& a, const double* b1, const double* b2, const double* b3, const double* b4,
                     std::size_t n) {
  const __m256d a1 = _mm256_set1_pd(a.x1), a2 = _mm256_set1_pd(a.x2), a3 = _mm256_set1_pd(a.x3),
                a4 = _mm256_set1_pd(a.x4);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d best = _mm256_set1_pd(INFINITY);
  __m256d best_idx = _mm256_setzero_pd();
  __m256d idx = _mm256_set_pd(3, 2, 1, 0);
  const __m256d four = _mm256_set1_pd(4.0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d v = _mm256_andnot_pd(sign_mask, form4(a1, a2, a3, a4, b1, b2, b3, b4, j));
    // Strict less keeps the first minimum within each lane.
    const __m256d lt = _mm256_cmp_pd(v, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, v, lt);
    best_idx = _mm256_blendv_pd(best_idx, idx, lt);
    idx = _mm256_add_pd(idx, four);
  }
  alignas(32) double bv[4], bi[4];
  _mm256_store_pd(bv, best);
  _mm256_store_pd(bi, best_idx);
  ArgMin out{INFINITY, 0};
  for (int l = 0; l < 4; ++l) {
    const auto li = static_cast<std::uint32_t>(bi[l]);
    if (bv[l] < out.value || (bv[l] == out.value && li < out.index)) out = {bv[l], li};
  }
  for (; j < n; ++j) {
    const double v = std::fabs(((a.x1 * b1[j] + a.x2 * b2[j]) - a.x3 * b3[j]) - a.x4 * b4[j]);
    if (v < out.value) out = {v, static_cast<std::uint32_t>(j)};
  }
  return out;
}

}  // namespace ads3::kernels::avx2
