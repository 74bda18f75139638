// AVX2 variants. Compiled with -mavx2 for this translation unit only; the
// dispatcher guards every call behind a cpuid check.

#include "rugged/kernels.hpp"

#if defined(RUGGED_HAVE_AVX2_KERNELS)

#include <immintrin.h>

namespace rugged::kernels::avx2 {

void row_neighbor_min(double* pre, const double* base, const double* r0,
                      const double* r1, const double* r2, int n) {
  int i = 0;
  // Shifted loads read [i+1, i+4], so the vector loop stops at n-1-4.
  for (; i + 4 < n; i += 4) {
    __m256d m = _mm256_loadu_pd(base + i);
    if (r0) {
      m = _mm256_min_pd(m, _mm256_loadu_pd(r0 + i));
      m = _mm256_min_pd(m, _mm256_loadu_pd(r0 + i + 1));
    }
    if (r1) {
      m = _mm256_min_pd(m, _mm256_loadu_pd(r1 + i));
      m = _mm256_min_pd(m, _mm256_loadu_pd(r1 + i + 1));
    }
    if (r2) {
      m = _mm256_min_pd(m, _mm256_loadu_pd(r2 + i));
      m = _mm256_min_pd(m, _mm256_loadu_pd(r2 + i + 1));
    }
    _mm256_storeu_pd(pre + i, m);
  }
  for (; i < n; ++i) {
    double m = base[i];
    if (r0) m = r0[i] < m ? r0[i] : m;
    if (r1) m = r1[i] < m ? r1[i] : m;
    if (r2) m = r2[i] < m ? r2[i] : m;
    if (i + 1 < n) {
      if (r0) m = r0[i + 1] < m ? r0[i + 1] : m;
      if (r1) m = r1[i + 1] < m ? r1[i + 1] : m;
      if (r2) m = r2[i + 1] < m ? r2[i + 1] : m;
    }
    pre[i] = m;
  }
}

MinIdx split_scan(const double* p, int a_lo, int a_hi, int sum) {
  const int len = a_hi - a_lo + 1;
  if (len < 8) return scalar::split_scan(p, a_lo, a_hi, sum);

  __m256d best = _mm256_set1_pd(__builtin_huge_val());
  __m256d bidx = _mm256_set1_pd(0.0);
  const __m256d idx_inc = _mm256_set1_pd(4.0);
  __m256d idx = _mm256_setr_pd(static_cast<double>(a_lo),
                               static_cast<double>(a_lo + 1),
                               static_cast<double>(a_lo + 2),
                               static_cast<double>(a_lo + 3));
  int a = a_lo;
  for (; a + 3 <= a_hi; a += 4) {
    const __m256d fwd = _mm256_loadu_pd(p + a);
    // Partner values p[sum-a-3 .. sum-a], reversed to align lanes.
    __m256d rev = _mm256_loadu_pd(p + (sum - a - 3));
    rev = _mm256_permute4x64_pd(rev, 0x1b);
    const __m256d cost = _mm256_add_pd(fwd, rev);
    // Strictly-less keeps the earliest index per lane, matching the
    // scalar first-wins scan.
    const __m256d lt = _mm256_cmp_pd(cost, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, cost, lt);
    bidx = _mm256_blendv_pd(bidx, idx, lt);
    idx = _mm256_add_pd(idx, idx_inc);
  }
  alignas(32) double bv[4];
  alignas(32) double bi[4];
  _mm256_store_pd(bv, best);
  _mm256_store_pd(bi, bidx);
  double out = bv[0];
  int out_a = static_cast<int>(bi[0]);
  for (int l = 1; l < 4; ++l) {
    const int cand = static_cast<int>(bi[l]);
    if (bv[l] < out || (bv[l] == out && cand < out_a)) {
      out = bv[l];
      out_a = cand;
    }
  }
  for (; a <= a_hi; ++a) {
    const double c = p[a] + p[sum - a];
    if (c < out) {
      out = c;
      out_a = a;
    }
  }
  return {out, out_a};
}

void envelope_min(const double* const* members, int g, std::size_t n,
                  double* out_time, std::int32_t* out_member) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d m = _mm256_loadu_pd(members[0] + i);
    __m256d w = _mm256_set1_pd(0.0);
    for (int j = 1; j < g; ++j) {
      const __m256d v = _mm256_loadu_pd(members[j] + i);
      const __m256d lt = _mm256_cmp_pd(v, m, _CMP_LT_OQ);
      m = _mm256_blendv_pd(m, v, lt);
      w = _mm256_blendv_pd(w, _mm256_set1_pd(static_cast<double>(j)), lt);
    }
    _mm256_storeu_pd(out_time + i, m);
    alignas(32) double wd[4];
    _mm256_store_pd(wd, w);
    for (int l = 0; l < 4; ++l) {
      out_member[i + l] = static_cast<std::int32_t>(wd[l]);
    }
  }
  for (; i < n; ++i) {
    double m = members[0][i];
    std::int32_t w = 0;
    for (int j = 1; j < g; ++j) {
      if (members[j][i] < m) {
        m = members[j][i];
        w = j;
      }
    }
    out_time[i] = m;
    out_member[i] = w;
  }
}

void tflops_batch(const double* work, const double* t, double* out,
                  std::size_t n) {
  const __m256d scale = _mm256_set1_pd(1e12);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w = _mm256_loadu_pd(work + i);
    const __m256d ts = _mm256_mul_pd(_mm256_loadu_pd(t + i), scale);
    _mm256_storeu_pd(out + i, _mm256_div_pd(w, ts));
  }
  for (; i < n; ++i) {
    out[i] = work[i] / (t[i] * 1e12);
  }
}

}  // namespace rugged::kernels::avx2

#endif  // RUGGED_HAVE_AVX2_KERNELS
