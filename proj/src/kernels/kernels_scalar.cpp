#include "rugged/kernels.hpp"

namespace rugged::kernels::scalar {

void row_neighbor_min(double* pre, const double* base, const double* r0,
                      const double* r1, const double* r2, int n) {
  for (int i = 0; i < n; ++i) {
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
  double best = p[a_lo] + p[sum - a_lo];
  int best_a = a_lo;
  for (int a = a_lo + 1; a <= a_hi; ++a) {
    const double c = p[a] + p[sum - a];
    if (c < best) {
      best = c;
      best_a = a;
    }
  }
  return {best, best_a};
}

void envelope_min(const double* const* members, int g, std::size_t n,
                  double* out_time, std::int32_t* out_member) {
  for (std::size_t i = 0; i < n; ++i) {
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
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = work[i] / (t[i] * 1e12);
  }
}

}  // namespace rugged::kernels::scalar
