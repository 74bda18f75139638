// Runtime backend selection for the batch kernels.

#include "rugged/kernels.hpp"

#include <cstdlib>

namespace rugged::kernels {

namespace {

Backend detect_backend() {
  const char* force = std::getenv("RUGGED_FORCE_SCALAR");
  if (force && force[0] == '1') return Backend::scalar;
#if defined(RUGGED_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  if (__builtin_cpu_supports("avx2")) return Backend::avx2;
#endif
  return Backend::scalar;
}

}  // namespace

Backend active_backend() {
  static const Backend b = detect_backend();
  return b;
}

const char* backend_name() {
  return active_backend() == Backend::avx2 ? "avx2" : "scalar";
}

void row_neighbor_min(double* pre, const double* base, const double* r0,
                      const double* r1, const double* r2, int n) {
#if defined(RUGGED_HAVE_AVX2_KERNELS)
  if (active_backend() == Backend::avx2) {
    avx2::row_neighbor_min(pre, base, r0, r1, r2, n);
    return;
  }
#endif
  scalar::row_neighbor_min(pre, base, r0, r1, r2, n);
}

MinIdx split_scan(const double* p, int a_lo, int a_hi, int sum) {
#if defined(RUGGED_HAVE_AVX2_KERNELS)
  if (active_backend() == Backend::avx2) {
    return avx2::split_scan(p, a_lo, a_hi, sum);
  }
#endif
  return scalar::split_scan(p, a_lo, a_hi, sum);
}

void envelope_min(const double* const* members, int g, std::size_t n,
                  double* out_time, std::int32_t* out_member) {
#if defined(RUGGED_HAVE_AVX2_KERNELS)
  if (active_backend() == Backend::avx2) {
    avx2::envelope_min(members, g, n, out_time, out_member);
    return;
  }
#endif
  scalar::envelope_min(members, g, n, out_time, out_member);
}

void tflops_batch(const double* work, const double* t, double* out,
                  std::size_t n) {
#if defined(RUGGED_HAVE_AVX2_KERNELS)
  if (active_backend() == Backend::avx2) {
    avx2::tflops_batch(work, t, out, n);
    return;
  }
#endif
  scalar::tflops_batch(work, t, out, n);
}

}  // namespace rugged::kernels
