#pragma once

// Batch inner-loop kernels with scalar reference implementations and AVX2
// variants selected at runtime. All variants are bit-exact equivalents of
// the scalar reference: they vectorize across independent elements and use
// only order-insensitive reductions (min with first-wins ties), so the
// dispatched result never depends on the backend.

#include <cstddef>
#include <cstdint>

namespace rugged::kernels {

enum class Backend { scalar, avx2 };

// Backend chosen at startup (cpuid); RUGGED_FORCE_SCALAR=1 overrides.
Backend active_backend();
const char* backend_name();

struct MinIdx {
  double value;
  int index;
};

// pre[i] = min(base[i], r0[i], r1[i], r2[i], r0[i+1], r1[i+1], r2[i+1]) for
// i < n-1, and min over the unshifted terms at i = n-1. r0/r1/r2 may be null
// (absent neighbor rows at lattice boundaries). Used by the pad-table
// relaxation: base is the t0 row, r* are already-final neighbor rows.
void row_neighbor_min(double* pre, const double* base, const double* r0,
                      const double* r1, const double* r2, int n);

// min over a in [a_lo, a_hi] of p[a] + p[sum - a]; ties take the smallest a.
// Requires 0 <= a_lo <= a_hi and sum - a in range for all scanned a.
MinIdx split_scan(const double* p, int a_lo, int a_hi, int sum);

// Cellwise min across `g` member arrays with first-wins (smallest member
// index) ties. Writes the min into out_time and the member index into
// out_member.
void envelope_min(const double* const* members, int g, std::size_t n,
                  double* out_time, std::int32_t* out_member);

// out[i] = work[i] / (t[i] * 1e12); work is the per-cell 2*M*N*K product.
void tflops_batch(const double* work, const double* t, double* out,
                  std::size_t n);

// Scalar reference implementations (always available; used by the
// equivalence tests and as the fallback backend).
namespace scalar {
void row_neighbor_min(double* pre, const double* base, const double* r0,
                      const double* r1, const double* r2, int n);
MinIdx split_scan(const double* p, int a_lo, int a_hi, int sum);
void envelope_min(const double* const* members, int g, std::size_t n,
                  double* out_time, std::int32_t* out_member);
void tflops_batch(const double* work, const double* t, double* out,
                  std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define RUGGED_HAVE_AVX2_KERNELS 1
namespace avx2 {
void row_neighbor_min(double* pre, const double* base, const double* r0,
                      const double* r1, const double* r2, int n);
MinIdx split_scan(const double* p, int a_lo, int a_hi, int sum);
void envelope_min(const double* const* members, int g, std::size_t n,
                  double* out_time, std::int32_t* out_member);
void tflops_batch(const double* work, const double* t, double* out,
                  std::size_t n);
}  // namespace avx2
#endif

}  // namespace rugged::kernels
