#include <doctest.h>

#include <vector>

#include "rugged/common.hpp"
#include "rugged/kernels.hpp"

using namespace rugged;
namespace k = rugged::kernels;

namespace {

std::vector<double> random_vec(std::uint64_t seed, std::size_t n,
                               int distinct = 0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t h = splitmix64(seed + i);
    if (distinct > 0) h %= distinct;  // force ties
    v[i] = 1e-4 * (1.0 + static_cast<double>(h % 1000003) / 1000003.0);
  }
  return v;
}

bool have_avx2() { return k::active_backend() == k::Backend::avx2; }

}  // namespace

// The AVX2 variants must be bit-exact equivalents of the scalar reference,
// including tie behavior of the argmin kernels.

TEST_CASE("row_neighbor_min scalar/avx2 equivalence") {
  if (!have_avx2()) return;
  for (int n : {1, 2, 3, 7, 8, 9, 31, 32, 33, 200}) {
    const auto base = random_vec(1000 + n, n);
    const auto r0 = random_vec(2000 + n, n);
    const auto r1 = random_vec(3000 + n, n);
    const auto r2 = random_vec(4000 + n, n);
    for (int mask = 0; mask < 8; ++mask) {
      const double* p0 = (mask & 1) ? r0.data() : nullptr;
      const double* p1 = (mask & 2) ? r1.data() : nullptr;
      const double* p2 = (mask & 4) ? r2.data() : nullptr;
      std::vector<double> a(n), b(n);
      k::scalar::row_neighbor_min(a.data(), base.data(), p0, p1, p2, n);
      k::avx2::row_neighbor_min(b.data(), base.data(), p0, p1, p2, n);
      REQUIRE(a == b);
    }
  }
}

TEST_CASE("split_scan scalar/avx2 equivalence with ties") {
  if (!have_avx2()) return;
  for (int len : {4, 8, 16, 33, 64, 127}) {
    // distinct=4 forces many exact ties, exercising the smallest-index rule
    for (int distinct : {0, 4}) {
      const auto p = random_vec(500 + len + distinct, len, distinct);
      for (int sum = 1; sum < len; ++sum) {
        const int a_lo = std::max(0, sum - (len - 1));
        const int a_hi = sum / 2;
        if (a_lo > a_hi) continue;
        const auto s = k::scalar::split_scan(p.data(), a_lo, a_hi, sum);
        const auto v = k::avx2::split_scan(p.data(), a_lo, a_hi, sum);
        REQUIRE(s.value == v.value);
        REQUIRE(s.index == v.index);
      }
    }
  }
}

TEST_CASE("envelope_min scalar/avx2 equivalence with ties") {
  if (!have_avx2()) return;
  for (std::size_t n : {1ul, 4ul, 5ul, 64ul, 1001ul}) {
    for (int g : {2, 3, 6}) {
      std::vector<std::vector<double>> grids;
      std::vector<const double*> ptrs;
      for (int j = 0; j < g; ++j) {
        grids.push_back(random_vec(900 + j, n, 3));  // ties likely
        ptrs.push_back(grids.back().data());
      }
      std::vector<double> ta(n), tb(n);
      std::vector<std::int32_t> wa(n), wb(n);
      k::scalar::envelope_min(ptrs.data(), g, n, ta.data(), wa.data());
      k::avx2::envelope_min(ptrs.data(), g, n, tb.data(), wb.data());
      REQUIRE(ta == tb);
      REQUIRE(wa == wb);
    }
  }
}

TEST_CASE("tflops_batch scalar/avx2 equivalence") {
  if (!have_avx2()) return;
  for (std::size_t n : {1ul, 3ul, 4ul, 8ul, 17ul, 250ul}) {
    const auto work = random_vec(1, n);
    const auto t = random_vec(2, n);
    std::vector<double> a(n), b(n);
    k::scalar::tflops_batch(work.data(), t.data(), a.data(), n);
    k::avx2::tflops_batch(work.data(), t.data(), b.data(), n);
    REQUIRE(a == b);
  }
}

TEST_CASE("dispatched kernels match scalar") {
  const std::size_t n = 77;
  const auto work = random_vec(10, n);
  const auto t = random_vec(11, n);
  std::vector<double> a(n), b(n);
  k::scalar::tflops_batch(work.data(), t.data(), a.data(), n);
  k::tflops_batch(work.data(), t.data(), b.data(), n);
  CHECK(a == b);

  const auto p = random_vec(12, 40);
  const auto s = k::scalar::split_scan(p.data(), 0, 15, 31);
  const auto d = k::split_scan(p.data(), 0, 15, 31);
  CHECK(s.value == d.value);
  CHECK(s.index == d.index);
}

TEST_CASE("split_scan picks the smallest index among exact ties") {
  const std::vector<double> p = {2.0, 1.0, 1.0, 2.0, 1.0, 1.0};
  // sum=5: candidates a=0..2 pair with 5-a: costs 4, 2, 2 -> a=1 wins the tie
  const auto r = k::scalar::split_scan(p.data(), 0, 2, 5);
  CHECK(r.value == 2.0);
  CHECK(r.index == 1);
}
