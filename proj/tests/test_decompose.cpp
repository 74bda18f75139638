#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rugged/decompose.hpp"
#include "rugged/metrics.hpp"

using namespace rugged;

namespace {

TimingGrid grid_of(const GridAxis& am, const GridAxis& an, const GridAxis& ak,
                   std::vector<double> times) {
  TimingGrid g;
  g.axis_m = am;
  g.axis_n = an;
  g.axis_k = ak;
  g.times = std::move(times);
  g.validate();
  return g;
}

}  // namespace

TEST_CASE("single-cell decomposition arithmetic") {
  // Pick peak so t_compute = 2 ms, and a measured memory of 1 ms.
  const GridAxis one{1000, 1, 1};
  const double peak = 2.0 * 1000 * 1000 * 1000 / (2e-3) / 1e12;
  const TimingGrid gemm = grid_of(one, one, one, {3e-3});
  const TimingGrid mem = grid_of(one, one, one, {1e-3});
  const auto s = decompose(gemm, mem, peak);
  CHECK(s.t_compute[0] == doctest::Approx(2e-3).epsilon(1e-12));
  CHECK(s.t_overhead[0] == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(s.overhead_fraction[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(s.negative_overhead_cells == 0);

  // Exactly the max: zero overhead.
  const TimingGrid gemm2 = grid_of(one, one, one, {2e-3});
  CHECK(decompose(gemm2, mem, peak).t_overhead[0] == doctest::Approx(0.0));

  // Below the max: negative overhead retained and counted, never clamped.
  const TimingGrid gemm3 = grid_of(one, one, one, {1.5e-3});
  const auto s3 = decompose(gemm3, mem, peak);
  CHECK(s3.t_overhead[0] < 0.0);
  CHECK(s3.negative_overhead_cells == 1);
}

TEST_CASE("reconstruction is exact on every cell") {
  const GridAxis ax = default_axis(128, 384, 4096);
  const TimingGrid gemm = generate(preset("bmg-b580"), ax, ax, ax);
  const auto s = decompose(gemm, preset("bmg-b580"), 116.5);
  for (std::size_t i = 0; i < s.cell_count(); ++i) {
    // The residual identity, in the rounding order it is defined in.
    CHECK(s.t_overhead[i] ==
          s.t_gemm[i] - std::max(s.t_compute[i], s.t_memory[i]));
    CHECK(std::max(s.t_compute[i], s.t_memory[i]) + s.t_overhead[i] ==
          doctest::Approx(s.t_gemm[i]).epsilon(1e-15));
  }
  CHECK(s.memory_source == "modeled");
}

TEST_CASE("compute surface has zero roughness in TFLOPs terms") {
  const GridAxis ax = default_axis(128, 128, 2048);
  const TimingGrid gemm = generate(preset("bmg-b580"), ax, ax, ax);
  const auto s = decompose(gemm, preset("bmg-b580"), 116.5);
  // Achieved TFLOPs of the compute surface is the peak at every cell.
  std::vector<double> tf;
  for (int in = 0; in < ax.count; ++in) {
    const std::size_t i = s.index(ax.count - 1, in, ax.count - 1);
    tf.push_back(tflops_of(ax.max_value(), ax.value(in), ax.max_value(),
                           s.t_compute[i]));
  }
  CHECK(metrics::roughness(tf) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("bottleneck classification partitions and shifts with bandwidth") {
  const GridAxis ax = default_axis(128, 256, 4096);
  const TimingGrid gemm = generate(preset("bmg-b580"), ax, ax, ax);

  CostModelParams lo = preset("bmg-b580");
  lo.mem_bw_gbps = 270.0;
  CostModelParams hi = preset("bmg-b580");
  hi.mem_bw_gbps = 456.0;
  const auto split_lo = classify_bottleneck(decompose(gemm, lo, 116.5), "270");
  const auto split_hi = classify_bottleneck(decompose(gemm, hi, 116.5), "456");

  CHECK(split_lo.compute_bound_fraction + split_lo.memory_bound_fraction ==
        doctest::Approx(1.0));
  CHECK(split_lo.compute_bound_cells + split_lo.memory_bound_cells ==
        gemm.cell_count());
  // Lower bandwidth shifts the split toward memory-bound.
  CHECK(split_lo.compute_bound_fraction < split_hi.compute_bound_fraction);
  CHECK(split_lo.memory_bound_fraction > 0.0);
  CHECK(split_hi.compute_bound_fraction > 0.0);

  // Doubling bandwidth again only adds compute-bound cells.
  CostModelParams hi2 = hi;
  hi2.mem_bw_gbps = 912.0;
  const auto split_hi2 = classify_bottleneck(decompose(gemm, hi2, 116.5), "912");
  CHECK(split_hi2.compute_bound_fraction >= split_hi.compute_bound_fraction);
}

TEST_CASE("overhead fraction sits near the multiplicative base at plateau cells") {
  // Aligned, wave-exact cells: padded == raw, so the fraction reduces to
  // 1 - 1/overhead_factor with the factor in [1.28, 1.36].
  const GridAxis ax = default_axis(128, 128, 4096);
  const TimingGrid gemm = generate(preset("bmg-b580"), ax, ax, ax);
  const auto s = decompose(gemm, preset("bmg-b580"), 116.5);
  const int ik = ax.count - 1;
  double lo = 1.0, hi = 0.0;
  // M = 2560 (10 tiles) with N giving workgroup counts that are multiples
  // of 20: the wave penalty is exactly 1 and padding is the identity, so
  // the fraction reduces to the multiplicative base plus the launch term.
  const int im = ax.index_of(2560);
  for (dim_t n : {dim_t(1024), dim_t(2048), dim_t(4096)}) {
    const std::size_t c = s.index(im, ax.index_of(n), ik);
    REQUIRE(s.t_compute[c] >= s.t_memory[c]);  // plateau cells compute-bound
    const double f = s.overhead_fraction[c];
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  CHECK(lo > 0.20);
  CHECK(hi < 0.30);
  CHECK(hi - lo < 0.07);  // near-constant across N
}

TEST_CASE("lattice mismatch raises shape_error") {
  const GridAxis a = default_axis(128, 128, 512);
  const GridAxis b = default_axis(128, 128, 640);
  const TimingGrid g1 = generate(preset("roofline"), a, a, a);
  const TimingGrid g2 = generate(preset("roofline"), b, b, b);
  CHECK_THROWS_AS(decompose(g1, g2, 116.5), shape_error);
}

TEST_CASE("stacked csv emits one row per N") {
  const GridAxis ax = default_axis(128, 128, 512);
  const TimingGrid gemm = generate(preset("bmg-b580"), ax, ax, ax);
  const auto s = decompose(gemm, preset("bmg-b580"), 116.5);
  const std::string csv = stacked_csv(s, 512, 512);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == ax.count + 1);
  CHECK_THROWS_AS(stacked_csv(s, 100, 512), lookup_error);
}
