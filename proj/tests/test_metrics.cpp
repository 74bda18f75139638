#include <doctest.h>

#include <cmath>
#include <vector>

#include "rugged/costmodel.hpp"
#include "rugged/metrics.hpp"

using namespace rugged;
namespace mt = rugged::metrics;

TEST_CASE("roughness basics") {
  CHECK(mt::roughness(std::vector<double>{5, 5, 5}) == 0.0);
  CHECK(mt::roughness(std::vector<double>{10, 12, 11}) == doctest::Approx(1.5));
  CHECK_THROWS_AS(mt::roughness(std::vector<double>{1.0}), domain_error);
}

TEST_CASE("roughness homogeneity and shift invariance") {
  std::vector<double> seq;
  for (int i = 0; i < 40; ++i) {
    seq.push_back(50.0 + 20.0 * hash_unit(splitmix64(i)));
  }
  const double base = mt::roughness(seq);
  for (double a : {0.5, 3.0, 17.0}) {
    std::vector<double> scaled, shifted;
    for (double v : seq) {
      scaled.push_back(a * v);
      shifted.push_back(v + a);
    }
    CHECK(mt::roughness(scaled) == doctest::Approx(a * base).epsilon(1e-12));
    CHECK(mt::roughness(shifted) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("cv basics and invariance") {
  CHECK(mt::cv_percent(std::vector<double>{1, 1, 1, 1}) == 0.0);
  CHECK(mt::cv_percent(std::vector<double>{90, 110}) == doctest::Approx(10.0));
  CHECK_THROWS_AS(mt::cv_percent(std::vector<double>{1.0, -1.0}), domain_error);

  // 50-run fixture with population CV exactly 0.06%.
  std::vector<double> runs;
  for (int i = 0; i < 25; ++i) {
    runs.push_back(100.06);
    runs.push_back(99.94);
  }
  CHECK(std::abs(mt::cv_percent(runs) - 0.06) < 1e-9);

  std::vector<double> scaled;
  for (double v : runs) scaled.push_back(3.5 * v);
  CHECK(mt::cv_percent(scaled) == doctest::Approx(mt::cv_percent(runs)).epsilon(1e-12));
}

TEST_CASE("drift over first and last deciles") {
  CHECK(mt::drift_percent(std::vector<double>(50, 7.0)) == 0.0);

  // First decile mean 100, last decile mean 143.
  std::vector<double> seq(100, 120.0);
  for (int i = 0; i < 10; ++i) seq[i] = 100.0;
  for (int i = 90; i < 100; ++i) seq[i] = 143.0;
  CHECK(mt::drift_percent(seq) == doctest::Approx(43.0).epsilon(1e-12));

  // Linear ramp 100 -> 200 over 100 points; oracle: decile means of the
  // arithmetic sequence directly.
  std::vector<double> ramp(100);
  for (int i = 0; i < 100; ++i) ramp[i] = 100.0 + 100.0 * i / 99.0;
  double f = 0, l = 0;
  for (int i = 0; i < 10; ++i) f += ramp[i];
  for (int i = 90; i < 100; ++i) l += ramp[i];
  const double expect = (l - f) / f * 100.0;
  CHECK(expect == doctest::Approx(86.9565).epsilon(1e-4));
  CHECK(mt::drift_percent(ramp) == doctest::Approx(expect).epsilon(1e-12));

  CHECK_THROWS_AS(mt::drift_percent(std::vector<double>{1, 2, 3}), domain_error);

  // Scale invariance.
  std::vector<double> scaled;
  for (double v : ramp) scaled.push_back(0.25 * v);
  CHECK(mt::drift_percent(scaled) == doctest::Approx(mt::drift_percent(ramp)).epsilon(1e-12));
}

namespace {

TimingGrid one_cell_grid(dim_t m, dim_t n, dim_t k) {
  TimingGrid g;
  g.axis_m = {m, 1, 1};
  g.axis_n = {n, 1, 1};
  g.axis_k = {k, 1, 1};
  g.times = {1e-3};
  g.validate();
  return g;
}

}  // namespace

TEST_CASE("regime thresholds applied exactly") {
  auto regime_of = [](dim_t m, dim_t n, dim_t k) {
    const auto s = mt::classify_regimes(one_cell_grid(m, n, k));
    if (s.launch_dominated.count) return 0;
    if (s.scaling.count) return 1;
    return 2;
  };
  CHECK(regime_of(368, 368, 368) == 0);     // 4.98e7 < 1e8
  CHECK(regime_of(1000, 1000, 100) == 1);   // exactly 1e8: left-closed scaling
  CHECK(regime_of(1000, 1000, 1000) == 1);  // 1e9
  CHECK(regime_of(10000, 1000, 1000) == 2); // exactly 1e10: saturated
  CHECK(regime_of(5000, 5000, 4000) == 2);  // 1e11
}

TEST_CASE("regime classification partitions every grid") {
  const GridAxis ax = default_axis(128, 512, 4096);
  const TimingGrid g = generate(preset("bmg-b580"), ax, ax, ax);
  const auto s = mt::classify_regimes(g);
  CHECK(s.total() == g.cell_count());
  CHECK(s.launch_dominated.count > 0);
  CHECK(s.saturated.count > 0);
  // Mean throughput must rise across regimes on the synthetic landscape.
  CHECK(s.launch_dominated.mean_tflops < s.scaling.mean_tflops);
  CHECK(s.scaling.mean_tflops < s.saturated.mean_tflops);
}

TEST_CASE("alignment cliff on flat and waste-only surfaces") {
  const GridAxis ax = default_axis(128, 128, 2048);
  const TimingGrid flat = generate(preset("roofline"), ax, ax, ax);
  CHECK(mt::alignment_cliff(flat, Axis::N, 256) == doctest::Approx(0.0).epsilon(1e-9));

  CostModelParams p;
  p.toggles = {true, false, false, false, false};
  p.launch_s = 0.0;
  p.mem_bw_gbps = 1e9;
  const TimingGrid waste = generate(p, ax, ax, ax);
  CHECK(mt::alignment_cliff(waste, Axis::N, 256) > 0.0);
}

TEST_CASE("N cliff exceeds M cliff under sub-group asymmetry") {
  // Step-32 lattice; sg_n = 64 vs sg_m = 32 makes 32-offsets waste on N only.
  CostModelParams p;
  p.toggles = {true, true, false, false, false};
  p.launch_s = 0.0;
  p.mem_bw_gbps = 1e9;
  const GridAxis ax{2048, 32, 16};
  const GridAxis akf{2048, 1, 1};
  const TimingGrid g = generate(p, ax, ax, akf);
  const double cliff_n = mt::alignment_cliff(g, Axis::N, 64);
  const double cliff_m = mt::alignment_cliff(g, Axis::M, 64);
  CHECK(cliff_n > 0.0);
  CHECK(cliff_n > cliff_m);
  CHECK(cliff_m == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("alignment cliff error paths") {
  const GridAxis ax = default_axis(128, 128, 1024);
  const TimingGrid g = generate(preset("roofline"), ax, ax, ax);
  CHECK_THROWS_AS(mt::alignment_cliff(g, Axis::N, 100), domain_error);
}

namespace {

Slice1D synthetic_sawtooth(int period_steps, int n_points, dim_t step) {
  Slice1D s;
  s.sweep_axis = Axis::N;
  s.fixed_a = 4096;
  s.fixed_b = 4096;
  s.step = step;
  for (int i = 0; i < n_points; ++i) {
    SlicePoint p;
    p.value = 3000 + static_cast<dim_t>(i) * step;
    p.tflops = 80.0 + 5.0 * (i % period_steps);
    p.time_s = 1e-3;  // times unused by period detection
    s.points.push_back(p);
  }
  return s;
}

}  // namespace

TEST_CASE("sawtooth period on pure synthetic sawtooth") {
  for (int p : {2, 4, 8}) {
    const Slice1D s = synthetic_sawtooth(p, 40, 32);
    const auto r = mt::sawtooth_period(s);
    CHECK(r.has_period);
    CHECK(r.period == static_cast<dim_t>(p) * 32);
  }
}

TEST_CASE("sawtooth period on generated waste-only fine slices") {
  for (dim_t tile : {dim_t(64), dim_t(128), dim_t(256)}) {
    CostModelParams p;
    p.tile_m = p.tile_n = tile;
    p.toggles = {true, false, false, false, false};
    p.launch_s = 0.0;
    p.mem_bw_gbps = 1e9;
    const GridAxis axf{4096, 1, 1};
    const GridAxis axn{3000, 32, 35};
    const TimingGrid g = generate(p, axf, axn, axf);
    const auto r = mt::sawtooth_period(slice(g, Axis::N, 4096, 4096));
    CHECK(r.has_period);
    CHECK(r.period == tile);
    CHECK(r.valley_remainder == 24);  // smallest nonzero remainder sampled
  }
}

TEST_CASE("flat slice has no period") {
  Slice1D s = synthetic_sawtooth(4, 16, 32);
  for (auto& p : s.points) p.tflops = 90.0;
  const auto r = mt::sawtooth_period(s);
  CHECK_FALSE(r.has_period);
  Slice1D tiny = synthetic_sawtooth(2, 7, 32);
  CHECK_THROWS_AS(mt::sawtooth_period(tiny), domain_error);
}

TEST_CASE("aggregate roughness definitions") {
  const GridAxis ax = default_axis(128, 256, 2048);
  const TimingGrid flat = generate(preset("roofline"), ax, ax, ax);
  const auto r = mt::aggregate_roughness(flat);
  CHECK(r.m == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.n == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.k == doctest::Approx(0.0).epsilon(1e-9));

  // 2-point-per-axis grid: each axis mean equals the mean of its 4 slices.
  const GridAxis two{128, 128, 2};
  TimingGrid g;
  g.axis_m = g.axis_n = g.axis_k = two;
  g.times.resize(8);
  for (std::size_t i = 0; i < 8; ++i) g.times[i] = 1e-4 * (1.0 + 0.2 * i);
  g.validate();
  double manual = 0.0;
  for (int in = 0; in < 2; ++in)
    for (int ik = 0; ik < 2; ++ik)
      manual += mt::roughness(slice(g, Axis::M, two.value(in), two.value(ik)).tflops_values());
  manual /= 4.0;
  CHECK(mt::aggregate_roughness(g).m == doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("K axis is smoother than N axis on the full model") {
  const GridAxis ax = default_axis(128, 256, 4096);
  const TimingGrid g = generate(preset("bmg-b580"), ax, ax, ax);
  const auto r = mt::aggregate_roughness(g);
  CHECK(r.k < r.n);
}

TEST_CASE("full report content") {
  const GridAxis ax = default_axis(128, 256, 4096);
  const TimingGrid g = generate(preset("bmg-b580"), ax, ax, ax);
  const auto rep = mt::full_report(g);
  CHECK(rep.regimes.total() == g.cell_count());
  CHECK(rep.peak_tflops > rep.mean_tflops);
  CHECK(rep.canonical_mean_tflops > 0.0);
  const std::string json = mt::report_to_json(rep);
  CHECK(json.find("aggregate_3d") != std::string::npos);
  const std::string csv = mt::slices_to_csv(g);
  CHECK(csv.find("N,") != std::string::npos);
}
