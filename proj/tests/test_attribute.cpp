#include <doctest.h>

#include <cmath>

#include "rugged/attribute.hpp"
#include "rugged/costmodel.hpp"
#include "rugged/metrics.hpp"

using namespace rugged;

namespace {

AttributionContext ctx_of(const CostModelParams& p) {
  return {p.tile_m, p.tile_n, p.sg_m, p.sg_n, p.cores, p.channels};
}

const MechanismContribution& find(const AttributionReport& r,
                                  const std::string& name) {
  for (const auto& m : r.mechanisms) {
    if (m.name == name) return m;
  }
  throw std::logic_error("no mechanism named " + name);
}

double share(const AttributionReport& r, const std::string& name) {
  const auto& m = find(r, name);
  if (!m.defined) return 0.0;  // never-active predicates contribute nothing
  return r.total_roughness > 0 ? m.contribution / r.total_roughness : 0.0;
}

// Wave-only fixture: M sweep at tile 128 so each tile crossing moves the
// workgroup count by >= cores and the wave count must change.
Slice1D wave_only_slice(CostModelParams* out_params) {
  CostModelParams p = preset("bmg-b580-t128");
  p.toggles = {false, false, true, false, false};
  p.overhead_base = 0.0;
  p.overhead_shape_amp = 0.0;
  p.launch_s = 0.0;
  p.mem_bw_gbps = 1e9;
  const GridAxis am{2048, 64, 33};
  const GridAxis fixed{4096, 1, 1};
  const TimingGrid g = generate(p, am, fixed, fixed);
  *out_params = p;
  return slice(g, Axis::M, 4096, 4096);
}

// Tile-waste-only fixture: fine-N sweep at a small M so the workgroup
// count never reaches one full wave and the wave predicate stays silent.
Slice1D waste_only_slice(CostModelParams* out_params) {
  CostModelParams p = preset("bmg-b580");
  p.toggles = {true, false, false, false, false};
  p.overhead_base = 0.0;
  p.overhead_shape_amp = 0.0;
  p.launch_s = 0.0;
  p.mem_bw_gbps = 1e9;
  const GridAxis am{128, 1, 1};
  const GridAxis an{3000, 32, 35};
  const GridAxis ak{4096, 1, 1};
  const TimingGrid g = generate(p, am, an, ak);
  *out_params = p;
  return slice(g, Axis::N, 128, 4096);
}

}  // namespace

TEST_CASE("constant slice attributes nothing") {
  Slice1D s;
  s.sweep_axis = Axis::N;
  s.fixed_a = 4096;
  s.fixed_b = 4096;
  s.step = 128;
  for (int i = 0; i < 16; ++i) {
    SlicePoint p;
    p.value = 128 + 128 * static_cast<dim_t>(i);
    p.tflops = 90.0;
    p.time_s = 1e-3;
    s.points.push_back(p);
  }
  const auto rep = attribute(s, builtin_predicates(), AttributionContext{});
  CHECK(rep.total_roughness == 0.0);
  for (const auto& m : rep.mechanisms) {
    if (m.defined) CHECK(m.contribution == 0.0);
  }
  CHECK(rep.residual == 0.0);
}

TEST_CASE("wave-only landscape is owned by the wave predicate") {
  CostModelParams p;
  const Slice1D s = wave_only_slice(&p);
  const auto rep = attribute(s, builtin_predicates(), ctx_of(p));
  CHECK(rep.total_roughness > 0.0);
  CHECK(share(rep, "wave-count-change") >= 0.80);
  CHECK(share(rep, "tile-remainder-crossing") <= 0.10);
  CHECK(share(rep, "subgroup-remainder-crossing") <= 0.10);
  CHECK(share(rep, "overhead-hash-swing") <= 0.10);
}

TEST_CASE("waste-only landscape: tile predicate dominates, wave is silent") {
  CostModelParams p;
  const Slice1D s = waste_only_slice(&p);
  const auto rep = attribute(s, builtin_predicates(), ctx_of(p));
  CHECK(rep.total_roughness > 0.0);
  const double tile_share = share(rep, "tile-remainder-crossing");
  CHECK(tile_share > 0.25);
  CHECK(tile_share > 2.0 * share(rep, "subgroup-remainder-crossing"));
  CHECK(tile_share > 2.0 * share(rep, "overhead-hash-swing"));
  // W stays below one wave: the wave predicate never fires.
  const auto& wave = find(rep, "wave-count-change");
  CHECK_FALSE(wave.defined);
  CHECK(wave.active_fraction == 0.0);
  CHECK(share(rep, "wave-count-change") == 0.0);
}

TEST_CASE("hash-only landscape is led by the hash-swing predicate") {
  CostModelParams p = preset("bmg-b580");
  p.toggles = {false, false, false, true, false};
  p.overhead_base = 0.0;
  p.launch_s = 0.0;
  p.mem_bw_gbps = 1e9;
  const GridAxis an{3000, 32, 35};
  const GridAxis fixed{4096, 1, 1};
  const TimingGrid g = generate(p, fixed, an, fixed);
  const Slice1D s = slice(g, Axis::N, 4096, 4096);
  const auto rep = attribute(s, builtin_predicates(), ctx_of(p));
  const double hash_share = share(rep, "overhead-hash-swing");
  CHECK(hash_share > 0.0);
  CHECK(hash_share >= 3.0 * share(rep, "tile-remainder-crossing"));
  CHECK(hash_share >= 3.0 * share(rep, "subgroup-remainder-crossing"));
  CHECK(hash_share >= 3.0 * share(rep, "wave-count-change"));
}

TEST_CASE("degenerate stratification is reported, not zeroed") {
  // Step-128 slice with tile 256: every step touches a tile boundary.
  CostModelParams p = preset("bmg-b580");
  p.toggles = {true, false, false, false, false};
  p.mem_bw_gbps = 1e9;
  p.launch_s = 0.0;
  const GridAxis an = default_axis(128, 128, 2048);
  const GridAxis fixed{4096, 1, 1};
  const TimingGrid g = generate(p, fixed, an, fixed);
  const auto rep = attribute(slice(g, Axis::N, 4096, 4096),
                             builtin_predicates(), ctx_of(p));
  const auto& tile = find(rep, "tile-remainder-crossing");
  CHECK_FALSE(tile.defined);
  CHECK(tile.degenerate_reason == "no inactive steps");
}

TEST_CASE("contributions scale with the slice") {
  CostModelParams p;
  const Slice1D s = wave_only_slice(&p);
  Slice1D scaled = s;
  for (auto& pt : scaled.points) {
    pt.time_s /= 3.0;  // TFLOPs scale by 3
    pt.tflops *= 3.0;
  }
  const auto base = attribute(s, builtin_predicates(), ctx_of(p));
  const auto big = attribute(scaled, builtin_predicates(), ctx_of(p));
  CHECK(big.total_roughness == doctest::Approx(3.0 * base.total_roughness).epsilon(1e-12));
  for (std::size_t i = 0; i < base.mechanisms.size(); ++i) {
    if (!base.mechanisms[i].defined) continue;
    CHECK(big.mechanisms[i].contribution ==
          doctest::Approx(3.0 * base.mechanisms[i].contribution).epsilon(1e-12));
  }
}

TEST_CASE("attribution closure: residual completes the budget") {
  CostModelParams p = preset("bmg-b580");
  p.toggles = {false, false, true, true, false};
  p.overhead_base = 0.0;
  p.launch_s = 0.0;
  p.mem_bw_gbps = 1e9;
  p.tile_m = p.tile_n = 128;
  const GridAxis am{2048, 64, 33};
  const GridAxis fixed{4096, 1, 1};
  const TimingGrid g = generate(p, am, fixed, fixed);
  const auto rep = attribute(slice(g, Axis::M, 4096, 4096),
                             builtin_predicates(), ctx_of(p));
  double sum = 0.0;
  for (const auto& m : rep.mechanisms) {
    if (m.defined) sum += m.contribution;
  }
  CHECK(rep.total_roughness == doctest::Approx(sum + rep.residual).epsilon(1e-12));
}

TEST_CASE("attribute input validation") {
  Slice1D tiny;
  tiny.sweep_axis = Axis::N;
  tiny.step = 32;
  for (int i = 0; i < 5; ++i) {
    tiny.points.push_back({3000 + 32 * static_cast<dim_t>(i), 1e-3, 50.0});
  }
  CHECK_THROWS_AS(attribute(tiny, builtin_predicates(), AttributionContext{}),
                  domain_error);

  CostModelParams p;
  const Slice1D s = wave_only_slice(&p);
  CHECK_THROWS_AS(attribute(s, {}, ctx_of(p)), domain_error);
}

TEST_CASE("budget table stages and deltas") {
  CostModelParams p;
  const Slice1D s = wave_only_slice(&p);

  // Identical stages: zero software-removed deltas.
  const BudgetTable same = budget_table({{"a", s}, {"b", s}},
                                        builtin_predicates(), ctx_of(p));
  REQUIRE(same.software_removed.size() == 1);
  CHECK(same.software_removed[0].amount == 0.0);
  CHECK(same.initial_roughness == same.final_roughness);

  // A flat-throughput second stage shows up as fully removed roughness.
  Slice1D smooth = s;
  double mean_tf = 0.0;
  for (const auto& pt : s.points) mean_tf += pt.tflops;
  mean_tf /= static_cast<double>(s.points.size());
  for (auto& pt : smooth.points) {
    pt.tflops = mean_tf;
    pt.time_s = 2.0 * static_cast<double>(pt.value) * s.fixed_a * s.fixed_b /
                (mean_tf * 1e12);
  }
  const BudgetTable improved = budget_table({{"raw", s}, {"opt", smooth}},
                                            builtin_predicates(), ctx_of(p));
  CHECK(improved.software_removed[0].amount > 0.0);
  CHECK(improved.final_roughness < improved.initial_roughness);

  // Shape mismatch across stages.
  Slice1D shorter = s;
  shorter.points.pop_back();
  CHECK_THROWS_AS(budget_table({{"a", s}, {"b", shorter}},
                               builtin_predicates(), ctx_of(p)),
                  shape_error);
}

TEST_CASE("context json round-trip") {
  AttributionContext ctx{128, 64, 16, 32, 24, 8};
  const AttributionContext back = context_from_json(context_to_json(ctx));
  CHECK(back.tile_m == 128);
  CHECK(back.tile_n == 64);
  CHECK(back.sg_m == 16);
  CHECK(back.sg_n == 32);
  CHECK(back.cores == 24);
  CHECK(back.channels == 8);
  CHECK_THROWS_AS(context_from_json("{\"tile_m\": -1}"), domain_error);
}
