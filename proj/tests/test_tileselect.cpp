#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rugged/costmodel.hpp"
#include "rugged/metrics.hpp"
#include "rugged/tileselect.hpp"

using namespace rugged;

namespace {

TimingGrid two_cell_grid(double t0, double t1) {
  TimingGrid g;
  g.axis_m = {128, 128, 1};
  g.axis_n = {128, 128, 2};
  g.axis_k = {128, 128, 1};
  g.times = {t0, t1};
  g.validate();
  return g;
}

TileEnsemble bmg_ensemble(const GridAxis& ax) {
  TileEnsemble ens;
  for (const char* name : {"bmg-b580-t64", "bmg-b580-t128", "bmg-b580-t256"}) {
    const CostModelParams p = preset(name);
    ens.members.push_back({{p.tile_m, p.tile_n, name}, generate(p, ax, ax, ax)});
  }
  return ens;
}

}  // namespace

TEST_CASE("two-member envelope picks the cellwise winner") {
  TileEnsemble ens;
  ens.members.push_back({{128, 128, "A"}, two_cell_grid(10e-3, 8e-3)});
  ens.members.push_back({{256, 256, "B"}, two_cell_grid(9e-3, 12e-3)});
  const WinnerMap wm = envelope(ens);
  CHECK(wm.envelope.times[0] == 9e-3);
  CHECK(wm.envelope.times[1] == 8e-3);
  CHECK(wm.winner[0] == 1);  // B
  CHECK(wm.winner[1] == 0);  // A
  CHECK(wm.win_fraction[0] == 0.5);
  CHECK(wm.win_fraction[1] == 0.5);

  const auto stats = win_table(wm);
  CHECK(stats[0].win_pct == 50.0);
  CHECK(stats[1].win_pct == 50.0);
  CHECK(stats[0].mean_tflops > 0.0);
}

TEST_CASE("identical grids tie toward the smallest tile everywhere") {
  TileEnsemble ens;
  ens.members.push_back({{256, 256, "big"}, two_cell_grid(5e-3, 5e-3)});
  ens.members.push_back({{64, 64, "small"}, two_cell_grid(5e-3, 5e-3)});
  ens.members.push_back({{128, 128, "mid"}, two_cell_grid(5e-3, 5e-3)});
  const WinnerMap wm = envelope(ens);
  CHECK(wm.winner[0] == 1);
  CHECK(wm.winner[1] == 1);
  CHECK(wm.win_fraction[1] == 1.0);
}

TEST_CASE("tie at equal area falls to lexicographic (tile_m, tile_n)") {
  TileEnsemble ens;
  ens.members.push_back({{256, 64, "wide"}, two_cell_grid(5e-3, 5e-3)});
  ens.members.push_back({{64, 256, "tall"}, two_cell_grid(5e-3, 5e-3)});
  const WinnerMap wm = envelope(ens);
  CHECK(wm.winner[0] == 1);  // 64x256 before 256x64
}

TEST_CASE("single-member ensemble degenerates to 100% wins") {
  TileEnsemble ens;
  ens.members.push_back({{256, 256, "only"}, two_cell_grid(5e-3, 6e-3)});
  const WinnerMap wm = envelope(ens);
  CHECK(wm.win_fraction[0] == 1.0);
  CHECK(win_table(wm)[0].win_pct == 100.0);
}

TEST_CASE("lattice mismatch raises shape_error") {
  TileEnsemble ens;
  ens.members.push_back({{128, 128, "A"}, two_cell_grid(1e-3, 1e-3)});
  TimingGrid other = two_cell_grid(1e-3, 1e-3);
  other.axis_n.count = 1;
  other.times.pop_back();
  ens.members.push_back({{256, 256, "B"}, other});
  CHECK_THROWS_AS(envelope(ens), shape_error);
}

TEST_CASE("envelope dominance and per-step contraction") {
  const GridAxis ax = default_axis(128, 256, 4096);
  TileEnsemble ens = bmg_ensemble(ax);
  const WinnerMap wm = envelope(ens);

  // Dominance with equality attained by each winning member.
  for (std::size_t i = 0; i < wm.envelope.cell_count(); ++i) {
    for (const auto& m : ens.members) {
      CHECK(wm.envelope.times[i] <= m.grid.times[i]);
    }
    CHECK(wm.envelope.times[i] == ens.members[wm.winner[i]].grid.times[i]);
  }

  // Envelope mean TFLOPs is at least every member's mean.
  double env_mean = 0.0;
  std::size_t cnt = 0;
  for (int im = 0; im < ax.count; ++im)
    for (int in = 0; in < ax.count; ++in)
      for (int ik = 0; ik < ax.count; ++ik, ++cnt)
        env_mean += wm.envelope.tflops_at(im, in, ik);
  env_mean /= static_cast<double>(cnt);
  for (const auto& st : wm.member_stats) {
    CHECK(env_mean >= st.mean_tflops);
  }

  // Per-step contraction: each envelope TFLOPs step is bounded by the
  // largest member step at that transition (min is 1-Lipschitz).
  const Slice1D es = metrics::canonical_slice(wm.envelope);
  std::vector<Slice1D> ms;
  for (const auto& m : ens.members) ms.push_back(metrics::canonical_slice(m.grid));
  for (std::size_t i = 0; i + 1 < es.points.size(); ++i) {
    const double estep = std::abs(es.points[i + 1].tflops - es.points[i].tflops);
    double mstep = 0.0;
    for (const auto& m : ms) {
      mstep = std::max(mstep, std::abs(m.points[i + 1].tflops - m.points[i].tflops));
    }
    CHECK(estep <= mstep + 1e-9);
  }
}

TEST_CASE("envelope roughness never exceeds the roughest member") {
  const GridAxis ax = default_axis(128, 128, 4096);
  TileEnsemble ens = bmg_ensemble(ax);
  const WinnerMap wm = envelope(ens);
  const double env_rough =
      metrics::roughness(metrics::canonical_slice(wm.envelope).tflops_values());
  double worst = 0.0;
  for (const auto& m : ens.members) {
    worst = std::max(worst, metrics::roughness(
                                metrics::canonical_slice(m.grid).tflops_values()));
  }
  CHECK(env_rough <= worst);
}

TEST_CASE("no tile dominates the full-model ensemble") {
  const GridAxis ax = default_axis(128, 256, 4096);
  const WinnerMap wm = envelope(bmg_ensemble(ax));
  for (double f : wm.win_fraction) {
    CHECK(f < 0.90);
    CHECK(f > 0.0);
  }
}

TEST_CASE("adding a member never increases any envelope cell time") {
  const GridAxis ax = default_axis(128, 512, 4096);
  TileEnsemble ens = bmg_ensemble(ax);
  TileEnsemble two;
  two.members.push_back(ens.members[0]);
  two.members.push_back(ens.members[1]);
  const WinnerMap wm2 = envelope(two);
  const WinnerMap wm3 = envelope(ens);
  for (std::size_t i = 0; i < wm2.envelope.cell_count(); ++i) {
    CHECK(wm3.envelope.times[i] <= wm2.envelope.times[i]);
  }
}

TEST_CASE("winner map csv lists every cell") {
  const GridAxis ax{128, 128, 2};
  TileEnsemble ens;
  ens.members.push_back({{64, 64, "a"}, generate(preset("bmg-b580-t64"), ax, ax, ax)});
  ens.members.push_back({{256, 256, "b"}, generate(preset("bmg-b580"), ax, ax, ax)});
  const WinnerMap wm = envelope(ens);
  const std::string csv = winner_map_to_csv(wm);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);  // header + 8 cells
}
