#include "rugged/tileselect.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "rugged/kernels.hpp"

namespace rugged {

using nlohmann::json;

void TileEnsemble::validate() const {
  // A single-member ensemble is degenerate but legal: its envelope is the
  // member itself with a 100% win share.
  if (members.empty()) {
    throw domain_error("tile ensemble needs at least 1 member");
  }
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (!members[i].grid.same_lattice(members[0].grid)) {
      throw shape_error("tile ensemble member " + std::to_string(i) +
                        " (" + members[i].tile.name() +
                        ") is on a different lattice");
    }
  }
}

WinnerMap envelope(const TileEnsemble& ens) {
  ens.validate();
  const std::size_t cells = ens.members[0].grid.cell_count();
  const int g = static_cast<int>(ens.members.size());

  // The batch kernel breaks ties toward the smallest member index, so scan
  // members in preference order: smaller tile area first, then (m, n).
  std::vector<int> pref(g);
  std::iota(pref.begin(), pref.end(), 0);
  std::sort(pref.begin(), pref.end(), [&](int a, int b) {
    const auto& ta = ens.members[a].tile;
    const auto& tb = ens.members[b].tile;
    if (ta.area() != tb.area()) return ta.area() < tb.area();
    if (ta.tile_m != tb.tile_m) return ta.tile_m < tb.tile_m;
    if (ta.tile_n != tb.tile_n) return ta.tile_n < tb.tile_n;
    return a < b;
  });

  std::vector<const double*> ptrs(g);
  for (int j = 0; j < g; ++j) ptrs[j] = ens.members[pref[j]].grid.times.data();

  WinnerMap out;
  out.envelope = ens.members[0].grid;
  out.envelope.tile_m.reset();
  out.envelope.tile_n.reset();
  out.envelope.time_min.clear();
  out.envelope.time_cv_pct.clear();
  out.envelope.label = "best-of-" + std::to_string(g) + " envelope";
  out.winner.assign(cells, 0);
  kernels::envelope_min(ptrs.data(), g, cells, out.envelope.times.data(),
                        out.winner.data());
  for (auto& w : out.winner) w = pref[w];

  out.tiles.reserve(g);
  for (const auto& m : ens.members) out.tiles.push_back(m.tile);
  std::vector<std::size_t> wins(g, 0);
  for (auto w : out.winner) ++wins[w];
  out.win_fraction.resize(g);
  for (int j = 0; j < g; ++j) {
    out.win_fraction[j] = static_cast<double>(wins[j]) / static_cast<double>(cells);
  }

  out.member_stats.resize(g);
  for (int j = 0; j < g; ++j) {
    const auto& grid = ens.members[j].grid;
    MemberAggregate agg;
    double sum = 0.0;
    for (int im = 0; im < grid.axis_m.count; ++im) {
      for (int in = 0; in < grid.axis_n.count; ++in) {
        for (int ik = 0; ik < grid.axis_k.count; ++ik) {
          const double tf = grid.tflops_at(im, in, ik);
          sum += tf;
          if (tf > agg.max_tflops) {
            agg.max_tflops = tf;
            agg.peak_m = grid.axis_m.value(im);
            agg.peak_n = grid.axis_n.value(in);
            agg.peak_k = grid.axis_k.value(ik);
          }
        }
      }
    }
    agg.mean_tflops = sum / static_cast<double>(cells);
    out.member_stats[j] = agg;
  }
  return out;
}

std::vector<TileStats> win_table(const WinnerMap& map) {
  std::vector<TileStats> stats(map.tiles.size());
  for (std::size_t j = 0; j < map.tiles.size(); ++j) {
    stats[j].tile = map.tiles[j];
    stats[j].win_pct = map.win_fraction[j] * 100.0;
    stats[j].mean_tflops = map.member_stats[j].mean_tflops;
    stats[j].max_tflops = map.member_stats[j].max_tflops;
    stats[j].peak_m = map.member_stats[j].peak_m;
    stats[j].peak_n = map.member_stats[j].peak_n;
    stats[j].peak_k = map.member_stats[j].peak_k;
  }
  return stats;
}

std::string winner_map_to_csv(const WinnerMap& map) {
  const auto& grid = map.envelope;
  std::string out = "M,N,K,winner_tile,envelope_time_s,envelope_tflops\n";
  std::size_t idx = 0;
  for (int im = 0; im < grid.axis_m.count; ++im) {
    for (int in = 0; in < grid.axis_n.count; ++in) {
      for (int ik = 0; ik < grid.axis_k.count; ++ik, ++idx) {
        out += std::to_string(grid.axis_m.value(im)) + "," +
               std::to_string(grid.axis_n.value(in)) + "," +
               std::to_string(grid.axis_k.value(ik)) + "," +
               map.tiles[map.winner[idx]].name() + "," +
               format_double(grid.times[idx]) + "," +
               format_double(grid.tflops_at(im, in, ik)) + "\n";
      }
    }
  }
  return out;
}

std::string win_table_to_json(const std::vector<TileStats>& stats) {
  json arr = json::array();
  for (const auto& s : stats) {
    arr.push_back({{"tile", s.tile.name()},
                   {"layout", s.tile.layout_label},
                   {"mean_tflops", s.mean_tflops},
                   {"max_tflops", s.max_tflops},
                   {"peak_config", {s.peak_m, s.peak_n, s.peak_k}},
                   {"win_pct", s.win_pct}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace rugged
