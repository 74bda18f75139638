#pragma once

// Best-of-k dynamic tile selection over per-tile grids sharing a lattice:
// envelope grid, winner map, per-tile win statistics.

#include <string>
#include <vector>

#include "rugged/grid.hpp"

namespace rugged {

struct TileDescriptor {
  dim_t tile_m = 0;
  dim_t tile_n = 0;
  std::string layout_label;  // e.g. sub-group layout, provenance

  dim_t area() const { return tile_m * tile_n; }
  std::string name() const {
    return std::to_string(tile_m) + "x" + std::to_string(tile_n);
  }
};

struct TileEnsemble {
  struct Member {
    TileDescriptor tile;
    TimingGrid grid;
  };
  // Identical axes required. Two or more members make a real ensemble; a
  // single member is accepted as the degenerate case (100% wins).
  std::vector<Member> members;

  void validate() const;
};

struct MemberAggregate {
  double mean_tflops = 0.0;  // over all cells of that member grid
  double max_tflops = 0.0;
  dim_t peak_m = 0, peak_n = 0, peak_k = 0;
};

struct WinnerMap {
  TimingGrid envelope;                 // cellwise min time
  std::vector<std::int32_t> winner;    // per-cell member index
  std::vector<TileDescriptor> tiles;   // member order of the input ensemble
  std::vector<double> win_fraction;    // per member, sums to 1
  std::vector<MemberAggregate> member_stats;
};

// Cellwise argmin over the ensemble. Ties prefer the smaller tile area,
// then lexicographic (tile_m, tile_n).
WinnerMap envelope(const TileEnsemble& ens);

struct TileStats {
  TileDescriptor tile;
  double mean_tflops = 0.0;
  double max_tflops = 0.0;
  dim_t peak_m = 0, peak_n = 0, peak_k = 0;
  double win_pct = 0.0;
};

std::vector<TileStats> win_table(const WinnerMap& map);

std::string winner_map_to_csv(const WinnerMap& map);
std::string win_table_to_json(const std::vector<TileStats>& stats);

}  // namespace rugged
