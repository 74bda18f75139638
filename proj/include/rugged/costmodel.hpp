#pragma once

// Deterministic analytic simulator: produces synthetic timing grids from a
// parametric hardware/kernel description with independently toggleable
// ruggedness mechanisms (partial-tile waste, sub-group waste, wave
// quantization, shape-dependent overhead, channel imbalance).

#include <string>

#include "rugged/grid.hpp"

namespace rugged {

struct MechanismToggles {
  bool waste_tile = true;
  bool waste_subgroup = true;
  bool wave = true;
  bool overhead_var = true;
  bool channel_hash = true;

  bool operator==(const MechanismToggles&) const = default;
};

struct CostModelParams {
  double peak_tflops = 116.5;
  double mem_bw_gbps = 270.0;  // effective bandwidth, GB/s
  int elem_bytes_ab = 2;
  int elem_bytes_c = 2;
  int cores = 20;
  int channels = 6;
  dim_t tile_m = 256;
  dim_t tile_n = 256;
  dim_t k_block = 32;
  dim_t sg_m = 32;
  dim_t sg_n = 64;
  double overhead_base = 0.32;
  double overhead_shape_amp = 0.04;
  double launch_s = 8e-6;
  double channel_gamma = 0.05;
  MechanismToggles toggles;

  void validate() const;
  bool operator==(const CostModelParams&) const = default;
};

// Per-cell factor breakdown of one model evaluation.
struct MechanismBreakdown {
  dim_t padded_m = 0, padded_n = 0, padded_k = 0;
  std::int64_t workgroups = 0;  // W
  std::int64_t waves = 0;       // V = ceil(W / cores)
  double wave_penalty = 1.0;    // V*cores/W, >= 1
  double overhead_factor = 1.0;
  double channel_eff = 1.0;  // in (0, 1]
  double t_compute = 0.0;
  double t_memory = 0.0;
  double t_total = 0.0;
};

// Fraction by which a round-robin distribution of the B-row cache lines for
// width n overloads its fullest channel: max/mean - 1.
double channel_imbalance(dim_t n, int elem_bytes_ab, int channels);

MechanismBreakdown eval_cell(const CostModelParams& p, dim_t m, dim_t n,
                             dim_t k);

// Synthetic grid over the given axes; bit-exact deterministic for equal
// params. The label records the params digest.
TimingGrid generate(const CostModelParams& p, const GridAxis& axis_m,
                    const GridAxis& axis_n, const GridAxis& axis_k);

// Named presets: bmg-b580 (full model), bmg-b580-t64 / -t128 / -t256 (tile
// variants for ensembles), ideal (wave-ramp only), roofline (constant peak).
CostModelParams preset(const std::string& name);
std::vector<std::string> preset_names();

// The hardware-ramped ideal floor: wave fill only, no waste, no overhead.
TimingGrid ideal_grid(const GridAxis& axis_m, const GridAxis& axis_n,
                      const GridAxis& axis_k);
// Constant peak throughput everywhere.
TimingGrid roofline_grid(const GridAxis& axis_m, const GridAxis& axis_n,
                         const GridAxis& axis_k);

std::string params_to_json(const CostModelParams& p);
CostModelParams params_from_json(const std::string& text);
std::string params_digest(const CostModelParams& p);  // 16 hex chars

// Default sweep lattice: {start, start+step, ..., <= 4096} per axis.
GridAxis default_axis(dim_t start, dim_t step, dim_t stop);

}  // namespace rugged
