#pragma once

// Four-surface time decomposition (compute / memory / GEMM / residual
// overhead) over a common lattice, and bottleneck classification.

#include "rugged/costmodel.hpp"
#include "rugged/grid.hpp"

namespace rugged {

// Cellwise surfaces over the GEMM grid's lattice. The compute surface uses
// the raw problem dimensions (partial-tile waste belongs to overhead, so it
// is never absorbed into compute). Negative overhead cells are kept as-is
// and counted, not clamped.
struct DecompositionSurfaces {
  GridAxis axis_m, axis_n, axis_k;
  std::vector<double> t_compute;
  std::vector<double> t_memory;
  std::vector<double> t_gemm;
  std::vector<double> t_overhead;          // t_gemm - max(t_compute, t_memory)
  std::vector<double> overhead_fraction;   // t_overhead / t_gemm
  std::size_t negative_overhead_cells = 0;
  std::string memory_source;  // "measured" or "modeled"

  std::size_t cell_count() const { return t_gemm.size(); }
  std::size_t index(int im, int in, int ik) const {
    return (static_cast<std::size_t>(im) * axis_n.count + in) * axis_k.count +
           ik;
  }
};

// Memory surface from a measured grid on the same lattice.
DecompositionSurfaces decompose(const TimingGrid& gemm,
                                const TimingGrid& memory, double peak_tflops);

// Memory surface from the cost model's memory term.
DecompositionSurfaces decompose(const TimingGrid& gemm,
                                const CostModelParams& params,
                                double peak_tflops);

struct BottleneckSplit {
  std::string bandwidth_label;
  double compute_bound_fraction = 0.0;  // t_compute >= t_memory
  double memory_bound_fraction = 0.0;
  std::size_t compute_bound_cells = 0;
  std::size_t memory_bound_cells = 0;
};

BottleneckSplit classify_bottleneck(const DecompositionSurfaces& s,
                                    const std::string& bandwidth_label);

std::string surfaces_to_json(const DecompositionSurfaces& s);

// Stacked-bar friendly CSV along N at fixed M, K: per-N component times.
std::string stacked_csv(const DecompositionSurfaces& s, dim_t fixed_m,
                        dim_t fixed_k);

}  // namespace rugged
