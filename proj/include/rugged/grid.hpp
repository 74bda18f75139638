#pragma once

// Timing-lattice data model: uniform 3D grids of kernel times over (M, N, K),
// 1D slices, and CSV/JSON ingestion and serialization.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rugged/common.hpp"

namespace rugged {

using dim_t = std::int64_t;  // matrix dimension in elements

// 2*M*N*K / (t * 1e12). Throws domain_error on non-positive input.
double tflops_of(dim_t m, dim_t n, dim_t k, double t_seconds);

// Uniform positive lattice along one dimension: start + i*step, i < count.
struct GridAxis {
  dim_t start = 0;
  dim_t step = 0;
  int count = 0;

  dim_t value(int i) const { return start + static_cast<dim_t>(i) * step; }
  dim_t max_value() const { return value(count - 1); }

  // Index of `v` on the lattice, or -1 if off-lattice.
  int index_of(dim_t v) const {
    if (step <= 0 || v < start) return -1;
    const dim_t d = v - start;
    if (d % step != 0) return -1;
    const dim_t i = d / step;
    return i < count ? static_cast<int>(i) : -1;
  }

  void validate(const char* name) const;
  bool operator==(const GridAxis&) const = default;
};

enum class Axis { M = 0, N = 1, K = 2 };

const char* axis_name(Axis a);
Axis axis_from_name(const std::string& s);

// Dense table of kernel times (seconds) over a uniform (M, N, K) lattice.
// Row-major [i_m][i_n][i_k]. Immutable after construction by convention:
// every operation on a built grid is a pure read.
struct TimingGrid {
  GridAxis axis_m, axis_n, axis_k;
  std::vector<double> times;  // seconds, all finite and > 0
  std::string label;
  std::optional<dim_t> tile_m;
  std::optional<dim_t> tile_n;

  // Optional per-cell side columns from repeated measurements; either empty
  // or the same size as `times`.
  std::vector<double> time_min;
  std::vector<double> time_cv_pct;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(axis_m.count) * axis_n.count * axis_k.count;
  }
  std::size_t index(int im, int in, int ik) const {
    return (static_cast<std::size_t>(im) * axis_n.count + in) * axis_k.count +
           ik;
  }
  double at(int im, int in, int ik) const { return times[index(im, in, ik)]; }

  const GridAxis& axis(Axis a) const {
    switch (a) {
      case Axis::M: return axis_m;
      case Axis::N: return axis_n;
      default: return axis_k;
    }
  }

  bool same_lattice(const TimingGrid& other) const {
    return axis_m == other.axis_m && axis_n == other.axis_n &&
           axis_k == other.axis_k;
  }

  // Enforces lattice and positivity/finiteness invariants.
  void validate() const;

  double tflops_at(int im, int in, int ik) const {
    return tflops_of(axis_m.value(im), axis_n.value(in), axis_k.value(ik),
                     at(im, in, ik));
  }
};

// One point of a 1D sweep through a grid.
struct SlicePoint {
  dim_t value = 0;  // position on the sweep axis
  double time_s = 0.0;
  double tflops = 0.0;
};

// 1D slice along one axis with the two other dimensions fixed.
struct Slice1D {
  Axis sweep_axis = Axis::N;
  dim_t fixed_a = 0;  // first fixed dim in M,N,K order
  dim_t fixed_b = 0;  // second fixed dim in M,N,K order
  dim_t step = 0;
  std::vector<SlicePoint> points;  // strictly increasing in value

  std::vector<double> tflops_values() const {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(p.tflops);
    return v;
  }
};

// Extract a 1D slice. `fixed_a`/`fixed_b` are the two non-swept dimension
// values in M,N,K order (e.g. sweeping N fixes M and K). Off-lattice fixed
// values raise lookup_error.
Slice1D slice(const TimingGrid& grid, Axis sweep, dim_t fixed_a, dim_t fixed_b);

// CSV schema (header required): M,N,K,tile_m,tile_n,time_s. One row per
// repetition; '#' lines are comments; tile_m/tile_n may be empty. Rows for
// the same (M,N,K) are averaged; min and CV are kept as side columns.
TimingGrid ingest_csv(const std::string& path);
TimingGrid ingest_csv_text(const std::string& text, const std::string& origin);
std::string to_csv(const TimingGrid& grid);

// Slice CSV: a geometry comment line followed by value,time_s rows.
std::string slice_to_csv(const Slice1D& s);
Slice1D slice_from_csv_text(const std::string& text, const std::string& origin);
Slice1D slice_from_csv(const std::string& path);

// JSON serialization: axes + row-major times + label (+ side columns).
std::string to_json(const TimingGrid& grid);
TimingGrid grid_from_json(const std::string& text);
TimingGrid load_grid(const std::string& path);  // dispatches on extension
void save_grid(const TimingGrid& grid, const std::string& path);

}  // namespace rugged
