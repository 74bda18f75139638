#pragma once

// Roughness attribution: decompose a slice's roughness into mechanism
// contributions via an impact-frequency times per-event-magnitude method.
// For each mechanism predicate, contribution =
//   active_fraction * max(0, mean|dT| over active steps
//                            - mean|dT| over inactive steps).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rugged/grid.hpp"

namespace rugged {

// Kernel/hardware context the predicates are parameterized on.
struct AttributionContext {
  dim_t tile_m = 256;
  dim_t tile_n = 256;
  dim_t sg_m = 32;
  dim_t sg_n = 64;
  int cores = 20;
  int channels = 6;
};

std::string context_to_json(const AttributionContext& ctx);
AttributionContext context_from_json(const std::string& text);

// One step transition of a slice: the two endpoint cells in full (M, N, K)
// coordinates plus the slice geometry.
struct StepTransition {
  dim_t m0 = 0, n0 = 0, k0 = 0;
  dim_t m1 = 0, n1 = 0, k1 = 0;
  Axis sweep_axis = Axis::N;
};

// Deterministic, total activity test over a step transition.
struct MechanismPredicate {
  std::string name;
  std::function<bool(const StepTransition&, const AttributionContext&)> active;
};

// Built-in predicates:
//  - wave-count-change: the wave count V = ceil(W/cores) differs across
//    the step.
//  - tile-remainder-crossing: the step crosses a tile_n boundary along N.
//  - subgroup-remainder-crossing: the sub-group-granular remainder within
//    the last tile changes along N, excluding tile crossings (those are
//    already owned by the tile predicate).
//  - overhead-hash-swing: handled separately inside attribute() because it
//    stratifies on the top decile of |dh| over the whole slice.
std::vector<MechanismPredicate> builtin_predicates();

struct MechanismContribution {
  std::string name;
  bool defined = true;           // false on degenerate stratification
  std::string degenerate_reason; // "no active steps" / "no inactive steps"
  double active_fraction = 0.0;
  double mean_abs_dt_active = 0.0;
  double mean_abs_dt_inactive = 0.0;
  double contribution = 0.0;  // TFLOPs/step
};

struct AttributionReport {
  double total_roughness = 0.0;  // TFLOPs/step
  std::vector<MechanismContribution> mechanisms;
  double residual = 0.0;  // total - sum of defined contributions
};

// Requires slice length >= 8 and at least one predicate. The built-in
// overhead-hash-swing predicate is always appended.
AttributionReport attribute(const Slice1D& slice,
                            const std::vector<MechanismPredicate>& predicates,
                            const AttributionContext& ctx);

std::string report_to_json(const AttributionReport& r);

// Staged attribution: software-removed roughness per optimization stage
// plus the attribution of what remains after the last stage.
struct StageSlice {
  std::string name;  // e.g. fixed-tile, dynamic-tile, dp-pad, dp-split-pad
  Slice1D slice;
};

struct BudgetRow {
  std::string source;
  double amount = 0.0;  // TFLOPs/step
  std::string removed_by;  // empty for hardware-bound rows
};

struct BudgetTable {
  double initial_roughness = 0.0;
  double final_roughness = 0.0;
  std::vector<BudgetRow> software_removed;  // stage-to-stage deltas
  AttributionReport hardware_bound;         // attribution of the last stage
};

// Stages must share the sweep geometry (axis, step, length).
BudgetTable budget_table(const std::vector<StageSlice>& stages,
                         const std::vector<MechanismPredicate>& predicates,
                         const AttributionContext& ctx);

std::string budget_to_json(const BudgetTable& t);

}  // namespace rugged
