#pragma once

// Dynamic-programming pad/split optimizer. From a baseline timing table t0
// it derives:
//   t1[c] = best time when the problem may be padded up to any lattice
//           point >= c componentwise (run-at-target, discard the extra),
//   t2[c] = best time when the problem may additionally be split into two
//           on-lattice parts along one axis, recursively.
// Decision tags allow O(1) value lookup and exact plan reconstruction.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rugged/grid.hpp"

namespace rugged {

enum class T2Kind : std::uint8_t {
  pad_or_asis = 0,  // value comes from the pad table (target may be self)
  split_m = 1,
  split_n = 2,
  split_k = 3,
};

struct DpTables {
  GridAxis axis_m, axis_n, axis_k;
  std::vector<double> t0, t1, t2;          // seconds, cellwise
  std::vector<std::int32_t> t1_target;     // linear index of the pad target
  std::vector<T2Kind> t2_kind;
  std::vector<std::int32_t> t2_split_left; // axis index of the left part
  double split_overhead_s = 0.0;
  bool fixpoint = false;  // experimental iterated T1/T2 mode

  std::size_t cell_count() const { return t0.size(); }
  std::size_t index(int im, int in, int ik) const {
    return (static_cast<std::size_t>(im) * axis_n.count + in) * axis_k.count +
           ik;
  }
  const GridAxis& axis(Axis a) const {
    switch (a) {
      case Axis::M: return axis_m;
      case Axis::N: return axis_n;
      default: return axis_k;
    }
  }
};

// Pad-table relaxation: minimum of t0 over the upper orthant {c' >= c},
// computed by the 8-neighbor recurrence in decreasing index order.
// `targets` receives the pad target per cell. Input and output vectors are
// indexed like the grid.
std::vector<double> compute_t1(const GridAxis& am, const GridAxis& an,
                               const GridAxis& ak,
                               const std::vector<double>& t0,
                               std::vector<std::int32_t>* targets);

// Split pass: initialize from t1, then in increasing index order try every
// on-lattice binary split per axis (both parts >= lattice start); the cost
// of a split is the sum of the parts' final t2 plus split_overhead_s.
void compute_t2(const GridAxis& am, const GridAxis& an, const GridAxis& ak,
                const std::vector<double>& t1, double split_overhead_s,
                std::vector<double>* t2, std::vector<T2Kind>* kind,
                std::vector<std::int32_t>* split_left);

DpTables dp_build(const TimingGrid& t0, double split_overhead_s = 0.0,
                  bool fixpoint = false);

struct ExecutionPlan {
  struct Node {
    bool is_leaf = true;
    // leaf
    dim_t run_m = 0, run_n = 0, run_k = 0;
    // split
    Axis split_axis = Axis::K;
    dim_t left_value = 0;
    dim_t right_value = 0;
    bool beta_accumulate = false;  // K-splits accumulate with beta=1
    std::unique_ptr<Node> left, right;
  };
  std::unique_ptr<Node> root;

  std::size_t leaf_count() const;
};

struct LookupResult {
  double predicted_s = 0.0;
  ExecutionPlan plan;
  bool off_lattice = false;   // query was rounded up to the lattice
  dim_t used_m = 0, used_n = 0, used_k = 0;
};

// O(1) table read plus plan reconstruction (proportional to plan size).
// Off-lattice queries use the nearest-ceiling lattice point, flagged;
// queries beyond the lattice max raise lookup_error.
LookupResult lookup(const DpTables& tables, dim_t m, dim_t n, dim_t k);

// Re-evaluates a reconstructed plan against the t0 table; equals the t2
// value bit-exactly.
double evaluate_plan(const DpTables& tables, const ExecutionPlan& plan);

std::string plan_to_json(const ExecutionPlan& plan);

struct ActionDistribution {
  std::size_t total = 0;
  double pad_or_asis = 0.0;  // fractions, sum to 1
  double split_k = 0.0;
  double split_n = 0.0;
  double split_m = 0.0;
};

// Root-decision histogram over cells matching the optional per-axis fixed
// values (e.g. K fixed to the lattice max).
ActionDistribution action_distribution(const DpTables& tables,
                                       std::optional<dim_t> fixed_m,
                                       std::optional<dim_t> fixed_n,
                                       std::optional<dim_t> fixed_k);

struct DpImpact {
  double mean_time_reduction_t1_pct = 0.0;
  double mean_time_reduction_t2_pct = 0.0;
  double max_time_reduction_t1_pct = 0.0;
  double max_time_reduction_t2_pct = 0.0;
  double configs_improved_10_t1_pct = 0.0;
  double configs_improved_20_t1_pct = 0.0;
  double configs_improved_10_t2_pct = 0.0;
  double configs_improved_20_t2_pct = 0.0;
  double canonical_roughness_t0 = 0.0;  // TFLOPs/step at requested work
  double canonical_roughness_t1 = 0.0;
  double canonical_roughness_t2 = 0.0;
  double roughness_reduction_t1_pct = 0.0;
  double roughness_reduction_t2_pct = 0.0;
};

DpImpact dp_impact_report(const DpTables& tables);
std::string impact_to_json(const DpImpact& r);

// Bundle serialization; `.bin` uses a raw little-endian layout, anything
// else JSON. Both round-trip bit-exactly.
void save_tables(const DpTables& tables, const std::string& path);
DpTables load_tables(const std::string& path);

}  // namespace rugged
