#pragma once

// Randomized-order sweep planning and measurement-artifact analysis:
// warmup drift per block, run-order rank correlation, co-allocation
// interference comparison.

#include <optional>
#include <string>
#include <vector>

#include "rugged/grid.hpp"

namespace rugged {

struct SweepEntry {
  std::int64_t order = 0;
  dim_t m = 0, n = 0, k = 0;
  bool warmup = false;
};

struct SweepPlan {
  std::uint64_t seed = 0;
  int warmup_count = 5;
  std::vector<SweepEntry> entries;  // warmups first, then a full permutation
};

// Fisher-Yates shuffle of the full lattice driven by a splitmix64 stream.
// The first `warmup_count` tuples of the permutation are duplicated in
// front as untimed warmup entries. The timed part is always a permutation
// of the lattice.
SweepPlan plan_randomized(const GridAxis& axis_m, const GridAxis& axis_n,
                          const GridAxis& axis_k, std::uint64_t seed,
                          int warmup_count = 5);

std::string plan_to_csv(const SweepPlan& plan);

struct SweepRecord {
  std::int64_t run_order = 0;
  dim_t m = 0, n = 0, k = 0;
  std::string role;  // read_A | read_B | write_D | gemm
  std::string mode;  // sequential | randomized | co-allocated | isolated
  double time_s = 0.0;
  bool warmup = false;
};

struct SweepLog {
  std::vector<SweepRecord> records;
};

SweepLog log_from_csv_text(const std::string& text, const std::string& origin);
SweepLog log_from_csv(const std::string& path);
std::string log_to_csv(const SweepLog& log);

enum class SweepVariable { run_order, m, n, k };

struct SpearmanResult {
  bool defined = false;  // false when either series is constant
  double rho = 0.0;
  double z = 0.0;  // large-sample normal statistic rho * sqrt(n - 1)
  bool significant_p01 = false;
  std::size_t n = 0;
};

// Spearman rank correlation of time against the chosen variable over the
// non-warmup records of one role, with average-rank tie handling.
SpearmanResult spearman(const SweepLog& log, SweepVariable variable,
                        const std::string& role);

struct BlockDrift {
  dim_t block_value = 0;  // value of the blocking dimension
  double drift_pct = 0.0;
  std::size_t records = 0;
};

struct WarmupDriftReport {
  std::vector<BlockDrift> blocks;
  std::vector<dim_t> skipped_blocks;  // too short for a drift estimate
  double mean_drift_pct = 0.0;
  // True when per-block drifts are consistently signed and block-boundary
  // jumps move the opposite way (the warmup state restarts per block).
  bool reset_at_block_boundaries = false;
};

// metrics::drift applied per block of records sharing the blocking
// dimension value, in run order. block_key is the blocking axis (e.g. M).
WarmupDriftReport warmup_drift(const SweepLog& log, SweepVariable block_key,
                               const std::string& role);

struct CoallocationStats {
  std::size_t configs = 0;
  double mean_slowdown = 0.0;          // co-allocated / isolated
  double frac_above_20pct = 0.0;       // slowdown > 1.2
  double frac_above_50pct = 0.0;       // slowdown > 1.5
  std::vector<double> slowdowns;       // per config, join order
};

// Per-config slowdown of co-allocated vs isolated times for one role.
// Configs present in one log but not the other raise join_error.
CoallocationStats coallocation_compare(const SweepLog& isolated,
                                       const SweepLog& coallocated,
                                       const std::string& role);

}  // namespace rugged
