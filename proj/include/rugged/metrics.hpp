#pragma once

// Landscape statistics: roughness, CV, drift, regime classification,
// alignment cliffs, sawtooth period detection, aggregate roughness.

#include <optional>
#include <span>
#include <vector>

#include "rugged/grid.hpp"

namespace rugged {
namespace metrics {

// Mean absolute step-to-step difference. Requires length >= 2.
double roughness(std::span<const double> seq);

// Population-sigma coefficient of variation, percent. Requires length >= 2
// and nonzero mean.
double cv_percent(std::span<const double> seq);

// (mean of last decile - mean of first decile) / mean of first decile, as
// percent. Requires length >= 10.
double drift_percent(std::span<const double> seq);

struct RegimeBucket {
  std::size_t count = 0;
  double mean_tflops = 0.0;
};

// Volume thresholds between the launch-dominated / scaling / saturated
// regimes: MNK < 1e8, 1e8 <= MNK < 1e10, MNK >= 1e10.
inline constexpr double kLaunchVolume = 1e8;
inline constexpr double kSaturatedVolume = 1e10;

struct RegimeSummary {
  RegimeBucket launch_dominated;
  RegimeBucket scaling;
  RegimeBucket saturated;
  std::size_t total() const {
    return launch_dominated.count + scaling.count + saturated.count;
  }
};

RegimeSummary classify_regimes(const TimingGrid& grid);

// Percent gain of the boundary-aligned stratum over the stratum offset by
// one step: mean TFLOPs(dim % modulus == 0) / mean TFLOPs(dim % modulus ==
// step) - 1, as percent.
double alignment_cliff(const TimingGrid& grid, Axis axis, dim_t modulus);

struct SawtoothResult {
  bool has_period = false;  // false for flat slices
  dim_t period = 0;         // elements
  dim_t valley_remainder = 0;
};

// Dominant period of the slice's sawtooth: the lag (multiple of the step)
// maximizing the circular autocorrelation of the mean-removed first
// differences; ties take the smallest lag. Requires >= 8 points.
SawtoothResult sawtooth_period(const Slice1D& s);

struct AxisRoughness {
  double m = 0.0;
  double n = 0.0;
  double k = 0.0;
  double aggregate_3d = 0.0;  // mean of the three axis means
};

// Roughness averaged over every 1D slice per axis.
AxisRoughness aggregate_roughness(const TimingGrid& grid);

// Roughness of the N-axis slice at M = K = lattice max (the headline slice
// all single-slice statistics are quoted on).
Slice1D canonical_slice(const TimingGrid& grid);

struct MetricsReport {
  std::string label;
  AxisRoughness axis_roughness;
  RegimeSummary regimes;
  double canonical_roughness = 0.0;
  double canonical_mean_tflops = 0.0;
  double canonical_cv_pct = 0.0;
  double mean_tflops = 0.0;  // over all cells
  double peak_tflops = 0.0;
  dim_t peak_m = 0, peak_n = 0, peak_k = 0;
  std::optional<double> cliff_n_256_pct;
  std::optional<double> cliff_m_256_pct;
  SawtoothResult canonical_sawtooth;
};

MetricsReport full_report(const TimingGrid& grid);
std::string report_to_json(const MetricsReport& r);

// Per-slice CSV: axis,fixed_a,fixed_b,roughness,mean_tflops
std::string slices_to_csv(const TimingGrid& grid);

}  // namespace metrics
}  // namespace rugged
