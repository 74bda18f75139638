#include "rugged/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace rugged {
namespace metrics {

using nlohmann::json;

double roughness(std::span<const double> seq) {
  if (seq.size() < 2) {
    throw domain_error("roughness: need at least 2 values");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    sum += std::abs(seq[i + 1] - seq[i]);
  }
  return sum / static_cast<double>(seq.size() - 1);
}

double cv_percent(std::span<const double> seq) {
  if (seq.size() < 2) throw domain_error("cv: need at least 2 values");
  double mean = 0.0;
  for (double v : seq) mean += v;
  mean /= static_cast<double>(seq.size());
  if (mean == 0.0) throw domain_error("cv: zero mean");
  double var = 0.0;
  for (double v : seq) var += (v - mean) * (v - mean);
  var /= static_cast<double>(seq.size());  // population sigma
  return std::sqrt(var) / std::abs(mean) * 100.0;
}

double drift_percent(std::span<const double> seq) {
  if (seq.size() < 10) throw domain_error("drift: need at least 10 values");
  const std::size_t decile = seq.size() / 10;
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < decile; ++i) first += seq[i];
  for (std::size_t i = seq.size() - decile; i < seq.size(); ++i) last += seq[i];
  first /= static_cast<double>(decile);
  last /= static_cast<double>(decile);
  if (first == 0.0) throw domain_error("drift: zero first-decile mean");
  return (last - first) / first * 100.0;
}

RegimeSummary classify_regimes(const TimingGrid& grid) {
  RegimeSummary s;
  double sums[3] = {0.0, 0.0, 0.0};
  for (int im = 0; im < grid.axis_m.count; ++im) {
    for (int in = 0; in < grid.axis_n.count; ++in) {
      for (int ik = 0; ik < grid.axis_k.count; ++ik) {
        const double vol = static_cast<double>(grid.axis_m.value(im)) *
                           static_cast<double>(grid.axis_n.value(in)) *
                           static_cast<double>(grid.axis_k.value(ik));
        const double tf = grid.tflops_at(im, in, ik);
        if (vol < kLaunchVolume) {
          ++s.launch_dominated.count;
          sums[0] += tf;
        } else if (vol < kSaturatedVolume) {
          ++s.scaling.count;
          sums[1] += tf;
        } else {
          ++s.saturated.count;
          sums[2] += tf;
        }
      }
    }
  }
  if (s.launch_dominated.count)
    s.launch_dominated.mean_tflops = sums[0] / s.launch_dominated.count;
  if (s.scaling.count) s.scaling.mean_tflops = sums[1] / s.scaling.count;
  if (s.saturated.count) s.saturated.mean_tflops = sums[2] / s.saturated.count;
  return s;
}

double alignment_cliff(const TimingGrid& grid, Axis axis, dim_t modulus) {
  const GridAxis& ax = grid.axis(axis);
  if (modulus <= 0 || (modulus % ax.step != 0 && ax.step % modulus != 0)) {
    throw domain_error("alignment_cliff: modulus and axis step incompatible");
  }
  double aligned_sum = 0.0, off_sum = 0.0;
  std::size_t aligned_n = 0, off_n = 0;
  for (int im = 0; im < grid.axis_m.count; ++im) {
    for (int in = 0; in < grid.axis_n.count; ++in) {
      for (int ik = 0; ik < grid.axis_k.count; ++ik) {
        dim_t v;
        switch (axis) {
          case Axis::M: v = grid.axis_m.value(im); break;
          case Axis::N: v = grid.axis_n.value(in); break;
          default: v = grid.axis_k.value(ik); break;
        }
        const dim_t r = v % modulus;
        if (r == 0) {
          aligned_sum += grid.tflops_at(im, in, ik);
          ++aligned_n;
        } else if (r == ax.step % modulus) {
          off_sum += grid.tflops_at(im, in, ik);
          ++off_n;
        }
      }
    }
  }
  if (aligned_n == 0 || off_n == 0) {
    throw domain_error("alignment_cliff: empty stratum");
  }
  const double aligned_mean = aligned_sum / static_cast<double>(aligned_n);
  const double off_mean = off_sum / static_cast<double>(off_n);
  return (aligned_mean / off_mean - 1.0) * 100.0;
}

SawtoothResult sawtooth_period(const Slice1D& s) {
  if (s.points.size() < 8) {
    throw domain_error("sawtooth_period: need at least 8 points");
  }
  const std::size_t nd = s.points.size() - 1;
  std::vector<double> d(nd);
  double scale = 0.0;
  for (std::size_t i = 0; i < nd; ++i) {
    d[i] = s.points[i + 1].tflops - s.points[i].tflops;
    scale = std::max(scale, std::abs(s.points[i].tflops));
  }
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(nd);
  double energy = 0.0;
  for (double& v : d) {
    v -= mean;
    energy += v * v;
  }

  SawtoothResult out;
  if (energy <= 1e-18 * scale * scale * static_cast<double>(nd)) {
    return out;  // flat slice: no period
  }

  const int max_lag = static_cast<int>(nd / 2);
  double best = -std::numeric_limits<double>::infinity();
  int best_lag = 0;
  for (int lag = 2; lag <= max_lag; ++lag) {
    double r = 0.0;
    for (std::size_t i = 0; i < nd; ++i) {
      r += d[i] * d[(i + lag) % nd];
    }
    if (r > best) {
      best = r;
      best_lag = lag;
    }
  }
  if (best_lag == 0) return out;

  out.has_period = true;
  out.period = static_cast<dim_t>(best_lag) * s.step;
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < s.points.size(); ++i) {
    if (s.points[i].tflops < s.points[argmin].tflops) argmin = i;
  }
  out.valley_remainder = s.points[argmin].value % out.period;
  return out;
}

namespace {

double axis_mean_roughness(const TimingGrid& grid, Axis sweep) {
  Axis fa, fb;
  switch (sweep) {
    case Axis::M: fa = Axis::N; fb = Axis::K; break;
    case Axis::N: fa = Axis::M; fb = Axis::K; break;
    default: fa = Axis::M; fb = Axis::N; break;
  }
  if (grid.axis(sweep).count < 2) return 0.0;
  double sum = 0.0;
  std::size_t n = 0;
  for (int ia = 0; ia < grid.axis(fa).count; ++ia) {
    for (int ib = 0; ib < grid.axis(fb).count; ++ib) {
      const Slice1D s = slice(grid, sweep, grid.axis(fa).value(ia),
                              grid.axis(fb).value(ib));
      sum += roughness(s.tflops_values());
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace

AxisRoughness aggregate_roughness(const TimingGrid& grid) {
  AxisRoughness r;
  r.m = axis_mean_roughness(grid, Axis::M);
  r.n = axis_mean_roughness(grid, Axis::N);
  r.k = axis_mean_roughness(grid, Axis::K);
  r.aggregate_3d = (r.m + r.n + r.k) / 3.0;
  return r;
}

Slice1D canonical_slice(const TimingGrid& grid) {
  return slice(grid, Axis::N, grid.axis_m.max_value(), grid.axis_k.max_value());
}

MetricsReport full_report(const TimingGrid& grid) {
  MetricsReport r;
  r.label = grid.label;
  r.axis_roughness = aggregate_roughness(grid);
  r.regimes = classify_regimes(grid);

  double sum = 0.0;
  r.peak_tflops = 0.0;
  for (int im = 0; im < grid.axis_m.count; ++im) {
    for (int in = 0; in < grid.axis_n.count; ++in) {
      for (int ik = 0; ik < grid.axis_k.count; ++ik) {
        const double tf = grid.tflops_at(im, in, ik);
        sum += tf;
        if (tf > r.peak_tflops) {
          r.peak_tflops = tf;
          r.peak_m = grid.axis_m.value(im);
          r.peak_n = grid.axis_n.value(in);
          r.peak_k = grid.axis_k.value(ik);
        }
      }
    }
  }
  r.mean_tflops = sum / static_cast<double>(grid.cell_count());

  if (grid.axis_n.count >= 2) {
    const Slice1D cs = canonical_slice(grid);
    const auto tf = cs.tflops_values();
    r.canonical_roughness = roughness(tf);
    r.canonical_cv_pct = cv_percent(tf);
    double m = 0.0;
    for (double v : tf) m += v;
    r.canonical_mean_tflops = m / static_cast<double>(tf.size());
    if (cs.points.size() >= 8) r.canonical_sawtooth = sawtooth_period(cs);
  }

  auto try_cliff = [&](Axis a) -> std::optional<double> {
    try {
      return alignment_cliff(grid, a, 256);
    } catch (const domain_error&) {
      return std::nullopt;
    }
  };
  r.cliff_n_256_pct = try_cliff(Axis::N);
  r.cliff_m_256_pct = try_cliff(Axis::M);
  return r;
}

std::string report_to_json(const MetricsReport& r) {
  json j;
  j["label"] = r.label;
  j["roughness"] = {{"m_axis", r.axis_roughness.m},
                    {"n_axis", r.axis_roughness.n},
                    {"k_axis", r.axis_roughness.k},
                    {"aggregate_3d", r.axis_roughness.aggregate_3d}};
  j["regimes"] = {
      {"launch_dominated",
       {{"count", r.regimes.launch_dominated.count},
        {"mean_tflops", r.regimes.launch_dominated.mean_tflops}}},
      {"scaling",
       {{"count", r.regimes.scaling.count},
        {"mean_tflops", r.regimes.scaling.mean_tflops}}},
      {"saturated",
       {{"count", r.regimes.saturated.count},
        {"mean_tflops", r.regimes.saturated.mean_tflops}}}};
  j["canonical_slice"] = {{"roughness", r.canonical_roughness},
                          {"mean_tflops", r.canonical_mean_tflops},
                          {"cv_pct", r.canonical_cv_pct}};
  if (r.canonical_sawtooth.has_period) {
    j["canonical_slice"]["sawtooth_period"] = r.canonical_sawtooth.period;
    j["canonical_slice"]["valley_remainder"] =
        r.canonical_sawtooth.valley_remainder;
  }
  j["mean_tflops"] = r.mean_tflops;
  j["peak"] = {{"tflops", r.peak_tflops},
               {"m", r.peak_m},
               {"n", r.peak_n},
               {"k", r.peak_k}};
  if (r.cliff_n_256_pct) j["cliff_n_256_pct"] = *r.cliff_n_256_pct;
  if (r.cliff_m_256_pct) j["cliff_m_256_pct"] = *r.cliff_m_256_pct;
  return j.dump(2) + "\n";
}

std::string slices_to_csv(const TimingGrid& grid) {
  std::string out = "axis,fixed_1,fixed_2,roughness_tflops_per_step,mean_tflops\n";
  for (Axis sweep : {Axis::M, Axis::N, Axis::K}) {
    if (grid.axis(sweep).count < 2) continue;
    Axis fa, fb;
    switch (sweep) {
      case Axis::M: fa = Axis::N; fb = Axis::K; break;
      case Axis::N: fa = Axis::M; fb = Axis::K; break;
      default: fa = Axis::M; fb = Axis::N; break;
    }
    for (int ia = 0; ia < grid.axis(fa).count; ++ia) {
      for (int ib = 0; ib < grid.axis(fb).count; ++ib) {
        const Slice1D s = slice(grid, sweep, grid.axis(fa).value(ia),
                                grid.axis(fb).value(ib));
        const auto tf = s.tflops_values();
        double mean = 0.0;
        for (double v : tf) mean += v;
        mean /= static_cast<double>(tf.size());
        out += std::string(axis_name(sweep)) + "," +
               std::to_string(grid.axis(fa).value(ia)) + "," +
               std::to_string(grid.axis(fb).value(ib)) + "," +
               format_double(roughness(tf)) + "," + format_double(mean) + "\n";
      }
    }
  }
  return out;
}

}  // namespace metrics
}  // namespace rugged
