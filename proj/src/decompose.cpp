#include "rugged/decompose.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace rugged {

using nlohmann::json;

namespace {

DecompositionSurfaces decompose_impl(const TimingGrid& gemm,
                                     const std::vector<double>& memory,
                                     double peak_tflops,
                                     std::string memory_source) {
  if (peak_tflops <= 0) throw domain_error("decompose: peak_tflops must be > 0");
  DecompositionSurfaces s;
  s.axis_m = gemm.axis_m;
  s.axis_n = gemm.axis_n;
  s.axis_k = gemm.axis_k;
  s.memory_source = std::move(memory_source);
  const std::size_t n = gemm.cell_count();
  s.t_compute.resize(n);
  s.t_memory = memory;
  s.t_gemm = gemm.times;
  s.t_overhead.resize(n);
  s.overhead_fraction.resize(n);

  std::size_t idx = 0;
  for (int im = 0; im < gemm.axis_m.count; ++im) {
    for (int in = 0; in < gemm.axis_n.count; ++in) {
      for (int ik = 0; ik < gemm.axis_k.count; ++ik, ++idx) {
        const double flops = 2.0 *
                             static_cast<double>(gemm.axis_m.value(im)) *
                             static_cast<double>(gemm.axis_n.value(in)) *
                             static_cast<double>(gemm.axis_k.value(ik));
        s.t_compute[idx] = flops / (peak_tflops * 1e12);
        const double floor = std::max(s.t_compute[idx], s.t_memory[idx]);
        s.t_overhead[idx] = s.t_gemm[idx] - floor;
        s.overhead_fraction[idx] = s.t_overhead[idx] / s.t_gemm[idx];
        if (s.t_overhead[idx] < 0.0) ++s.negative_overhead_cells;
      }
    }
  }
  return s;
}

}  // namespace

DecompositionSurfaces decompose(const TimingGrid& gemm,
                                const TimingGrid& memory, double peak_tflops) {
  if (!gemm.same_lattice(memory)) {
    throw shape_error("decompose: gemm and memory grids are on different lattices");
  }
  return decompose_impl(gemm, memory.times, peak_tflops, "measured");
}

DecompositionSurfaces decompose(const TimingGrid& gemm,
                                const CostModelParams& params,
                                double peak_tflops) {
  params.validate();
  std::vector<double> mem(gemm.cell_count());
  std::size_t idx = 0;
  for (int im = 0; im < gemm.axis_m.count; ++im) {
    for (int in = 0; in < gemm.axis_n.count; ++in) {
      for (int ik = 0; ik < gemm.axis_k.count; ++ik, ++idx) {
        mem[idx] = eval_cell(params, gemm.axis_m.value(im),
                             gemm.axis_n.value(in), gemm.axis_k.value(ik))
                       .t_memory;
      }
    }
  }
  return decompose_impl(gemm, mem, peak_tflops, "modeled");
}

BottleneckSplit classify_bottleneck(const DecompositionSurfaces& s,
                                    const std::string& bandwidth_label) {
  BottleneckSplit out;
  out.bandwidth_label = bandwidth_label;
  for (std::size_t i = 0; i < s.cell_count(); ++i) {
    if (s.t_compute[i] >= s.t_memory[i]) {
      ++out.compute_bound_cells;
    } else {
      ++out.memory_bound_cells;
    }
  }
  const double n = static_cast<double>(s.cell_count());
  out.compute_bound_fraction = out.compute_bound_cells / n;
  out.memory_bound_fraction = out.memory_bound_cells / n;
  return out;
}

std::string surfaces_to_json(const DecompositionSurfaces& s) {
  json j;
  j["axes"] = {{"m", {{"start", s.axis_m.start}, {"step", s.axis_m.step}, {"count", s.axis_m.count}}},
               {"n", {{"start", s.axis_n.start}, {"step", s.axis_n.step}, {"count", s.axis_n.count}}},
               {"k", {{"start", s.axis_k.start}, {"step", s.axis_k.step}, {"count", s.axis_k.count}}}};
  j["memory_source"] = s.memory_source;
  j["negative_overhead_cells"] = s.negative_overhead_cells;
  j["t_compute"] = s.t_compute;
  j["t_memory"] = s.t_memory;
  j["t_gemm"] = s.t_gemm;
  j["t_overhead"] = s.t_overhead;
  j["overhead_fraction"] = s.overhead_fraction;
  return j.dump(2) + "\n";
}

std::string stacked_csv(const DecompositionSurfaces& s, dim_t fixed_m,
                        dim_t fixed_k) {
  const int im = s.axis_m.index_of(fixed_m);
  const int ik = s.axis_k.index_of(fixed_k);
  if (im < 0 || ik < 0) {
    throw lookup_error("stacked_csv: fixed M/K off-lattice");
  }
  std::string out = "N,t_compute_s,t_memory_s,t_gemm_s,t_overhead_s,overhead_fraction\n";
  for (int in = 0; in < s.axis_n.count; ++in) {
    const std::size_t i = s.index(im, in, ik);
    out += std::to_string(s.axis_n.value(in)) + "," +
           format_double(s.t_compute[i]) + "," + format_double(s.t_memory[i]) +
           "," + format_double(s.t_gemm[i]) + "," +
           format_double(s.t_overhead[i]) + "," +
           format_double(s.overhead_fraction[i]) + "\n";
  }
  return out;
}

}  // namespace rugged
