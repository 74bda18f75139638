#include "rugged/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace rugged {

using nlohmann::json;

namespace {

dim_t ceil_div(dim_t a, dim_t b) { return (a + b - 1) / b; }

dim_t pad_to(dim_t v, dim_t unit) { return ceil_div(v, unit) * unit; }

// Padded extent along one output axis. Tile padding rounds up to the full
// tile; sub-group refinement rounds the last-workgroup remainder up to the
// sub-group extent instead.
dim_t padded_extent(dim_t v, dim_t tile, dim_t sg, bool waste_tile,
                    bool waste_subgroup) {
  if (waste_tile) {
    if (waste_subgroup) {
      const dim_t rem = v % tile;
      if (rem == 0) return v;
      return (v / tile) * tile + pad_to(rem, sg);
    }
    return pad_to(v, tile);
  }
  if (waste_subgroup) return pad_to(v, sg);
  return v;
}

}  // namespace

void CostModelParams::validate() const {
  if (peak_tflops <= 0 || mem_bw_gbps <= 0 || elem_bytes_ab <= 0 ||
      elem_bytes_c <= 0 || cores <= 0 || channels <= 0 || tile_m <= 0 ||
      tile_n <= 0 || k_block <= 0 || sg_m <= 0 || sg_n <= 0) {
    throw domain_error("cost model params: physical parameters must be > 0");
  }
  if (overhead_base < 0 || overhead_base >= 1 || overhead_shape_amp < 0 ||
      overhead_shape_amp >= 1 || channel_gamma < 0 || channel_gamma >= 1) {
    throw domain_error("cost model params: fractions must lie in [0, 1)");
  }
  if (launch_s < 0) throw domain_error("cost model params: launch_s < 0");
}

double channel_imbalance(dim_t n, int elem_bytes_ab, int channels) {
  const dim_t lines = ceil_div(n * elem_bytes_ab, 256);
  const dim_t max_per_channel = ceil_div(lines, channels);
  const double mean_per_channel =
      static_cast<double>(lines) / static_cast<double>(channels);
  return static_cast<double>(max_per_channel) / mean_per_channel - 1.0;
}

MechanismBreakdown eval_cell(const CostModelParams& p, dim_t m, dim_t n,
                             dim_t k) {
  if (m <= 0 || n <= 0 || k <= 0) {
    throw domain_error("eval_cell: dimensions must be positive");
  }
  const auto& tg = p.toggles;
  MechanismBreakdown b;
  b.padded_m = padded_extent(m, p.tile_m, p.sg_m, tg.waste_tile, tg.waste_subgroup);
  b.padded_n = padded_extent(n, p.tile_n, p.sg_n, tg.waste_tile, tg.waste_subgroup);
  b.padded_k = tg.waste_tile ? pad_to(k, p.k_block) : k;

  b.workgroups = ceil_div(m, p.tile_m) * ceil_div(n, p.tile_n);
  b.waves = ceil_div(b.workgroups, p.cores);
  b.wave_penalty =
      tg.wave ? static_cast<double>(b.waves) * p.cores / static_cast<double>(b.workgroups)
              : 1.0;

  const double flops = 2.0 * static_cast<double>(b.padded_m) *
                       static_cast<double>(b.padded_n) *
                       static_cast<double>(b.padded_k);
  b.t_compute = flops / (p.peak_tflops * 1e12) * b.wave_penalty;

  const double bytes =
      static_cast<double>(p.elem_bytes_ab) *
          (static_cast<double>(m) * k + static_cast<double>(k) * n) +
      static_cast<double>(p.elem_bytes_c) * static_cast<double>(m) * n;
  b.channel_eff =
      tg.channel_hash
          ? std::max(1e-9, 1.0 - p.channel_gamma *
                               channel_imbalance(n, p.elem_bytes_ab, p.channels))
          : 1.0;
  b.t_memory = bytes / (p.mem_bw_gbps * 1e9 * b.channel_eff);

  b.overhead_factor = 1.0 + p.overhead_base;
  if (tg.overhead_var) {
    b.overhead_factor += p.overhead_shape_amp * overhead_hash(m, n, k);
  }

  b.t_total = std::max(b.t_compute, b.t_memory) * b.overhead_factor + p.launch_s;
  return b;
}

TimingGrid generate(const CostModelParams& p, const GridAxis& axis_m,
                    const GridAxis& axis_n, const GridAxis& axis_k) {
  p.validate();
  axis_m.validate("M");
  axis_n.validate("N");
  axis_k.validate("K");
  TimingGrid grid;
  grid.axis_m = axis_m;
  grid.axis_n = axis_n;
  grid.axis_k = axis_k;
  grid.tile_m = p.tile_m;
  grid.tile_n = p.tile_n;
  grid.label = "synthetic tile=" + std::to_string(p.tile_m) + "x" +
               std::to_string(p.tile_n) + " params=" + params_digest(p);
  grid.times.resize(grid.cell_count());
  std::size_t idx = 0;
  for (int im = 0; im < axis_m.count; ++im) {
    const dim_t m = axis_m.value(im);
    for (int in = 0; in < axis_n.count; ++in) {
      const dim_t n = axis_n.value(in);
      for (int ik = 0; ik < axis_k.count; ++ik, ++idx) {
        grid.times[idx] = eval_cell(p, m, n, axis_k.value(ik)).t_total;
      }
    }
  }
  grid.validate();
  return grid;
}

CostModelParams preset(const std::string& name) {
  CostModelParams p;  // defaults are the full bmg-b580 model
  if (name == "bmg-b580" || name == "bmg-b580-t256") {
    return p;
  }
  if (name == "bmg-b580-t128") {
    // Smaller workgroups pay more per-WG launch/barrier overhead.
    p.tile_m = 128;
    p.tile_n = 128;
    p.sg_m = 32;
    p.sg_n = 64;
    p.overhead_base = 0.37;
    return p;
  }
  if (name == "bmg-b580-t64") {
    p.tile_m = 64;
    p.tile_n = 64;
    p.sg_m = 16;
    p.sg_n = 32;
    p.overhead_base = 0.45;
    return p;
  }
  if (name == "ideal") {
    // Wave-fill ramp only: no waste, no overhead, no launch. Bandwidth is
    // the cache-amplified effective figure seen by resident working sets,
    // so memory binds only at the smallest shapes.
    p.toggles = {.waste_tile = false,
                 .waste_subgroup = false,
                 .wave = true,
                 .overhead_var = false,
                 .channel_hash = false};
    p.overhead_base = 0.0;
    p.overhead_shape_amp = 0.0;
    p.launch_s = 0.0;
    p.channel_gamma = 0.0;
    p.mem_bw_gbps = 700.0;
    return p;
  }
  if (name == "roofline") {
    p.toggles = {.waste_tile = false,
                 .waste_subgroup = false,
                 .wave = false,
                 .overhead_var = false,
                 .channel_hash = false};
    p.overhead_base = 0.0;
    p.overhead_shape_amp = 0.0;
    p.launch_s = 0.0;
    p.channel_gamma = 0.0;
    p.mem_bw_gbps = 1e9;  // never binds: constant peak TFLOPs
    return p;
  }
  throw domain_error("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"bmg-b580", "bmg-b580-t256", "bmg-b580-t128", "bmg-b580-t64",
          "ideal", "roofline"};
}

TimingGrid ideal_grid(const GridAxis& axis_m, const GridAxis& axis_n,
                      const GridAxis& axis_k) {
  return generate(preset("ideal"), axis_m, axis_n, axis_k);
}

TimingGrid roofline_grid(const GridAxis& axis_m, const GridAxis& axis_n,
                         const GridAxis& axis_k) {
  return generate(preset("roofline"), axis_m, axis_n, axis_k);
}

std::string params_to_json(const CostModelParams& p) {
  json j;
  j["peak_tflops"] = p.peak_tflops;
  j["mem_bw_gbps"] = p.mem_bw_gbps;
  j["elem_bytes_ab"] = p.elem_bytes_ab;
  j["elem_bytes_c"] = p.elem_bytes_c;
  j["cores"] = p.cores;
  j["channels"] = p.channels;
  j["tile_m"] = p.tile_m;
  j["tile_n"] = p.tile_n;
  j["k_block"] = p.k_block;
  j["sg_m"] = p.sg_m;
  j["sg_n"] = p.sg_n;
  j["overhead_base"] = p.overhead_base;
  j["overhead_shape_amp"] = p.overhead_shape_amp;
  j["launch_s"] = p.launch_s;
  j["channel_gamma"] = p.channel_gamma;
  j["toggles"] = {{"waste_tile", p.toggles.waste_tile},
                  {"waste_subgroup", p.toggles.waste_subgroup},
                  {"wave", p.toggles.wave},
                  {"overhead_var", p.toggles.overhead_var},
                  {"channel_hash", p.toggles.channel_hash}};
  return j.dump(2) + "\n";
}

CostModelParams params_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw io_error(std::string("bad params JSON: ") + e.what());
  }
  CostModelParams p;
  try {
    p.peak_tflops = j.value("peak_tflops", p.peak_tflops);
    p.mem_bw_gbps = j.value("mem_bw_gbps", p.mem_bw_gbps);
    p.elem_bytes_ab = j.value("elem_bytes_ab", p.elem_bytes_ab);
    p.elem_bytes_c = j.value("elem_bytes_c", p.elem_bytes_c);
    p.cores = j.value("cores", p.cores);
    p.channels = j.value("channels", p.channels);
    p.tile_m = j.value("tile_m", p.tile_m);
    p.tile_n = j.value("tile_n", p.tile_n);
    p.k_block = j.value("k_block", p.k_block);
    p.sg_m = j.value("sg_m", p.sg_m);
    p.sg_n = j.value("sg_n", p.sg_n);
    p.overhead_base = j.value("overhead_base", p.overhead_base);
    p.overhead_shape_amp = j.value("overhead_shape_amp", p.overhead_shape_amp);
    p.launch_s = j.value("launch_s", p.launch_s);
    p.channel_gamma = j.value("channel_gamma", p.channel_gamma);
    if (j.contains("toggles")) {
      const auto& t = j["toggles"];
      p.toggles.waste_tile = t.value("waste_tile", p.toggles.waste_tile);
      p.toggles.waste_subgroup = t.value("waste_subgroup", p.toggles.waste_subgroup);
      p.toggles.wave = t.value("wave", p.toggles.wave);
      p.toggles.overhead_var = t.value("overhead_var", p.toggles.overhead_var);
      p.toggles.channel_hash = t.value("channel_hash", p.toggles.channel_hash);
    }
  } catch (const json::exception& e) {
    throw io_error(std::string("bad params JSON: ") + e.what());
  }
  p.validate();
  return p;
}

std::string params_digest(const CostModelParams& p) {
  const std::string canon = params_to_json(p);
  std::uint64_t h = 0x8f3a96c9052a61bdull;
  for (unsigned char c : canon) h = splitmix64(h ^ c);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

GridAxis default_axis(dim_t start, dim_t step, dim_t stop) {
  GridAxis ax;
  ax.start = start;
  ax.step = step;
  ax.count = static_cast<int>((stop - start) / step) + 1;
  ax.validate("axis");
  return ax;
}

}  // namespace rugged
