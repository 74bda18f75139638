#include "rugged/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rugged/metrics.hpp"

namespace rugged::plot {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string svg_open(int w, int h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(w) + "\" height=\"" + std::to_string(h) +
         "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
         "\" font-family=\"monospace\" font-size=\"11\">\n";
}

std::string text_at(double x, double y, const std::string& s,
                    const std::string& extra = "") {
  return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\"" +
         (extra.empty() ? "" : " " + extra) + ">" + s + "</text>\n";
}

std::string rect(double x, double y, double w, double h,
                 const std::string& fill) {
  return "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) +
         "\" height=\"" + fmt(h) + "\" fill=\"" + fill + "\"/>\n";
}

// Blue -> green -> yellow heat ramp over u in [0, 1].
std::string heat_color(double u) {
  u = std::clamp(u, 0.0, 1.0);
  int r, g, b;
  if (u < 0.5) {
    const double t = u * 2.0;
    r = static_cast<int>(30 + 20 * t);
    g = static_cast<int>(60 + 140 * t);
    b = static_cast<int>(150 - 60 * t);
  } else {
    const double t = (u - 0.5) * 2.0;
    r = static_cast<int>(50 + 190 * t);
    g = static_cast<int>(200 + 20 * t);
    b = static_cast<int>(90 - 50 * t);
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

const char* kPalette[] = {"#4878cf", "#6acc65", "#d65f5f", "#b47cc7",
                          "#c4ad66", "#77bedb", "#e0a23e", "#8a8a8a"};

struct Frame {
  double x0, y0, w, h;  // plot area
  double vx0, vx1, vy0, vy1;  // value ranges

  double px(double v) const { return x0 + (v - vx0) / (vx1 - vx0) * w; }
  double py(double v) const { return y0 + h - (v - vy0) / (vy1 - vy0) * h; }
};

std::string frame_axes(const Frame& f, const std::string& xlabel,
                       const std::string& ylabel) {
  std::string out;
  out += "<rect x=\"" + fmt(f.x0) + "\" y=\"" + fmt(f.y0) + "\" width=\"" +
         fmt(f.w) + "\" height=\"" + fmt(f.h) +
         "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double vy = f.vy0 + (f.vy1 - f.vy0) * i / 4.0;
    out += text_at(f.x0 - 6, f.py(vy) + 4, fmt(vy), "text-anchor=\"end\"");
    const double vx = f.vx0 + (f.vx1 - f.vx0) * i / 4.0;
    out += text_at(f.px(vx), f.y0 + f.h + 14, fmt(vx), "text-anchor=\"middle\"");
  }
  out += text_at(f.x0 + f.w / 2, f.y0 + f.h + 30, xlabel, "text-anchor=\"middle\"");
  out += text_at(f.x0 - 44, f.y0 - 8, ylabel);
  return out;
}

std::string polyline(const Frame& f, const std::vector<double>& xs,
                     const std::vector<double>& ys, const std::string& color) {
  std::string out = "<polyline fill=\"none\" stroke=\"" + color +
                    "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out += fmt(f.px(xs[i])) + "," + fmt(f.py(ys[i])) + " ";
  }
  out += "\"/>\n";
  return out;
}

std::string data_comment(const std::string& header,
                         const std::vector<std::string>& rows) {
  std::string out = "<!-- data\n" + header + "\n";
  for (const auto& r : rows) out += r + "\n";
  out += "-->\n";
  return out;
}

}  // namespace

std::string slice_line(const Slice1D& slice, const std::string& title) {
  const auto tf = slice.tflops_values();
  const double rough = metrics::roughness(tf);
  std::vector<double> xs;
  xs.reserve(slice.points.size());
  std::vector<std::string> rows;
  for (const auto& p : slice.points) {
    xs.push_back(static_cast<double>(p.value));
    rows.push_back(std::to_string(p.value) + "," + format_double(p.time_s) +
                   "," + format_double(p.tflops));
  }
  double lo = *std::min_element(tf.begin(), tf.end());
  double hi = *std::max_element(tf.begin(), tf.end());
  if (hi == lo) {
    hi = lo + 1.0;
    lo = lo - 1.0;
  }
  const double pad = (hi - lo) * 0.08;
  Frame f{64, 40, 520, 300, xs.front(), xs.back(), lo - pad, hi + pad};

  std::string out = svg_open(640, 400);
  out += data_comment("value,time_s,tflops", rows);
  out += text_at(64, 22, title);
  out += frame_axes(f, std::string(axis_name(slice.sweep_axis)) + " (elements)",
                    "TFLOPs");
  out += polyline(f, xs, tf, kPalette[0]);
  out += text_at(f.x0 + 8, f.y0 + 16,
                 "roughness " + fmt(rough) + " TFLOPs/step");
  out += "</svg>\n";
  return out;
}

std::string surface_heatmap(const TimingGrid& grid, dim_t fixed_k,
                            const std::string& title) {
  const int ik = grid.axis_k.index_of(fixed_k);
  if (ik < 0) throw lookup_error("surface_heatmap: K off-lattice");
  const int mc = grid.axis_m.count, nc = grid.axis_n.count;
  std::vector<double> tf(static_cast<std::size_t>(mc) * nc);
  double lo = 1e300, hi = -1e300;
  for (int im = 0; im < mc; ++im) {
    for (int in = 0; in < nc; ++in) {
      const double v = grid.tflops_at(im, in, ik);
      tf[static_cast<std::size_t>(im) * nc + in] = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi == lo) hi = lo + 1.0;

  const double cell_w = 520.0 / nc, cell_h = 320.0 / mc;
  std::string out = svg_open(680, 420);
  std::vector<std::string> rows;
  for (int im = 0; im < mc; ++im) {
    std::string r = std::to_string(grid.axis_m.value(im));
    for (int in = 0; in < nc; ++in) {
      r += "," + format_double(tf[static_cast<std::size_t>(im) * nc + in]);
    }
    rows.push_back(r);
  }
  out += data_comment("m_value,tflops_by_n", rows);
  out += text_at(60, 22, title + "  (K=" + std::to_string(fixed_k) + ")");
  for (int im = 0; im < mc; ++im) {
    for (int in = 0; in < nc; ++in) {
      const double v = tf[static_cast<std::size_t>(im) * nc + in];
      out += rect(60 + in * cell_w, 40 + (mc - 1 - im) * cell_h, cell_w + 0.5,
                  cell_h + 0.5, heat_color((v - lo) / (hi - lo)));
    }
  }
  out += text_at(60, 390, "N right, M up; " + fmt(lo) + " to " + fmt(hi) + " TFLOPs");
  // Color ramp legend.
  for (int i = 0; i < 40; ++i) {
    out += rect(600, 40 + (39 - i) * 8.0, 16, 8.5, heat_color(i / 39.0));
  }
  out += "</svg>\n";
  return out;
}

std::string stacked_decomposition(const DecompositionSurfaces& s, dim_t fixed_m,
                                  dim_t fixed_k, const std::string& title) {
  const int im = s.axis_m.index_of(fixed_m);
  const int ik = s.axis_k.index_of(fixed_k);
  if (im < 0 || ik < 0) {
    throw lookup_error("stacked_decomposition: fixed M/K off-lattice");
  }
  const int nc = s.axis_n.count;
  double tmax = 0.0;
  for (int in = 0; in < nc; ++in) {
    tmax = std::max(tmax, s.t_gemm[s.index(im, in, ik)]);
  }
  Frame f{64, 40, 520, 300, 0, static_cast<double>(nc), 0, tmax * 1.08};

  std::string out = svg_open(640, 420);
  std::vector<std::string> rows;
  const double bar_w = f.w / nc;
  for (int in = 0; in < nc; ++in) {
    const std::size_t c = s.index(im, in, ik);
    const bool compute_bound = s.t_compute[c] >= s.t_memory[c];
    const double bound = std::max(s.t_compute[c], s.t_memory[c]);
    const double x = f.x0 + in * bar_w;
    out += rect(x, f.py(bound), bar_w - 1.0, f.py(0) - f.py(bound),
                compute_bound ? kPalette[0] : kPalette[1]);
    if (s.t_overhead[c] > 0) {
      out += rect(x, f.py(bound + s.t_overhead[c]), bar_w - 1.0,
                  f.py(bound) - f.py(bound + s.t_overhead[c]), kPalette[2]);
    }
    rows.push_back(std::to_string(s.axis_n.value(in)) + "," +
                   format_double(s.t_compute[c]) + "," +
                   format_double(s.t_memory[c]) + "," +
                   format_double(s.t_gemm[c]) + "," +
                   format_double(s.t_overhead[c]));
  }
  out += data_comment("n,t_compute,t_memory,t_gemm,t_overhead", rows);
  out += text_at(64, 22, title + "  (M=" + std::to_string(fixed_m) +
                             ", K=" + std::to_string(fixed_k) + ")");
  out += frame_axes(f, "N index", "time (s)");
  out += text_at(f.x0, 395,
                 "blue: compute-bound, green: memory-bound, red: overhead");
  return out + "</svg>\n";
}

std::string winner_mosaic(const WinnerMap& map, dim_t fixed_k,
                          const std::string& title) {
  const auto& grid = map.envelope;
  const int ik = grid.axis_k.index_of(fixed_k);
  if (ik < 0) throw lookup_error("winner_mosaic: K off-lattice");
  const int mc = grid.axis_m.count, nc = grid.axis_n.count;
  const double cell_w = 520.0 / nc, cell_h = 320.0 / mc;

  std::string out = svg_open(700, 420);
  std::vector<std::string> rows;
  for (int im = 0; im < mc; ++im) {
    std::string r = std::to_string(grid.axis_m.value(im));
    for (int in = 0; in < nc; ++in) {
      const int w = map.winner[grid.index(im, in, ik)];
      r += "," + map.tiles[w].name();
      out += rect(60 + in * cell_w, 40 + (mc - 1 - im) * cell_h, cell_w + 0.5,
                  cell_h + 0.5, kPalette[w % 8]);
    }
    rows.push_back(r);
  }
  out += data_comment("m_value,winner_by_n", rows);
  out += text_at(60, 22, title + "  (K=" + std::to_string(fixed_k) + ")");
  for (std::size_t j = 0; j < map.tiles.size(); ++j) {
    out += rect(600, 40 + j * 22.0, 14, 14, kPalette[j % 8]);
    out += text_at(620, 51 + j * 22.0, map.tiles[j].name());
  }
  return out + "</svg>\n";
}

std::string stage_progression(const std::vector<StageSlice>& stages,
                              const std::string& title) {
  if (stages.empty()) throw domain_error("stage_progression: no stages");
  double lo = 1e300, hi = -1e300;
  for (const auto& st : stages) {
    for (const auto& p : st.slice.points) {
      lo = std::min(lo, p.tflops);
      hi = std::max(hi, p.tflops);
    }
  }
  if (hi == lo) hi = lo + 1.0;
  const double pad = (hi - lo) * 0.08;

  const int panels = static_cast<int>(stages.size());
  const double panel_w = 250.0;
  const int width = 60 + static_cast<int>(panels * (panel_w + 20));
  std::string out = svg_open(width, 380);
  std::vector<std::string> rows;
  out += text_at(40, 22, title);
  for (int p = 0; p < panels; ++p) {
    const auto& st = stages[p];
    const auto tf = st.slice.tflops_values();
    std::vector<double> xs;
    for (const auto& pt : st.slice.points) xs.push_back(static_cast<double>(pt.value));
    Frame f{40 + p * (panel_w + 20), 50, panel_w, 250,
            xs.front(), xs.back(), lo - pad, hi + pad};
    out += frame_axes(f, axis_name(st.slice.sweep_axis), p == 0 ? "TFLOPs" : "");
    out += polyline(f, xs, tf, kPalette[p % 8]);
    const double rough = metrics::roughness(tf);
    double mean = 0.0;
    for (double v : tf) mean += v;
    mean /= static_cast<double>(tf.size());
    out += text_at(f.x0 + 4, 44, st.name);
    out += text_at(f.x0 + 4, f.y0 + 14, "mean " + fmt(mean));
    out += text_at(f.x0 + 4, f.y0 + 28, "rough " + fmt(rough));
    std::string r = st.name;
    for (double v : tf) r += "," + format_double(v);
    rows.push_back(r);
  }
  out += data_comment("stage,tflops_sequence", rows);
  return out + "</svg>\n";
}

}  // namespace rugged::plot
