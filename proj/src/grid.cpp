#include "rugged/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rugged {

using nlohmann::json;

double tflops_of(dim_t m, dim_t n, dim_t k, double t_seconds) {
  if (m <= 0 || n <= 0 || k <= 0) {
    throw domain_error("tflops_of: dimensions must be positive");
  }
  if (!(t_seconds > 0.0) || !std::isfinite(t_seconds)) {
    throw domain_error("tflops_of: time must be positive and finite");
  }
  const double flops = 2.0 * static_cast<double>(m) * static_cast<double>(n) *
                       static_cast<double>(k);
  return flops / (t_seconds * 1e12);
}

void GridAxis::validate(const char* name) const {
  if (start <= 0 || step <= 0 || count <= 0) {
    throw lattice_error(std::string("axis ") + name +
                        ": start, step and count must be positive");
  }
}

const char* axis_name(Axis a) {
  switch (a) {
    case Axis::M: return "M";
    case Axis::N: return "N";
    default: return "K";
  }
}

Axis axis_from_name(const std::string& s) {
  if (s == "M" || s == "m") return Axis::M;
  if (s == "N" || s == "n") return Axis::N;
  if (s == "K" || s == "k") return Axis::K;
  throw domain_error("unknown axis name: " + s);
}

void TimingGrid::validate() const {
  axis_m.validate("M");
  axis_n.validate("N");
  axis_k.validate("K");
  if (times.size() != cell_count()) {
    throw lattice_error("times size " + std::to_string(times.size()) +
                        " does not match lattice cell count " +
                        std::to_string(cell_count()));
  }
  for (double t : times) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw lattice_error("grid times must be finite and > 0");
    }
  }
  if (!time_min.empty() && time_min.size() != times.size()) {
    throw lattice_error("time_min side column size mismatch");
  }
  if (!time_cv_pct.empty() && time_cv_pct.size() != times.size()) {
    throw lattice_error("time_cv side column size mismatch");
  }
}

Slice1D slice(const TimingGrid& grid, Axis sweep, dim_t fixed_a,
              dim_t fixed_b) {
  Axis fa, fb;
  switch (sweep) {
    case Axis::M: fa = Axis::N; fb = Axis::K; break;
    case Axis::N: fa = Axis::M; fb = Axis::K; break;
    default: fa = Axis::M; fb = Axis::N; break;
  }
  const int ia = grid.axis(fa).index_of(fixed_a);
  const int ib = grid.axis(fb).index_of(fixed_b);
  if (ia < 0) {
    throw lookup_error(std::string("slice: fixed ") + axis_name(fa) + "=" +
                       std::to_string(fixed_a) + " is off-lattice");
  }
  if (ib < 0) {
    throw lookup_error(std::string("slice: fixed ") + axis_name(fb) + "=" +
                       std::to_string(fixed_b) + " is off-lattice");
  }

  Slice1D out;
  out.sweep_axis = sweep;
  out.fixed_a = fixed_a;
  out.fixed_b = fixed_b;
  out.step = grid.axis(sweep).step;
  const int n = grid.axis(sweep).count;
  out.points.reserve(n);
  for (int i = 0; i < n; ++i) {
    int im, in, ik;
    switch (sweep) {
      case Axis::M: im = i; in = ia; ik = ib; break;
      case Axis::N: im = ia; in = i; ik = ib; break;
      default: im = ia; in = ib; ik = i; break;
    }
    SlicePoint p;
    p.value = grid.axis(sweep).value(i);
    p.time_s = grid.at(im, in, ik);
    p.tflops = grid.tflops_at(im, in, ik);
    out.points.push_back(p);
  }
  return out;
}

namespace {

// Infers a uniform axis from the sorted set of observed values.
GridAxis infer_axis(const std::set<dim_t>& values, const char* name) {
  if (values.empty()) throw lattice_error(std::string("axis ") + name + ": no values");
  std::vector<dim_t> v(values.begin(), values.end());
  GridAxis ax;
  ax.start = v.front();
  ax.count = static_cast<int>(v.size());
  ax.step = v.size() > 1 ? v[1] - v[0] : 1;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] - v[i - 1] != ax.step) {
      throw lattice_error(std::string("axis ") + name +
                          ": non-uniform step between " +
                          std::to_string(v[i - 1]) + " and " +
                          std::to_string(v[i]));
    }
  }
  ax.validate(name);
  return ax;
}

double parse_double_field(const std::string& s, const std::string& ctx) {
  double out;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw io_error("bad numeric field '" + s + "' in " + ctx);
  }
  return out;
}

dim_t parse_dim_field(const std::string& s, const std::string& ctx) {
  dim_t out;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw io_error("bad integer field '" + s + "' in " + ctx);
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

TimingGrid ingest_csv_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  std::string label;
  std::optional<dim_t> tile_m, tile_n;

  struct CellAcc {
    std::vector<double> samples;
  };
  std::map<std::tuple<dim_t, dim_t, dim_t>, CellAcc> cells;
  std::set<dim_t> ms, ns, ks;

  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (line[0] == '#') {
      // First comment line doubles as the grid label.
      std::string c = line.substr(1);
      while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.erase(c.begin());
      if (label.empty()) label = c;
      continue;
    }
    const auto fields = split_csv_line(line);
    const std::string ctx = origin + ":" + std::to_string(lineno);
    if (!header_seen) {
      if (fields.size() != 6 || fields[0] != "M" || fields[1] != "N" ||
          fields[2] != "K" || fields[3] != "tile_m" || fields[4] != "tile_n" ||
          fields[5] != "time_s") {
        throw io_error("bad CSV header in " + ctx +
                       " (expected M,N,K,tile_m,tile_n,time_s)");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 6) {
      throw io_error("expected 6 fields in " + ctx);
    }
    const dim_t m = parse_dim_field(fields[0], ctx);
    const dim_t n = parse_dim_field(fields[1], ctx);
    const dim_t k = parse_dim_field(fields[2], ctx);
    if (!fields[3].empty()) {
      const dim_t tm = parse_dim_field(fields[3], ctx);
      if (tile_m && *tile_m != tm) throw io_error("inconsistent tile_m in " + ctx);
      tile_m = tm;
    }
    if (!fields[4].empty()) {
      const dim_t tn = parse_dim_field(fields[4], ctx);
      if (tile_n && *tile_n != tn) throw io_error("inconsistent tile_n in " + ctx);
      tile_n = tn;
    }
    const double t = parse_double_field(fields[5], ctx);
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw io_error("time_s must be positive and finite in " + ctx);
    }
    cells[{m, n, k}].samples.push_back(t);
    ms.insert(m);
    ns.insert(n);
    ks.insert(k);
  }
  if (!header_seen) throw io_error("empty CSV: " + origin);

  TimingGrid grid;
  grid.axis_m = infer_axis(ms, "M");
  grid.axis_n = infer_axis(ns, "N");
  grid.axis_k = infer_axis(ks, "K");
  grid.label = label;
  grid.tile_m = tile_m;
  grid.tile_n = tile_n;
  grid.times.assign(grid.cell_count(), 0.0);

  bool any_repeats = false;
  std::vector<std::string> missing;
  std::vector<double> mins(grid.cell_count(), 0.0);
  std::vector<double> cvs(grid.cell_count(), 0.0);
  for (int im = 0; im < grid.axis_m.count; ++im) {
    for (int in = 0; in < grid.axis_n.count; ++in) {
      for (int ik = 0; ik < grid.axis_k.count; ++ik) {
        const dim_t m = grid.axis_m.value(im);
        const dim_t n = grid.axis_n.value(in);
        const dim_t k = grid.axis_k.value(ik);
        auto it = cells.find({m, n, k});
        if (it == cells.end()) {
          if (missing.size() < 16) {
            missing.push_back("(" + std::to_string(m) + "," +
                              std::to_string(n) + "," + std::to_string(k) +
                              ")");
          }
          continue;
        }
        const auto& s = it->second.samples;
        double sum = 0.0, mn = s[0];
        for (double x : s) {
          sum += x;
          mn = std::min(mn, x);
        }
        const double mean = sum / static_cast<double>(s.size());
        double var = 0.0;
        for (double x : s) var += (x - mean) * (x - mean);
        var /= static_cast<double>(s.size());
        const std::size_t idx = grid.index(im, in, ik);
        grid.times[idx] = mean;
        mins[idx] = mn;
        cvs[idx] = mean != 0.0 ? std::sqrt(var) / mean * 100.0 : 0.0;
        if (s.size() > 1) any_repeats = true;
      }
    }
  }
  if (!missing.empty()) {
    std::string msg = "incomplete grid, missing cells:";
    for (const auto& c : missing) msg += " " + c;
    throw lattice_error(msg);
  }
  if (any_repeats) {
    grid.time_min = std::move(mins);
    grid.time_cv_pct = std::move(cvs);
  }
  grid.validate();
  return grid;
}

TimingGrid ingest_csv(const std::string& path) {
  return ingest_csv_text(read_file(path), path);
}

std::string to_csv(const TimingGrid& grid) {
  std::string out;
  if (!grid.label.empty()) out += "# " + grid.label + "\n";
  out += "M,N,K,tile_m,tile_n,time_s\n";
  const std::string tm = grid.tile_m ? std::to_string(*grid.tile_m) : "";
  const std::string tn = grid.tile_n ? std::to_string(*grid.tile_n) : "";
  for (int im = 0; im < grid.axis_m.count; ++im) {
    for (int in = 0; in < grid.axis_n.count; ++in) {
      for (int ik = 0; ik < grid.axis_k.count; ++ik) {
        out += std::to_string(grid.axis_m.value(im)) + "," +
               std::to_string(grid.axis_n.value(in)) + "," +
               std::to_string(grid.axis_k.value(ik)) + "," + tm + "," + tn +
               "," + format_double(grid.at(im, in, ik)) + "\n";
      }
    }
  }
  return out;
}

std::string slice_to_csv(const Slice1D& s) {
  std::string out = "# axis=";
  out += axis_name(s.sweep_axis);
  out += " fixed_a=" + std::to_string(s.fixed_a) +
         " fixed_b=" + std::to_string(s.fixed_b) +
         " step=" + std::to_string(s.step) + "\n";
  out += "value,time_s\n";
  for (const auto& p : s.points) {
    out += std::to_string(p.value) + "," + format_double(p.time_s) + "\n";
  }
  return out;
}

Slice1D slice_from_csv_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  Slice1D s;
  bool geometry_seen = false, header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::string ctx = origin + ":" + std::to_string(lineno);
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string tok;
      while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "axis") s.sweep_axis = axis_from_name(val);
        else if (key == "fixed_a") s.fixed_a = parse_dim_field(val, ctx);
        else if (key == "fixed_b") s.fixed_b = parse_dim_field(val, ctx);
        else if (key == "step") s.step = parse_dim_field(val, ctx);
        geometry_seen = true;
      }
      continue;
    }
    const auto f = split_csv_line(line);
    if (!header_seen) {
      if (f.size() != 2 || f[0] != "value" || f[1] != "time_s") {
        throw io_error("bad slice CSV header in " + ctx);
      }
      header_seen = true;
      continue;
    }
    if (f.size() != 2) throw io_error("expected 2 fields in " + ctx);
    SlicePoint p;
    p.value = parse_dim_field(f[0], ctx);
    p.time_s = parse_double_field(f[1], ctx);
    s.points.push_back(p);
  }
  if (!geometry_seen || !header_seen || s.points.size() < 2) {
    throw io_error("slice CSV missing geometry, header or points: " + origin);
  }
  for (std::size_t i = 0; i + 1 < s.points.size(); ++i) {
    if (s.points[i + 1].value <= s.points[i].value) {
      throw lattice_error("slice CSV values must be strictly increasing");
    }
  }
  // Recompute TFLOPs from geometry.
  for (auto& p : s.points) {
    dim_t m, n, k;
    switch (s.sweep_axis) {
      case Axis::M: m = p.value; n = s.fixed_a; k = s.fixed_b; break;
      case Axis::N: m = s.fixed_a; n = p.value; k = s.fixed_b; break;
      default: m = s.fixed_a; n = s.fixed_b; k = p.value; break;
    }
    p.tflops = tflops_of(m, n, k, p.time_s);
  }
  return s;
}

Slice1D slice_from_csv(const std::string& path) {
  return slice_from_csv_text(read_file(path), path);
}

namespace {

json axis_to_json(const GridAxis& ax) {
  return json{{"start", ax.start}, {"step", ax.step}, {"count", ax.count}};
}

GridAxis axis_from_json(const json& j, const char* name) {
  GridAxis ax;
  ax.start = j.at("start").get<dim_t>();
  ax.step = j.at("step").get<dim_t>();
  ax.count = j.at("count").get<int>();
  ax.validate(name);
  return ax;
}

}  // namespace

std::string to_json(const TimingGrid& grid) {
  json j;
  j["label"] = grid.label;
  j["axes"] = {{"m", axis_to_json(grid.axis_m)},
               {"n", axis_to_json(grid.axis_n)},
               {"k", axis_to_json(grid.axis_k)}};
  if (grid.tile_m) j["tile_m"] = *grid.tile_m;
  if (grid.tile_n) j["tile_n"] = *grid.tile_n;
  j["times"] = grid.times;
  if (!grid.time_min.empty()) j["time_min"] = grid.time_min;
  if (!grid.time_cv_pct.empty()) j["time_cv_pct"] = grid.time_cv_pct;
  return j.dump(2) + "\n";
}

TimingGrid grid_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw io_error(std::string("bad grid JSON: ") + e.what());
  }
  try {
    TimingGrid grid;
    grid.label = j.value("label", std::string());
    grid.axis_m = axis_from_json(j.at("axes").at("m"), "M");
    grid.axis_n = axis_from_json(j.at("axes").at("n"), "N");
    grid.axis_k = axis_from_json(j.at("axes").at("k"), "K");
    if (j.contains("tile_m")) grid.tile_m = j["tile_m"].get<dim_t>();
    if (j.contains("tile_n")) grid.tile_n = j["tile_n"].get<dim_t>();
    grid.times = j.at("times").get<std::vector<double>>();
    if (j.contains("time_min"))
      grid.time_min = j["time_min"].get<std::vector<double>>();
    if (j.contains("time_cv_pct"))
      grid.time_cv_pct = j["time_cv_pct"].get<std::vector<double>>();
    grid.validate();
    return grid;
  } catch (const json::exception& e) {
    throw io_error(std::string("bad grid JSON: ") + e.what());
  }
}

namespace {
bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() &&
         s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}
}  // namespace

TimingGrid load_grid(const std::string& path) {
  if (ends_with(path, ".csv")) return ingest_csv(path);
  return grid_from_json(read_file(path));
}

void save_grid(const TimingGrid& grid, const std::string& path) {
  if (ends_with(path, ".csv")) {
    atomic_write_file(path, to_csv(grid));
  } else {
    atomic_write_file(path, to_json(grid));
  }
}

}  // namespace rugged
