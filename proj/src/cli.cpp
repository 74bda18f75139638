#include "rugged/cli.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rugged/attribute.hpp"
#include "rugged/costmodel.hpp"
#include "rugged/decompose.hpp"
#include "rugged/dpopt.hpp"
#include "rugged/grid.hpp"
#include "rugged/kernels.hpp"
#include "rugged/metrics.hpp"
#include "rugged/plot.hpp"
#include "rugged/sweep.hpp"
#include "rugged/tileselect.hpp"

namespace rugged::cli {

namespace {

using nlohmann::json;

struct AxisSpec {
  dim_t start = 0, step = 0, stop = 0;
};

GridAxis axis_from_spec(const AxisSpec& s) {
  if (s.step <= 0 || s.start <= 0 || s.stop < s.start) {
    throw domain_error("bad axis spec (need start:step:stop with stop >= start)");
  }
  return default_axis(s.start, s.step, s.stop);
}

AxisSpec parse_axis_spec(const std::string& text) {
  AxisSpec s;
  if (std::sscanf(text.c_str(), "%ld:%ld:%ld", &s.start, &s.step, &s.stop) != 3) {
    throw domain_error("bad axis spec '" + text + "' (expected start:step:stop)");
  }
  return s;
}

dim_t parse_dim(const std::string& s, const std::string& what) {
  dim_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw domain_error("bad " + what + " value '" + s + "'");
  }
  return v;
}

double parse_real(const std::string& s, const std::string& what) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw domain_error("bad " + what + " value '" + s + "'");
  }
  return v;
}

// "--fixed M=4096,K=4096" style pairs.
std::map<std::string, dim_t> parse_fixed(const std::string& text) {
  std::map<std::string, dim_t> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw domain_error("bad --fixed item '" + item + "' (expected DIM=VALUE)");
    }
    std::string key = item.substr(0, eq);
    for (auto& c : key) c = static_cast<char>(std::toupper(c));
    out[key] = parse_dim(item.substr(eq + 1), "--fixed " + key);
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

CostModelParams resolve_params(const std::string& preset_name,
                               const std::string& params_path) {
  if (!params_path.empty()) return params_from_json(read_file(params_path));
  return preset(preset_name);
}

Slice1D slice_by_request(const TimingGrid& grid, const std::string& axis,
                         const std::map<std::string, dim_t>& fixed) {
  const Axis sweep = axis_from_name(axis);
  dim_t fa = 0, fb = 0;
  auto need = [&](const char* name) {
    const auto it = fixed.find(name);
    if (it == fixed.end()) {
      throw domain_error(std::string("--fixed is missing ") + name);
    }
    return it->second;
  };
  switch (sweep) {
    case Axis::M: fa = need("N"); fb = need("K"); break;
    case Axis::N: fa = need("M"); fb = need("K"); break;
    default: fa = need("M"); fb = need("N"); break;
  }
  return slice(grid, sweep, fa, fb);
}

// ---------------------------------------------------------------------
// pipeline: simulate -> tilepick -> dp -> metrics -> attribute, with the
// sandwich and stage-roughness invariants enforced.
// ---------------------------------------------------------------------
int run_pipeline(const std::string& preset_name, dim_t step, dim_t start,
                 dim_t stop, double split_overhead, bool fixpoint,
                 bool with_ideal, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto path = [&](const std::string& name) { return out_dir + "/" + name; };

  const GridAxis ax = default_axis(start, step, stop);

  // Stage 1: fixed-tile baseline plus the tile-variant ensemble.
  const std::vector<std::string> variant_names = {
      preset_name + "-t64", preset_name + "-t128", preset_name + "-t256"};
  TileEnsemble ens;
  for (const auto& name : variant_names) {
    const CostModelParams p = preset(name);
    TileEnsemble::Member m;
    m.tile = {p.tile_m, p.tile_n, name};
    m.grid = generate(p, ax, ax, ax);
    ens.members.push_back(std::move(m));
  }
  const TimingGrid& fixed_grid = ens.members.back().grid;  // 256x256 baseline
  save_grid(fixed_grid, path("t0_fixed256.json"));

  // Stage 2: dynamic best-of-k envelope.
  const WinnerMap wm = envelope(ens);
  save_grid(wm.envelope, path("t0_dynamic.json"));
  atomic_write_file(path("winner_map.csv"), winner_map_to_csv(wm));
  atomic_write_file(path("win_table.json"), win_table_to_json(win_table(wm)));

  // Stage 3: DP tables on the dynamic-tile landscape.
  const DpTables tables = dp_build(wm.envelope, split_overhead, fixpoint);
  save_tables(tables, path("dp_tables.bin"));
  atomic_write_file(path("dp_impact.json"), impact_to_json(dp_impact_report(tables)));
  const auto actions = action_distribution(tables, std::nullopt, std::nullopt,
                                           ax.max_value());
  {
    json j;
    j["filter"] = {{"k", ax.max_value()}};
    j["total"] = actions.total;
    j["pad_or_asis"] = actions.pad_or_asis;
    j["split_k"] = actions.split_k;
    j["split_n"] = actions.split_n;
    j["split_m"] = actions.split_m;
    atomic_write_file(path("dp_actions.json"), j.dump(2) + "\n");
  }

  // Sandwich and pad-table monotonicity invariants.
  for (std::size_t i = 0; i < tables.cell_count(); ++i) {
    if (!(tables.t2[i] <= tables.t1[i] && tables.t1[i] <= tables.t0[i])) {
      throw invariant_error("pipeline: sandwich t2 <= t1 <= t0 violated");
    }
  }
  for (int im = 0; im < ax.count; ++im) {
    for (int in = 0; in < ax.count; ++in) {
      for (int ik = 0; ik < ax.count; ++ik) {
        const double v = tables.t1[tables.index(im, in, ik)];
        if (im + 1 < ax.count && tables.t1[tables.index(im + 1, in, ik)] < v) {
          throw invariant_error("pipeline: t1 not monotone along M");
        }
        if (in + 1 < ax.count && tables.t1[tables.index(im, in + 1, ik)] < v) {
          throw invariant_error("pipeline: t1 not monotone along N");
        }
        if (ik + 1 < ax.count && tables.t1[tables.index(im, in, ik + 1)] < v) {
          throw invariant_error("pipeline: t1 not monotone along K");
        }
      }
    }
  }

  // Stage slices at the canonical geometry (N axis, M = K = lattice max).
  std::vector<StageSlice> stages;
  if (with_ideal) {
    const TimingGrid ideal = generate(preset("ideal"), ax, ax, ax);
    stages.push_back({"ideal", metrics::canonical_slice(ideal)});
  }
  stages.push_back({"fixed-tile", metrics::canonical_slice(fixed_grid)});
  stages.push_back({"dynamic-tile", metrics::canonical_slice(wm.envelope)});

  auto table_slice = [&](const std::vector<double>& tbl) {
    Slice1D s;
    s.sweep_axis = Axis::N;
    s.fixed_a = ax.max_value();
    s.fixed_b = ax.max_value();
    s.step = ax.step;
    const int im = ax.count - 1, ik = ax.count - 1;
    for (int in = 0; in < ax.count; ++in) {
      SlicePoint p;
      p.value = ax.value(in);
      p.time_s = tbl[tables.index(im, in, ik)];
      p.tflops = tflops_of(ax.max_value(), p.value, ax.max_value(), p.time_s);
      s.points.push_back(p);
    }
    return s;
  };
  stages.push_back({"dp-pad", table_slice(tables.t1)});
  stages.push_back({"dp-split-pad", table_slice(tables.t2)});

  // Stage 4: metrics per stage + monotone roughness across the stack.
  json stage_report = json::array();
  std::vector<double> stage_rough;
  for (const auto& st : stages) {
    const auto tf = st.slice.tflops_values();
    const double rough = metrics::roughness(tf);
    double mean = 0.0;
    for (double v : tf) mean += v;
    mean /= static_cast<double>(tf.size());
    stage_report.push_back({{"stage", st.name},
                            {"canonical_roughness", rough},
                            {"canonical_mean_tflops", mean}});
    if (st.name != "ideal") stage_rough.push_back(rough);
    atomic_write_file(path("slice_" + st.name + ".csv"), slice_to_csv(st.slice));
  }
  for (std::size_t i = 1; i < stage_rough.size(); ++i) {
    if (stage_rough[i] > stage_rough[i - 1]) {
      throw invariant_error(
          "pipeline: canonical roughness must decline monotonically across "
          "stages");
    }
  }

  // Stage 5: attribution of the post-DP residual.
  const CostModelParams base = preset(preset_name);
  AttributionContext ctx;
  ctx.tile_m = base.tile_m;
  ctx.tile_n = base.tile_n;
  ctx.sg_m = base.sg_m;
  ctx.sg_n = base.sg_n;
  ctx.cores = base.cores;
  ctx.channels = base.channels;
  std::vector<StageSlice> budget_stages(stages.begin() + (with_ideal ? 1 : 0),
                                        stages.end());
  const BudgetTable budget = budget_table(budget_stages, builtin_predicates(), ctx);
  atomic_write_file(path("attribution_budget.json"), budget_to_json(budget));

  atomic_write_file(path("stage_progression.svg"),
                    plot::stage_progression(stages, "Landscape across the stack"));
  atomic_write_file(path("winner_mosaic.svg"),
                    plot::winner_mosaic(wm, ax.max_value(), "Winner tiles"));

  json report;
  report["preset"] = preset_name;
  report["axis"] = {{"start", ax.start}, {"step", ax.step}, {"count", ax.count}};
  report["stages"] = stage_report;
  report["actions_at_kmax"] = {{"pad_or_asis", actions.pad_or_asis},
                               {"split_k", actions.split_k},
                               {"split_n", actions.split_n},
                               {"split_m", actions.split_m}};
  report["kernel_backend"] = kernels::backend_name();
  atomic_write_file(path("pipeline_report.json"), report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_inner(const std::vector<std::string>& args) {
  CLI::App app{"GEMM performance-landscape analyzer and pad/split optimizer"};
  app.require_subcommand(1);

  // --- simulate ---
  auto* sim = app.add_subcommand("simulate", "generate a synthetic timing grid");
  std::string sim_preset = "bmg-b580", sim_params, sim_out, sim_dump;
  dim_t sim_step = 128, sim_start = 0, sim_stop = 4096;
  std::string sim_ax_m, sim_ax_n, sim_ax_k;
  sim->add_option("--preset", sim_preset, "named parameter preset");
  sim->add_option("--params", sim_params, "params JSON file (overrides preset)");
  sim->add_option("--step", sim_step, "lattice step for all axes");
  sim->add_option("--start", sim_start, "lattice start (default: step)");
  sim->add_option("--stop", sim_stop, "lattice stop");
  sim->add_option("--axis-m", sim_ax_m, "M axis start:step:stop");
  sim->add_option("--axis-n", sim_ax_n, "N axis start:step:stop");
  sim->add_option("--axis-k", sim_ax_k, "K axis start:step:stop");
  sim->add_option("--out", sim_out, "output grid file (.json or .csv)")->required();
  sim->add_option("--dump-params", sim_dump, "also write the resolved params");

  // --- ingest ---
  auto* ing = app.add_subcommand("ingest", "read a measurement CSV into a grid");
  std::string ing_in, ing_out;
  ing->add_option("--in", ing_in)->required();
  ing->add_option("--out", ing_out)->required();

  // --- metrics ---
  auto* met = app.add_subcommand("metrics", "landscape statistics report");
  std::string met_in, met_out, met_slices;
  met->add_option("--in", met_in)->required();
  met->add_option("--out", met_out, "report JSON")->required();
  met->add_option("--slices-csv", met_slices, "per-slice roughness CSV");

  // --- decompose ---
  auto* dec = app.add_subcommand("decompose", "four-surface time decomposition");
  std::string dec_in, dec_mem, dec_preset = "bmg-b580", dec_params, dec_out,
              dec_csv, dec_fixed;
  double dec_peak = 0.0;
  std::string dec_bw;
  dec->add_option("--in", dec_in, "measured/synthetic GEMM grid")->required();
  dec->add_option("--memory", dec_mem, "measured memory grid (else modeled)");
  dec->add_option("--preset", dec_preset, "params preset for the modeled memory");
  dec->add_option("--params", dec_params, "params JSON for the modeled memory");
  dec->add_option("--peak", dec_peak, "peak TFLOPs (default: preset's)");
  dec->add_option("--bw-compare", dec_bw,
                  "comma list of bandwidths (GB/s) for bottleneck splits");
  dec->add_option("--out", dec_out, "four-surface JSON bundle")->required();
  dec->add_option("--stacked-csv", dec_csv, "per-N stacked CSV");
  dec->add_option("--fixed", dec_fixed, "M=..,K=.. for the stacked CSV");

  // --- tilepick ---
  auto* tp = app.add_subcommand("tilepick", "best-of-k tile envelope");
  std::string tp_tiles, tp_out, tp_csv, tp_stats;
  tp->add_option("--tiles", tp_tiles, "comma list of member grid files")->required();
  tp->add_option("--out", tp_out, "envelope grid file")->required();
  tp->add_option("--winners-csv", tp_csv);
  tp->add_option("--stats-json", tp_stats);

  // --- dp ---
  auto* dp = app.add_subcommand("dp", "compute pad/split tables");
  std::string dp_in, dp_out, dp_impact, dp_actions, dp_fixed;
  double dp_overhead = 0.0;
  bool dp_fix = false;
  dp->add_option("--in", dp_in, "t0 grid")->required();
  dp->add_option("--out", dp_out, "table bundle (.bin or .json)")->required();
  dp->add_option("--split-overhead", dp_overhead, "seconds per split");
  dp->add_flag("--fixpoint", dp_fix, "experimental iterated mode");
  dp->add_option("--impact-json", dp_impact);
  dp->add_option("--actions-json", dp_actions);
  dp->add_option("--fixed", dp_fixed, "filter for --actions-json, e.g. K=4096");

  // --- lookup ---
  auto* lk = app.add_subcommand("lookup", "O(1) plan lookup");
  std::string lk_tables;
  dim_t lk_m = 0, lk_n = 0, lk_k = 0;
  lk->add_option("--tables", lk_tables)->required();
  lk->add_option("--m", lk_m)->required();
  lk->add_option("--n", lk_n)->required();
  lk->add_option("--k", lk_k)->required();

  // --- attribute ---
  auto* at = app.add_subcommand("attribute", "roughness attribution report");
  std::string at_slice, at_in, at_axis = "N", at_fixed, at_ctx, at_out;
  at->add_option("--slice", at_slice, "slice CSV");
  at->add_option("--in", at_in, "grid file (with --axis/--fixed)");
  at->add_option("--axis", at_axis);
  at->add_option("--fixed", at_fixed, "e.g. M=4096,K=4096");
  at->add_option("--context", at_ctx, "context JSON (tile/sg/cores/channels)");
  at->add_option("--out", at_out, "report JSON")->required();

  // --- sweep-order ---
  auto* so = app.add_subcommand("sweep-order", "emit a randomized sweep plan");
  std::string so_out;
  dim_t so_step = 128, so_start = 0, so_stop = 4096;
  std::uint64_t so_seed = 0;
  int so_warmup = 5;
  so->add_option("--step", so_step);
  so->add_option("--start", so_start, "default: step");
  so->add_option("--stop", so_stop);
  so->add_option("--seed", so_seed)->required();
  so->add_option("--warmup", so_warmup);
  so->add_option("--out", so_out)->required();

  // --- plot ---
  auto* pl = app.add_subcommand("plot", "render a deterministic SVG figure");
  std::string pl_kind, pl_in, pl_slice, pl_axis = "N", pl_fixed, pl_out,
              pl_tiles, pl_slices, pl_names, pl_title, pl_preset = "bmg-b580",
              pl_params;
  dim_t pl_k = 0, pl_m = 0;
  pl->add_option("--kind", pl_kind,
                 "slice-line | surface-heatmap | stacked-decomposition | "
                 "winner-mosaic | stage-progression")
      ->required();
  pl->add_option("--in", pl_in, "grid file");
  pl->add_option("--slice", pl_slice, "slice CSV (slice-line)");
  pl->add_option("--axis", pl_axis);
  pl->add_option("--fixed", pl_fixed);
  pl->add_option("--k", pl_k, "fixed K (heatmap/mosaic)");
  pl->add_option("--m", pl_m, "fixed M (stacked-decomposition)");
  pl->add_option("--tiles", pl_tiles, "member grids (winner-mosaic)");
  pl->add_option("--slices", pl_slices, "slice CSVs (stage-progression)");
  pl->add_option("--names", pl_names, "stage names (stage-progression)");
  pl->add_option("--preset", pl_preset, "params for modeled memory (stacked)");
  pl->add_option("--params", pl_params);
  pl->add_option("--title", pl_title);
  pl->add_option("--out", pl_out)->required();

  // --- pipeline ---
  auto* pp = app.add_subcommand("pipeline", "simulate -> tilepick -> dp -> "
                                            "metrics -> attribute");
  std::string pp_preset = "bmg-b580", pp_dir = "pipeline_out";
  dim_t pp_step = 128, pp_start = 0, pp_stop = 4096;
  double pp_overhead = 0.0;
  bool pp_fix = false, pp_ideal = false;
  pp->add_option("--preset", pp_preset);
  pp->add_option("--step", pp_step);
  pp->add_option("--start", pp_start, "default: step");
  pp->add_option("--stop", pp_stop);
  pp->add_option("--split-overhead", pp_overhead);
  pp->add_flag("--fixpoint", pp_fix);
  pp->add_flag("--with-ideal", pp_ideal, "prepend the ideal panel");
  pp->add_option("--out-dir", pp_dir);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      app.exit(e);
      return 0;
    }
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 2;
  }

  if (sim->parsed()) {
    const CostModelParams p = resolve_params(sim_preset, sim_params);
    if (sim_start == 0) sim_start = sim_step;
    GridAxis am = sim_ax_m.empty() ? default_axis(sim_start, sim_step, sim_stop)
                                   : axis_from_spec(parse_axis_spec(sim_ax_m));
    GridAxis an = sim_ax_n.empty() ? default_axis(sim_start, sim_step, sim_stop)
                                   : axis_from_spec(parse_axis_spec(sim_ax_n));
    GridAxis ak = sim_ax_k.empty() ? default_axis(sim_start, sim_step, sim_stop)
                                   : axis_from_spec(parse_axis_spec(sim_ax_k));
    const TimingGrid grid = generate(p, am, an, ak);
    save_grid(grid, sim_out);
    if (!sim_dump.empty()) atomic_write_file(sim_dump, params_to_json(p));
    std::cout << "wrote " << grid.cell_count() << " cells to " << sim_out << "\n";
    return 0;
  }

  if (ing->parsed()) {
    save_grid(ingest_csv(ing_in), ing_out);
    return 0;
  }

  if (met->parsed()) {
    const TimingGrid grid = load_grid(met_in);
    const auto report = metrics::full_report(grid);
    atomic_write_file(met_out, metrics::report_to_json(report));
    if (!met_slices.empty()) {
      atomic_write_file(met_slices, metrics::slices_to_csv(grid));
    }
    return 0;
  }

  if (dec->parsed()) {
    const TimingGrid gemm = load_grid(dec_in);
    CostModelParams p = resolve_params(dec_preset, dec_params);
    const double peak = dec_peak > 0 ? dec_peak : p.peak_tflops;
    DecompositionSurfaces s =
        dec_mem.empty() ? decompose(gemm, p, peak)
                        : decompose(gemm, load_grid(dec_mem), peak);
    json bundle = json::parse(surfaces_to_json(s));
    json splits = json::array();
    if (!dec_bw.empty()) {
      for (const auto& bw_text : split_list(dec_bw)) {
        CostModelParams q = p;
        q.mem_bw_gbps = parse_real(bw_text, "--bw-compare");
        const auto split =
            classify_bottleneck(decompose(gemm, q, peak), bw_text + " GB/s");
        splits.push_back({{"bandwidth", split.bandwidth_label},
                          {"compute_bound_fraction", split.compute_bound_fraction},
                          {"memory_bound_fraction", split.memory_bound_fraction}});
      }
    } else {
      const auto split = classify_bottleneck(s, s.memory_source);
      splits.push_back({{"bandwidth", split.bandwidth_label},
                        {"compute_bound_fraction", split.compute_bound_fraction},
                        {"memory_bound_fraction", split.memory_bound_fraction}});
    }
    bundle["bottleneck"] = splits;
    atomic_write_file(dec_out, bundle.dump(2) + "\n");
    if (!dec_csv.empty()) {
      const auto fixed = parse_fixed(dec_fixed.empty() ? "M=0,K=0" : dec_fixed);
      dim_t fm = fixed.count("M") ? fixed.at("M") : 0;
      dim_t fk = fixed.count("K") ? fixed.at("K") : 0;
      if (fm == 0) fm = s.axis_m.max_value();
      if (fk == 0) fk = s.axis_k.max_value();
      atomic_write_file(dec_csv, stacked_csv(s, fm, fk));
    }
    return 0;
  }

  if (tp->parsed()) {
    TileEnsemble ens;
    for (const auto& file : split_list(tp_tiles)) {
      TileEnsemble::Member m;
      m.grid = load_grid(file);
      if (!m.grid.tile_m || !m.grid.tile_n) {
        throw domain_error("tile member " + file + " lacks tile_m/tile_n");
      }
      m.tile = {*m.grid.tile_m, *m.grid.tile_n, file};
      ens.members.push_back(std::move(m));
    }
    const WinnerMap wm = envelope(ens);
    save_grid(wm.envelope, tp_out);
    if (!tp_csv.empty()) atomic_write_file(tp_csv, winner_map_to_csv(wm));
    if (!tp_stats.empty()) {
      atomic_write_file(tp_stats, win_table_to_json(win_table(wm)));
    }
    return 0;
  }

  if (dp->parsed()) {
    const TimingGrid t0 = load_grid(dp_in);
    const DpTables tables = dp_build(t0, dp_overhead, dp_fix);
    save_tables(tables, dp_out);
    if (!dp_impact.empty()) {
      atomic_write_file(dp_impact, impact_to_json(dp_impact_report(tables)));
    }
    if (!dp_actions.empty()) {
      std::optional<dim_t> fm, fn, fk;
      if (!dp_fixed.empty()) {
        for (const auto& [key, v] : parse_fixed(dp_fixed)) {
          if (key == "M") fm = v;
          else if (key == "N") fn = v;
          else if (key == "K") fk = v;
        }
      }
      const auto a = action_distribution(tables, fm, fn, fk);
      json j = {{"total", a.total},
                {"pad_or_asis", a.pad_or_asis},
                {"split_k", a.split_k},
                {"split_n", a.split_n},
                {"split_m", a.split_m}};
      atomic_write_file(dp_actions, j.dump(2) + "\n");
    }
    return 0;
  }

  if (lk->parsed()) {
    const DpTables tables = load_tables(lk_tables);
    const LookupResult res = lookup(tables, lk_m, lk_n, lk_k);
    json j;
    j["predicted_s"] = res.predicted_s;
    j["off_lattice"] = res.off_lattice;
    j["used"] = {res.used_m, res.used_n, res.used_k};
    j["plan"] = json::parse(plan_to_json(res.plan));
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (at->parsed()) {
    Slice1D s;
    if (!at_slice.empty()) {
      s = slice_from_csv(at_slice);
    } else if (!at_in.empty()) {
      s = slice_by_request(load_grid(at_in), at_axis, parse_fixed(at_fixed));
    } else {
      throw domain_error("attribute: need --slice or --in");
    }
    AttributionContext ctx;
    if (!at_ctx.empty()) ctx = context_from_json(read_file(at_ctx));
    const auto report = attribute(s, builtin_predicates(), ctx);
    atomic_write_file(at_out, report_to_json(report));
    return 0;
  }

  if (so->parsed()) {
    if (so_start == 0) so_start = so_step;
    const GridAxis ax = default_axis(so_start, so_step, so_stop);
    const SweepPlan plan = plan_randomized(ax, ax, ax, so_seed, so_warmup);
    atomic_write_file(so_out, plan_to_csv(plan));
    return 0;
  }

  if (pl->parsed()) {
    std::string svg;
    if (pl_kind == "slice-line") {
      Slice1D s = !pl_slice.empty()
                      ? slice_from_csv(pl_slice)
                      : slice_by_request(load_grid(pl_in), pl_axis,
                                         parse_fixed(pl_fixed));
      svg = plot::slice_line(s, pl_title.empty() ? "TFLOPs slice" : pl_title);
    } else if (pl_kind == "surface-heatmap") {
      const TimingGrid grid = load_grid(pl_in);
      const dim_t k = pl_k > 0 ? pl_k : grid.axis_k.max_value();
      svg = plot::surface_heatmap(grid, k,
                                  pl_title.empty() ? "TFLOPs surface" : pl_title);
    } else if (pl_kind == "stacked-decomposition") {
      const TimingGrid gemm = load_grid(pl_in);
      const CostModelParams p = resolve_params(pl_preset, pl_params);
      const auto s = decompose(gemm, p, p.peak_tflops);
      const dim_t m = pl_m > 0 ? pl_m : gemm.axis_m.max_value();
      const dim_t k = pl_k > 0 ? pl_k : gemm.axis_k.max_value();
      svg = plot::stacked_decomposition(
          s, m, k, pl_title.empty() ? "Time decomposition" : pl_title);
    } else if (pl_kind == "winner-mosaic") {
      TileEnsemble ens;
      for (const auto& file : split_list(pl_tiles)) {
        TileEnsemble::Member m;
        m.grid = load_grid(file);
        if (!m.grid.tile_m || !m.grid.tile_n) {
          throw domain_error("tile member " + file + " lacks tile_m/tile_n");
        }
        m.tile = {*m.grid.tile_m, *m.grid.tile_n, file};
        ens.members.push_back(std::move(m));
      }
      const WinnerMap wm = envelope(ens);
      const dim_t k = pl_k > 0 ? pl_k : wm.envelope.axis_k.max_value();
      svg = plot::winner_mosaic(wm, k, pl_title.empty() ? "Winner tiles" : pl_title);
    } else if (pl_kind == "stage-progression") {
      const auto files = split_list(pl_slices);
      auto names = split_list(pl_names);
      if (names.size() < files.size()) {
        for (std::size_t i = names.size(); i < files.size(); ++i) {
          names.push_back("stage-" + std::to_string(i));
        }
      }
      std::vector<StageSlice> stages;
      for (std::size_t i = 0; i < files.size(); ++i) {
        stages.push_back({names[i], slice_from_csv(files[i])});
      }
      svg = plot::stage_progression(
          stages, pl_title.empty() ? "Stage progression" : pl_title);
    } else {
      throw domain_error("unknown plot kind: " + pl_kind);
    }
    atomic_write_file(pl_out, svg);
    return 0;
  }

  if (pp->parsed()) {
    if (pp_start == 0) pp_start = pp_step;
    return run_pipeline(pp_preset, pp_step, pp_start, pp_stop, pp_overhead,
                        pp_fix, pp_ideal, pp_dir);
  }

  return 2;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  try {
    return run_inner(args);
  } catch (const invariant_error& e) {
    std::cerr << "internal invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace rugged::cli
