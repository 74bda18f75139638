#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "rugged/cli.hpp"
#include "rugged/costmodel.hpp"
#include "rugged/dpopt.hpp"
#include "rugged/metrics.hpp"
#include "rugged/plot.hpp"
#include "rugged/tileselect.hpp"

using namespace rugged;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const std::string& name) {
  return (fs::temp_directory_path() / name).string();
}

std::size_t count_substr(const std::string& hay, const std::string& needle) {
  std::size_t n = 0, pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}

}  // namespace

TEST_CASE("slice-line of a constant surface annotates zero roughness") {
  const GridAxis ax = default_axis(128, 128, 2048);
  const TimingGrid g = generate(preset("roofline"), ax, ax, ax);
  const std::string svg = plot::slice_line(metrics::canonical_slice(g), "flat");
  CHECK(svg.find("roughness 0.00 TFLOPs/step") != std::string::npos);
  CHECK(svg.find("<!-- data") != std::string::npos);
  CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
}

TEST_CASE("heatmap of a 2x2 plane draws one cell per lattice point") {
  const GridAxis ax{128, 128, 2};
  const TimingGrid g = generate(preset("bmg-b580"), ax, ax, ax);
  const std::string svg = plot::surface_heatmap(g, 256, "tiny");
  // 4 data cells + 40 legend swatches.
  CHECK(count_substr(svg, "<rect") == 44);
  CHECK_THROWS_AS(plot::surface_heatmap(g, 100, "bad"), lookup_error);
}

TEST_CASE("plots are byte-identical across renders") {
  const GridAxis ax = default_axis(128, 256, 2048);
  const TimingGrid g = generate(preset("bmg-b580"), ax, ax, ax);
  const Slice1D s = metrics::canonical_slice(g);
  CHECK(plot::slice_line(s, "t") == plot::slice_line(s, "t"));
  const dim_t kmax = g.axis_k.max_value();
  CHECK(plot::surface_heatmap(g, kmax, "t") == plot::surface_heatmap(g, kmax, "t"));
}

TEST_CASE("stage progression renders one panel per stage") {
  const GridAxis ax = default_axis(128, 256, 2048);
  const TimingGrid a = generate(preset("bmg-b580"), ax, ax, ax);
  const TimingGrid b = generate(preset("ideal"), ax, ax, ax);
  std::vector<StageSlice> stages = {{"one", metrics::canonical_slice(a)},
                                    {"two", metrics::canonical_slice(b)}};
  const std::string svg = plot::stage_progression(stages, "stages");
  CHECK(count_substr(svg, "<polyline") == 2);
  CHECK(svg.find(">one<") != std::string::npos);
  CHECK(svg.find(">two<") != std::string::npos);
}

TEST_CASE("cli usage errors exit 2") {
  CHECK(cli::run({"no-such-command"}) == 2);
  CHECK(cli::run({"simulate", "--no-such-flag"}) == 2);
  CHECK(cli::run({"simulate"}) == 2);  // missing --out
  CHECK(cli::run({"metrics", "--in", "/nonexistent.json", "--out",
                  tmp_path("x.json")}) == 2);
}

TEST_CASE("cli simulate/dp/lookup round") {
  const std::string grid_path = tmp_path("rugged_cli_t0.json");
  const std::string tables_path = tmp_path("rugged_cli_tables.bin");
  CHECK(cli::run({"simulate", "--preset", "bmg-b580", "--step", "128",
                  "--stop", "1024", "--out", grid_path}) == 0);
  const TimingGrid g = load_grid(grid_path);
  CHECK(g.cell_count() == 8 * 8 * 8);

  CHECK(cli::run({"dp", "--in", grid_path, "--out", tables_path,
                  "--impact-json", tmp_path("rugged_cli_impact.json")}) == 0);
  const DpTables t = load_tables(tables_path);
  CHECK(t.cell_count() == g.cell_count());

  CHECK(cli::run({"lookup", "--tables", tables_path, "--m", "384", "--n",
                  "256", "--k", "256"}) == 0);
  CHECK(cli::run({"lookup", "--tables", tables_path, "--m", "9999", "--n",
                  "256", "--k", "256"}) == 2);
}

TEST_CASE("cli outputs are byte-identical across runs") {
  const std::string a = tmp_path("rugged_det_a.json");
  const std::string b = tmp_path("rugged_det_b.json");
  for (const auto& out : {a, b}) {
    CHECK(cli::run({"simulate", "--preset", "bmg-b580-t128", "--step", "256",
                    "--stop", "2048", "--out", out}) == 0);
  }
  CHECK(read_file(a) == read_file(b));

  const std::string pa = tmp_path("rugged_det_plan_a.csv");
  const std::string pb = tmp_path("rugged_det_plan_b.csv");
  for (const auto& out : {pa, pb}) {
    CHECK(cli::run({"sweep-order", "--step", "512", "--stop", "2048", "--seed",
                    "7", "--out", out}) == 0);
  }
  CHECK(read_file(pa) == read_file(pb));
}

TEST_CASE("cli ingest, metrics, decompose, tilepick, attribute, plot") {
  const std::string dir = tmp_path("rugged_cli_flow");
  fs::create_directories(dir);

  const std::string t64 = dir + "/t64.json";
  const std::string t128 = dir + "/t128.json";
  const std::string t256 = dir + "/t256.json";
  for (const auto& [name, path] :
       std::vector<std::pair<std::string, std::string>>{
           {"bmg-b580-t64", t64}, {"bmg-b580-t128", t128}, {"bmg-b580-t256", t256}}) {
    REQUIRE(cli::run({"simulate", "--preset", name, "--step", "256", "--stop",
                      "2048", "--out", path}) == 0);
  }

  CHECK(cli::run({"metrics", "--in", t256, "--out", dir + "/metrics.json",
                  "--slices-csv", dir + "/slices.csv"}) == 0);
  CHECK(fs::exists(dir + "/metrics.json"));
  CHECK(fs::exists(dir + "/slices.csv"));

  CHECK(cli::run({"decompose", "--in", t256, "--preset", "bmg-b580",
                  "--bw-compare", "456,270", "--out", dir + "/surfaces.json",
                  "--stacked-csv", dir + "/stack.csv"}) == 0);
  const std::string surfaces = read_file(dir + "/surfaces.json");
  CHECK(count_substr(surfaces, "compute_bound_fraction") == 2);

  CHECK(cli::run({"tilepick", "--tiles", t64 + "," + t128 + "," + t256,
                  "--out", dir + "/envelope.json", "--winners-csv",
                  dir + "/winners.csv", "--stats-json", dir + "/stats.json"}) == 0);
  const TimingGrid env = load_grid(dir + "/envelope.json");
  const TimingGrid m64 = load_grid(t64);
  for (std::size_t i = 0; i < env.cell_count(); ++i) {
    CHECK(env.times[i] <= m64.times[i]);
  }

  // Round-trip a grid through csv ingestion.
  CHECK(cli::run({"ingest", "--in", (save_grid(env, dir + "/env.csv"),
                                     dir + "/env.csv"),
                  "--out", dir + "/env2.json"}) == 0);
  CHECK(load_grid(dir + "/env2.json").times == env.times);

  CHECK(cli::run({"attribute", "--in", t256, "--axis", "N", "--fixed",
                  "M=2048,K=2048", "--out", dir + "/attr.json"}) == 0);
  CHECK(read_file(dir + "/attr.json").find("mechanisms") != std::string::npos);

  CHECK(cli::run({"plot", "--kind", "surface-heatmap", "--in", t256, "--out",
                  dir + "/heat.svg"}) == 0);
  CHECK(cli::run({"plot", "--kind", "winner-mosaic", "--tiles",
                  t64 + "," + t128 + "," + t256, "--out", dir + "/mosaic.svg"}) == 0);
  CHECK(cli::run({"plot", "--kind", "slice-line", "--in", t256, "--axis", "N",
                  "--fixed", "M=2048,K=2048", "--out", dir + "/line.svg"}) == 0);
  CHECK(cli::run({"plot", "--kind", "stacked-decomposition", "--in", t256,
                  "--preset", "bmg-b580", "--out", dir + "/stack.svg"}) == 0);
  CHECK(read_file(dir + "/mosaic.svg").find("</svg>") != std::string::npos);

  CHECK(cli::run({"plot", "--kind", "bogus", "--in", t256, "--out",
                  dir + "/x.svg"}) == 2);
}

TEST_CASE("cli pipeline runs end to end on a small cube") {
  const std::string dir = tmp_path("rugged_cli_pipeline");
  CHECK(cli::run({"pipeline", "--preset", "bmg-b580", "--step", "256",
                  "--stop", "4096", "--with-ideal", "--out-dir", dir}) == 0);
  for (const char* f :
       {"pipeline_report.json", "dp_tables.bin", "winner_map.csv",
        "stage_progression.svg", "attribution_budget.json",
        "slice_dp-split-pad.csv"}) {
    CHECK(fs::exists(dir + "/" + f));
  }
  const std::string report = read_file(dir + "/pipeline_report.json");
  CHECK(report.find("dp-split-pad") != std::string::npos);

  // Stage slices feed the stage-progression plot subcommand.
  CHECK(cli::run({"plot", "--kind", "stage-progression", "--slices",
                  dir + "/slice_fixed-tile.csv," + dir + "/slice_dynamic-tile.csv," +
                      dir + "/slice_dp-pad.csv," + dir + "/slice_dp-split-pad.csv",
                  "--names", "fixed,dynamic,pad,split-pad", "--out",
                  dir + "/stages.svg"}) == 0);
  CHECK(read_file(dir + "/stages.svg").find("split-pad") != std::string::npos);
}
