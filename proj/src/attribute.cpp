#include "rugged/attribute.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "rugged/metrics.hpp"

namespace rugged {

using nlohmann::json;

std::string context_to_json(const AttributionContext& ctx) {
  json j;
  j["tile_m"] = ctx.tile_m;
  j["tile_n"] = ctx.tile_n;
  j["sg_m"] = ctx.sg_m;
  j["sg_n"] = ctx.sg_n;
  j["cores"] = ctx.cores;
  j["channels"] = ctx.channels;
  return j.dump(2) + "\n";
}

AttributionContext context_from_json(const std::string& text) {
  AttributionContext ctx;
  try {
    const json j = json::parse(text);
    ctx.tile_m = j.value("tile_m", ctx.tile_m);
    ctx.tile_n = j.value("tile_n", ctx.tile_n);
    ctx.sg_m = j.value("sg_m", ctx.sg_m);
    ctx.sg_n = j.value("sg_n", ctx.sg_n);
    ctx.cores = j.value("cores", ctx.cores);
    ctx.channels = j.value("channels", ctx.channels);
  } catch (const json::exception& e) {
    throw io_error(std::string("bad context JSON: ") + e.what());
  }
  if (ctx.tile_m <= 0 || ctx.tile_n <= 0 || ctx.sg_m <= 0 || ctx.sg_n <= 0 ||
      ctx.cores <= 0 || ctx.channels <= 0) {
    throw domain_error("attribution context values must be positive");
  }
  return ctx;
}

namespace {

dim_t ceil_div(dim_t a, dim_t b) { return (a + b - 1) / b; }

std::int64_t wave_count(dim_t m, dim_t n, const AttributionContext& ctx) {
  const std::int64_t w = ceil_div(m, ctx.tile_m) * ceil_div(n, ctx.tile_n);
  return (w + ctx.cores - 1) / ctx.cores;
}

// The N-remainder path reaches 0 within the step or departs from 0 at its
// start; steps that do not move N never cross.
bool crosses_tile_n(const StepTransition& s, const AttributionContext& ctx) {
  if (s.n0 == s.n1) return false;
  const dim_t lo = std::min(s.n0, s.n1);
  const dim_t hi = std::max(s.n0, s.n1);
  return lo % ctx.tile_n == 0 || hi / ctx.tile_n != lo / ctx.tile_n;
}

}  // namespace

std::vector<MechanismPredicate> builtin_predicates() {
  std::vector<MechanismPredicate> preds;

  preds.push_back(
      {"wave-count-change",
       [](const StepTransition& s, const AttributionContext& ctx) {
         return wave_count(s.m0, s.n0, ctx) != wave_count(s.m1, s.n1, ctx);
       }});

  preds.push_back(
      {"tile-remainder-crossing",
       [](const StepTransition& s, const AttributionContext& ctx) {
         return crosses_tile_n(s, ctx);
       }});

  preds.push_back(
      {"subgroup-remainder-crossing",
       [](const StepTransition& s, const AttributionContext& ctx) {
         if (crosses_tile_n(s, ctx)) return false;  // owned by the tile predicate
         const dim_t r0 = s.n0 % ctx.tile_n;
         const dim_t r1 = s.n1 % ctx.tile_n;
         const dim_t g0 = r0 == 0 ? 0 : ceil_div(r0, ctx.sg_n);
         const dim_t g1 = r1 == 0 ? 0 : ceil_div(r1, ctx.sg_n);
         return g0 != g1;
       }});

  return preds;
}

AttributionReport attribute(const Slice1D& slice,
                            const std::vector<MechanismPredicate>& predicates,
                            const AttributionContext& ctx) {
  if (slice.points.size() < 8) {
    throw domain_error("attribute: slice needs at least 8 points");
  }
  if (predicates.empty()) {
    throw domain_error("attribute: need at least one predicate");
  }

  const std::size_t steps = slice.points.size() - 1;
  std::vector<StepTransition> trans(steps);
  std::vector<double> abs_dt(steps);
  std::vector<double> abs_dh(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const auto& p0 = slice.points[i];
    const auto& p1 = slice.points[i + 1];
    StepTransition& t = trans[i];
    t.sweep_axis = slice.sweep_axis;
    switch (slice.sweep_axis) {
      case Axis::M:
        t.m0 = p0.value; t.m1 = p1.value;
        t.n0 = t.n1 = slice.fixed_a;
        t.k0 = t.k1 = slice.fixed_b;
        break;
      case Axis::N:
        t.m0 = t.m1 = slice.fixed_a;
        t.n0 = p0.value; t.n1 = p1.value;
        t.k0 = t.k1 = slice.fixed_b;
        break;
      default:
        t.m0 = t.m1 = slice.fixed_a;
        t.n0 = t.n1 = slice.fixed_b;
        t.k0 = p0.value; t.k1 = p1.value;
        break;
    }
    abs_dt[i] = std::abs(p1.tflops - p0.tflops);
    abs_dh[i] = std::abs(overhead_hash(t.m1, t.n1, t.k1) -
                         overhead_hash(t.m0, t.n0, t.k0));
  }

  AttributionReport rep;
  rep.total_roughness = metrics::roughness(slice.tflops_values());

  auto stratify = [&](const std::string& name,
                      const std::vector<bool>& active) {
    MechanismContribution c;
    c.name = name;
    double sum_a = 0.0, sum_i = 0.0;
    std::size_t na = 0, ni = 0;
    for (std::size_t i = 0; i < steps; ++i) {
      if (active[i]) {
        sum_a += abs_dt[i];
        ++na;
      } else {
        sum_i += abs_dt[i];
        ++ni;
      }
    }
    if (na == 0 || ni == 0) {
      c.defined = false;
      c.degenerate_reason = na == 0 ? "no active steps" : "no inactive steps";
      c.active_fraction = static_cast<double>(na) / static_cast<double>(steps);
      return c;
    }
    c.active_fraction = static_cast<double>(na) / static_cast<double>(steps);
    c.mean_abs_dt_active = sum_a / static_cast<double>(na);
    c.mean_abs_dt_inactive = sum_i / static_cast<double>(ni);
    c.contribution = c.active_fraction *
                     std::max(0.0, c.mean_abs_dt_active - c.mean_abs_dt_inactive);
    return c;
  };

  for (const auto& pred : predicates) {
    std::vector<bool> active(steps);
    for (std::size_t i = 0; i < steps; ++i) active[i] = pred.active(trans[i], ctx);
    rep.mechanisms.push_back(stratify(pred.name, active));
  }

  // Overhead-hash-swing: active on the top decile of |dh| over this slice.
  {
    std::vector<double> sorted = abs_dh;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n_active = std::max<std::size_t>(1, steps / 10);
    const double threshold = sorted[steps - n_active];
    std::vector<bool> active(steps);
    // >= threshold marks at least n_active; exact ties may mark a few more.
    for (std::size_t i = 0; i < steps; ++i) {
      active[i] = abs_dh[i] >= threshold;
    }
    rep.mechanisms.push_back(stratify("overhead-hash-swing", active));
  }

  double sum_contrib = 0.0;
  for (const auto& m : rep.mechanisms) {
    if (m.defined) sum_contrib += m.contribution;
  }
  rep.residual = rep.total_roughness - sum_contrib;
  return rep;
}

std::string report_to_json(const AttributionReport& r) {
  json j;
  j["total_roughness"] = r.total_roughness;
  json arr = json::array();
  for (const auto& m : r.mechanisms) {
    json e;
    e["name"] = m.name;
    e["active_fraction"] = m.active_fraction;
    if (m.defined) {
      e["mean_abs_dt_active"] = m.mean_abs_dt_active;
      e["mean_abs_dt_inactive"] = m.mean_abs_dt_inactive;
      e["contribution"] = m.contribution;
    } else {
      e["contribution"] = nullptr;
      e["degenerate"] = m.degenerate_reason;
    }
    arr.push_back(e);
  }
  j["mechanisms"] = arr;
  j["residual"] = r.residual;
  return j.dump(2) + "\n";
}

BudgetTable budget_table(const std::vector<StageSlice>& stages,
                         const std::vector<MechanismPredicate>& predicates,
                         const AttributionContext& ctx) {
  if (stages.size() < 2) {
    throw domain_error("budget_table: need at least 2 stages");
  }
  for (std::size_t i = 1; i < stages.size(); ++i) {
    const auto& a = stages[0].slice;
    const auto& b = stages[i].slice;
    if (a.sweep_axis != b.sweep_axis || a.step != b.step ||
        a.points.size() != b.points.size()) {
      throw shape_error("budget_table: stage " + stages[i].name +
                        " has a different slice geometry");
    }
  }

  BudgetTable t;
  std::vector<double> rough(stages.size());
  for (std::size_t i = 0; i < stages.size(); ++i) {
    rough[i] = metrics::roughness(stages[i].slice.tflops_values());
  }
  t.initial_roughness = rough.front();
  t.final_roughness = rough.back();
  for (std::size_t i = 1; i < stages.size(); ++i) {
    BudgetRow row;
    row.source = stages[i - 1].name + " -> " + stages[i].name;
    row.amount = rough[i - 1] - rough[i];
    row.removed_by = stages[i].name;
    t.software_removed.push_back(row);
  }
  t.hardware_bound = attribute(stages.back().slice, predicates, ctx);
  return t;
}

std::string budget_to_json(const BudgetTable& t) {
  json j;
  j["initial_roughness"] = t.initial_roughness;
  j["final_roughness"] = t.final_roughness;
  json rows = json::array();
  for (const auto& r : t.software_removed) {
    rows.push_back({{"source", r.source},
                    {"amount_tflops_per_step", r.amount},
                    {"removed_by", r.removed_by}});
  }
  j["software_removed"] = rows;
  json hb;
  hb["total"] = t.hardware_bound.total_roughness;
  json mechs = json::array();
  for (const auto& m : t.hardware_bound.mechanisms) {
    mechs.push_back({{"name", m.name},
                     {"contribution", m.defined ? json(m.contribution) : json()},
                     {"active_fraction", m.active_fraction}});
  }
  hb["mechanisms"] = mechs;
  hb["residual"] = t.hardware_bound.residual;
  j["hardware_bound"] = hb;
  return j.dump(2) + "\n";
}

}  // namespace rugged
