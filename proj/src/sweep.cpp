#include "rugged/sweep.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "rugged/metrics.hpp"

namespace rugged {

SweepPlan plan_randomized(const GridAxis& axis_m, const GridAxis& axis_n,
                          const GridAxis& axis_k, std::uint64_t seed,
                          int warmup_count) {
  axis_m.validate("M");
  axis_n.validate("N");
  axis_k.validate("K");
  if (warmup_count < 0) throw domain_error("warmup_count must be >= 0");

  std::vector<std::array<dim_t, 3>> tuples;
  tuples.reserve(static_cast<std::size_t>(axis_m.count) * axis_n.count *
                 axis_k.count);
  for (int im = 0; im < axis_m.count; ++im) {
    for (int in = 0; in < axis_n.count; ++in) {
      for (int ik = 0; ik < axis_k.count; ++ik) {
        tuples.push_back({axis_m.value(im), axis_n.value(in), axis_k.value(ik)});
      }
    }
  }

  splitmix64_engine rng(seed);
  for (std::size_t i = tuples.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next() % (i + 1));
    std::swap(tuples[i], tuples[j]);
  }

  SweepPlan plan;
  plan.seed = seed;
  plan.warmup_count = warmup_count;
  plan.entries.reserve(tuples.size() + warmup_count);
  std::int64_t order = 0;
  for (int w = 0; w < warmup_count; ++w) {
    const auto& t = tuples[static_cast<std::size_t>(w) % tuples.size()];
    plan.entries.push_back({order++, t[0], t[1], t[2], true});
  }
  for (const auto& t : tuples) {
    plan.entries.push_back({order++, t[0], t[1], t[2], false});
  }
  return plan;
}

std::string plan_to_csv(const SweepPlan& plan) {
  std::string out = "order,M,N,K,warmup\n";
  for (const auto& e : plan.entries) {
    out += std::to_string(e.order) + "," + std::to_string(e.m) + "," +
           std::to_string(e.n) + "," + std::to_string(e.k) + "," +
           (e.warmup ? "1" : "0") + "\n";
  }
  return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
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

template <typename T>
T parse_num(const std::string& s, const std::string& ctx) {
  T out;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw io_error("bad field '" + s + "' in " + ctx);
  }
  return out;
}

}  // namespace

SweepLog log_from_csv_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  SweepLog log;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    const std::string ctx = origin + ":" + std::to_string(lineno);
    const auto f = split_fields(line);
    if (!header) {
      if (f.size() < 7 || f[0] != "run_order") {
        throw io_error("bad sweep log header in " + ctx +
                       " (expected run_order,M,N,K,role,mode,time_s[,warmup])");
      }
      header = true;
      continue;
    }
    if (f.size() < 7) throw io_error("expected >= 7 fields in " + ctx);
    SweepRecord r;
    r.run_order = parse_num<std::int64_t>(f[0], ctx);
    r.m = parse_num<dim_t>(f[1], ctx);
    r.n = parse_num<dim_t>(f[2], ctx);
    r.k = parse_num<dim_t>(f[3], ctx);
    r.role = f[4];
    r.mode = f[5];
    r.time_s = parse_num<double>(f[6], ctx);
    if (f.size() >= 8) r.warmup = f[7] == "1";
    if (!(r.time_s > 0.0)) throw io_error("time_s must be > 0 in " + ctx);
    log.records.push_back(std::move(r));
  }
  if (!header) throw io_error("empty sweep log: " + origin);
  return log;
}

SweepLog log_from_csv(const std::string& path) {
  return log_from_csv_text(read_file(path), path);
}

std::string log_to_csv(const SweepLog& log) {
  std::string out = "run_order,M,N,K,role,mode,time_s,warmup\n";
  for (const auto& r : log.records) {
    out += std::to_string(r.run_order) + "," + std::to_string(r.m) + "," +
           std::to_string(r.n) + "," + std::to_string(r.k) + "," + r.role +
           "," + r.mode + "," + format_double(r.time_s) + "," +
           (r.warmup ? "1" : "0") + "\n";
  }
  return out;
}

namespace {

// Average ranks (1-based) with tie midpoints.
std::vector<double> ranks_of(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t x = i; x <= j; ++x) ranks[idx[x]] = r;
    i = j + 1;
  }
  return ranks;
}

double variable_of(const SweepRecord& r, SweepVariable v) {
  switch (v) {
    case SweepVariable::run_order: return static_cast<double>(r.run_order);
    case SweepVariable::m: return static_cast<double>(r.m);
    case SweepVariable::n: return static_cast<double>(r.n);
    default: return static_cast<double>(r.k);
  }
}

}  // namespace

SpearmanResult spearman(const SweepLog& log, SweepVariable variable,
                        const std::string& role) {
  std::vector<double> xs, ys;
  for (const auto& r : log.records) {
    if (r.warmup || r.role != role) continue;
    xs.push_back(variable_of(r, variable));
    ys.push_back(r.time_s);
  }
  if (xs.size() < 10) {
    throw domain_error("spearman: need at least 10 records of role " + role);
  }
  SpearmanResult out;
  out.n = xs.size();
  const auto rx = ranks_of(xs);
  const auto ry = ranks_of(ys);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(rx.size());
  my /= static_cast<double>(ry.size());
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    cov += dx * dy;
    vx += dx * dx;
    vy += dy * dy;
  }
  if (vx == 0.0 || vy == 0.0) {
    return out;  // constant series: correlation undefined
  }
  out.defined = true;
  out.rho = cov / std::sqrt(vx * vy);
  out.z = out.rho * std::sqrt(static_cast<double>(out.n - 1));
  out.significant_p01 = std::abs(out.z) > 2.5758293035489004;  // two-sided 1%
  return out;
}

WarmupDriftReport warmup_drift(const SweepLog& log, SweepVariable block_key,
                               const std::string& role) {
  if (block_key == SweepVariable::run_order) {
    throw domain_error("warmup_drift: block key must be a dimension");
  }
  std::map<dim_t, std::vector<std::pair<std::int64_t, double>>> blocks;
  for (const auto& r : log.records) {
    if (r.warmup || r.role != role) continue;
    const dim_t key = block_key == SweepVariable::m   ? r.m
                      : block_key == SweepVariable::n ? r.n
                                                      : r.k;
    blocks[key].push_back({r.run_order, r.time_s});
  }

  WarmupDriftReport rep;
  struct Edge {
    std::int64_t first_order;
    double first_time, last_time;
  };
  std::vector<Edge> edges;
  double drift_sum = 0.0;
  for (auto& [key, recs] : blocks) {
    std::sort(recs.begin(), recs.end());
    if (recs.size() < 10) {
      rep.skipped_blocks.push_back(key);
      continue;
    }
    std::vector<double> series;
    series.reserve(recs.size());
    for (const auto& [o, t] : recs) series.push_back(t);
    BlockDrift b;
    b.block_value = key;
    b.records = series.size();
    b.drift_pct = metrics::drift_percent(series);
    drift_sum += b.drift_pct;
    rep.blocks.push_back(b);
    edges.push_back({recs.front().first, series.front(), series.back()});
  }
  if (!rep.blocks.empty()) {
    rep.mean_drift_pct = drift_sum / static_cast<double>(rep.blocks.size());
  }

  // Reset detection: consistently signed in-block drift, and the first
  // value of each next block jumps back against that drift direction.
  if (rep.blocks.size() >= 2) {
    std::size_t neg = 0;
    for (const auto& b : rep.blocks) {
      if (b.drift_pct < 0) ++neg;
    }
    const bool downward = neg * 5 >= rep.blocks.size() * 4;
    const bool upward = (rep.blocks.size() - neg) * 5 >= rep.blocks.size() * 4;
    if ((downward || upward) && std::abs(rep.mean_drift_pct) > 1.0) {
      std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.first_order < b.first_order;
      });
      std::size_t opposing = 0;
      for (std::size_t i = 1; i < edges.size(); ++i) {
        const double jump = edges[i].first_time - edges[i - 1].last_time;
        if ((downward && jump > 0) || (upward && jump < 0)) ++opposing;
      }
      rep.reset_at_block_boundaries = opposing * 5 >= (edges.size() - 1) * 4;
    }
  }
  return rep;
}

CoallocationStats coallocation_compare(const SweepLog& isolated,
                                       const SweepLog& coallocated,
                                       const std::string& role) {
  auto collect = [&](const SweepLog& log) {
    std::map<std::tuple<dim_t, dim_t, dim_t>, std::pair<double, std::size_t>> acc;
    for (const auto& r : log.records) {
      if (r.warmup || r.role != role) continue;
      auto& [sum, count] = acc[{r.m, r.n, r.k}];
      sum += r.time_s;
      ++count;
    }
    return acc;
  };
  const auto iso = collect(isolated);
  const auto coa = collect(coallocated);

  std::string missing;
  for (const auto& [cfg, v] : iso) {
    if (!coa.count(cfg)) {
      const auto [m, n, k] = cfg;
      missing += " (" + std::to_string(m) + "," + std::to_string(n) + "," +
                 std::to_string(k) + ") missing in co-allocated";
      if (missing.size() > 256) break;
    }
  }
  for (const auto& [cfg, v] : coa) {
    if (!iso.count(cfg)) {
      const auto [m, n, k] = cfg;
      missing += " (" + std::to_string(m) + "," + std::to_string(n) + "," +
                 std::to_string(k) + ") missing in isolated";
      if (missing.size() > 256) break;
    }
  }
  if (!missing.empty()) {
    throw join_error("coallocation_compare: config mismatch:" + missing);
  }
  if (iso.empty()) {
    throw domain_error("coallocation_compare: no records of role " + role);
  }

  CoallocationStats out;
  out.configs = iso.size();
  double sum = 0.0;
  std::size_t gt20 = 0, gt50 = 0;
  for (const auto& [cfg, v] : iso) {
    const auto& c = coa.at(cfg);
    const double iso_mean = v.first / static_cast<double>(v.second);
    const double coa_mean = c.first / static_cast<double>(c.second);
    const double slowdown = coa_mean / iso_mean;
    out.slowdowns.push_back(slowdown);
    sum += slowdown;
    if (slowdown > 1.2) ++gt20;
    if (slowdown > 1.5) ++gt50;
  }
  out.mean_slowdown = sum / static_cast<double>(out.configs);
  out.frac_above_20pct = static_cast<double>(gt20) / static_cast<double>(out.configs);
  out.frac_above_50pct = static_cast<double>(gt50) / static_cast<double>(out.configs);
  return out;
}

}  // namespace rugged
