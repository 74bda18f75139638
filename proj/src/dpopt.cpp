#include "rugged/dpopt.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include <json.hpp>

#include "rugged/kernels.hpp"
#include "rugged/metrics.hpp"

namespace rugged {

using nlohmann::json;

namespace {

struct LatticeView {
  GridAxis am, an, ak;
  int nc, kc;
  std::size_t index(int im, int in, int ik) const {
    return (static_cast<std::size_t>(im) * nc + in) * kc + ik;
  }
};

}  // namespace

std::vector<double> compute_t1(const GridAxis& am, const GridAxis& an,
                               const GridAxis& ak,
                               const std::vector<double>& t0,
                               std::vector<std::int32_t>* targets) {
  const int mc = am.count, nc = an.count, kc = ak.count;
  const LatticeView L{am, an, ak, nc, kc};
  if (t0.size() != static_cast<std::size_t>(mc) * nc * kc) {
    throw shape_error("compute_t1: table size does not match lattice");
  }
  std::vector<double> t1(t0.size());
  if (targets) targets->assign(t0.size(), 0);
  std::vector<double> pre(kc);

  for (int im = mc - 1; im >= 0; --im) {
    for (int in = nc - 1; in >= 0; --in) {
      const double* base = t0.data() + L.index(im, in, 0);
      const double* rm = im + 1 < mc ? t1.data() + L.index(im + 1, in, 0) : nullptr;
      const double* rn = in + 1 < nc ? t1.data() + L.index(im, in + 1, 0) : nullptr;
      const double* rmn =
          (im + 1 < mc && in + 1 < nc) ? t1.data() + L.index(im + 1, in + 1, 0) : nullptr;
      kernels::row_neighbor_min(pre.data(), base, rm, rn, rmn, kc);

      double* row = t1.data() + L.index(im, in, 0);
      row[kc - 1] = pre[kc - 1];
      for (int ik = kc - 2; ik >= 0; --ik) {
        row[ik] = std::min(pre[ik], row[ik + 1]);
      }

      if (!targets) continue;
      // Recover the chosen neighbor per cell. Candidates in tie-break
      // order: as-is first, then single-axis pads (K, N, M), then
      // two-axis, then the full diagonal; the target index is inherited
      // from the winning neighbor.
      for (int ik = kc - 1; ik >= 0; --ik) {
        const std::size_t c = L.index(im, in, ik);
        const double v = t1[c];
        std::int32_t tgt;
        if (t0[c] == v) {
          tgt = static_cast<std::int32_t>(c);
        } else if (ik + 1 < kc && t1[c + 1] == v) {
          tgt = (*targets)[c + 1];
        } else if (rn && rn[ik] == v) {
          tgt = (*targets)[L.index(im, in + 1, ik)];
        } else if (rm && rm[ik] == v) {
          tgt = (*targets)[L.index(im + 1, in, ik)];
        } else if (rn && ik + 1 < kc && rn[ik + 1] == v) {
          tgt = (*targets)[L.index(im, in + 1, ik + 1)];
        } else if (rm && ik + 1 < kc && rm[ik + 1] == v) {
          tgt = (*targets)[L.index(im + 1, in, ik + 1)];
        } else if (rmn && rmn[ik] == v) {
          tgt = (*targets)[L.index(im + 1, in + 1, ik)];
        } else if (rmn && ik + 1 < kc && rmn[ik + 1] == v) {
          tgt = (*targets)[L.index(im + 1, in + 1, ik + 1)];
        } else {
          throw invariant_error("compute_t1: minimum not among candidates");
        }
        (*targets)[c] = tgt;
      }
    }
  }
  return t1;
}

namespace {

struct AxisSplitInfo {
  bool possible = false;  // start divisible by step, so sums stay on-lattice
  int s0 = 0;             // start / step
};

AxisSplitInfo axis_split_info(const GridAxis& ax) {
  AxisSplitInfo info;
  if (ax.start % ax.step == 0) {
    info.possible = true;
    info.s0 = static_cast<int>(ax.start / ax.step);
  }
  return info;
}

}  // namespace

void compute_t2(const GridAxis& am, const GridAxis& an, const GridAxis& ak,
                const std::vector<double>& t1, double split_overhead_s,
                std::vector<double>* t2, std::vector<T2Kind>* kind,
                std::vector<std::int32_t>* split_left) {
  const int mc = am.count, nc = an.count, kc = ak.count;
  const LatticeView L{am, an, ak, nc, kc};
  if (split_overhead_s < 0) {
    throw domain_error("compute_t2: split overhead must be >= 0");
  }
  *t2 = t1;
  kind->assign(t1.size(), T2Kind::pad_or_asis);
  split_left->assign(t1.size(), -1);

  const AxisSplitInfo sm = axis_split_info(am);
  const AxisSplitInfo sn = axis_split_info(an);
  const AxisSplitInfo sk = axis_split_info(ak);
  std::vector<double> line(std::max({mc, nc, kc}));

  for (int im = 0; im < mc; ++im) {
    for (int in = 0; in < nc; ++in) {
      for (int ik = 0; ik < kc; ++ik) {
        const std::size_t c = L.index(im, in, ik);
        double& cur = (*t2)[c];

        // Axis order fixes the tie-break: split-K, then N, then M can only
        // displace an earlier decision with a strictly smaller cost.
        if (sk.possible) {
          const int sum = ik - sk.s0;
          const int a_lo = std::max(0, sum - (kc - 1));
          const int a_hi = sum / 2;
          if (sum >= 0 && a_lo <= a_hi) {
            const double* kline = t2->data() + L.index(im, in, 0);
            const auto best = kernels::split_scan(kline, a_lo, a_hi, sum);
            const double cost = best.value + split_overhead_s;
            if (cost < cur) {
              cur = cost;
              (*kind)[c] = T2Kind::split_k;
              (*split_left)[c] = best.index;
            }
          }
        }
        if (sn.possible) {
          const int sum = in - sn.s0;
          const int a_lo = std::max(0, sum - (nc - 1));
          const int a_hi = sum / 2;
          if (sum >= 0 && a_lo <= a_hi) {
            for (int a = a_lo; a <= sum - a_lo; ++a) {
              line[a] = (*t2)[L.index(im, a, ik)];
            }
            const auto best = kernels::split_scan(line.data(), a_lo, a_hi, sum);
            const double cost = best.value + split_overhead_s;
            if (cost < cur) {
              cur = cost;
              (*kind)[c] = T2Kind::split_n;
              (*split_left)[c] = best.index;
            }
          }
        }
        if (sm.possible) {
          const int sum = im - sm.s0;
          const int a_lo = std::max(0, sum - (mc - 1));
          const int a_hi = sum / 2;
          if (sum >= 0 && a_lo <= a_hi) {
            for (int a = a_lo; a <= sum - a_lo; ++a) {
              line[a] = (*t2)[L.index(a, in, ik)];
            }
            const auto best = kernels::split_scan(line.data(), a_lo, a_hi, sum);
            const double cost = best.value + split_overhead_s;
            if (cost < cur) {
              cur = cost;
              (*kind)[c] = T2Kind::split_m;
              (*split_left)[c] = best.index;
            }
          }
        }
      }
    }
  }
}

DpTables dp_build(const TimingGrid& t0, double split_overhead_s, bool fixpoint) {
  t0.validate();
  DpTables t;
  t.axis_m = t0.axis_m;
  t.axis_n = t0.axis_n;
  t.axis_k = t0.axis_k;
  t.t0 = t0.times;
  t.split_overhead_s = split_overhead_s;
  t.fixpoint = fixpoint;

  t.t1 = compute_t1(t.axis_m, t.axis_n, t.axis_k, t.t0, &t.t1_target);
  compute_t2(t.axis_m, t.axis_n, t.axis_k, t.t1, split_overhead_s, &t.t2,
             &t.t2_kind, &t.t2_split_left);

  if (fixpoint) {
    // Experimental: iterate pad + split passes on the values until the
    // table stops changing. At the fixpoint t2 is monotone along every
    // axis. Plans for fixpoint tables are reconstructed by witness search
    // (see build_plan_node_fixpoint); the literal tags above stay valid
    // only for the un-iterated tables, so they are not updated here.
    int iter = 0;
    for (;; ++iter) {
      if (iter > 10000) {
        throw invariant_error("dp fixpoint did not converge");
      }
      std::vector<double> relaxed =
          compute_t1(t.axis_m, t.axis_n, t.axis_k, t.t2, nullptr);
      std::vector<double> next;
      std::vector<T2Kind> kind;
      std::vector<std::int32_t> left;
      compute_t2(t.axis_m, t.axis_n, t.axis_k, relaxed, split_overhead_s,
                 &next, &kind, &left);
      const bool converged = next == t.t2;
      t.t2 = std::move(next);
      if (converged) break;
    }
  }
  return t;
}

namespace {

void cell_coords(const DpTables& t, std::size_t c, int* im, int* in, int* ik) {
  const int kc = t.axis_k.count, nc = t.axis_n.count;
  *ik = static_cast<int>(c % kc);
  *in = static_cast<int>((c / kc) % nc);
  *im = static_cast<int>(c / (static_cast<std::size_t>(kc) * nc));
}

std::unique_ptr<ExecutionPlan::Node> leaf_at(const DpTables& t,
                                             std::size_t cell) {
  int tm, tn, tk;
  cell_coords(t, cell, &tm, &tn, &tk);
  auto node = std::make_unique<ExecutionPlan::Node>();
  node->is_leaf = true;
  node->run_m = t.axis_m.value(tm);
  node->run_n = t.axis_n.value(tn);
  node->run_k = t.axis_k.value(tk);
  return node;
}

std::unique_ptr<ExecutionPlan::Node> make_split_node(
    const DpTables& t, Axis axis, int left_idx, int right_idx,
    std::unique_ptr<ExecutionPlan::Node> l,
    std::unique_ptr<ExecutionPlan::Node> r) {
  auto node = std::make_unique<ExecutionPlan::Node>();
  node->is_leaf = false;
  node->split_axis = axis;
  node->left_value = t.axis(axis).value(left_idx);
  node->right_value = t.axis(axis).value(right_idx);
  node->beta_accumulate = axis == Axis::K;
  node->left = std::move(l);
  node->right = std::move(r);
  return node;
}

// Fixpoint tables carry no tags consistent with the iterated values, so a
// plan is recovered by searching for an exact witness of t2[c]: a t0 leaf,
// a binary split whose parts sum to it, or an equal-valued +1 neighbor
// (the value is monotone at the fixpoint, so such a chain always reaches a
// split or leaf witness).
std::unique_ptr<ExecutionPlan::Node> build_plan_node_fixpoint(
    const DpTables& t, std::size_t c, int depth);

std::unique_ptr<ExecutionPlan::Node> build_plan_node(const DpTables& t,
                                                     std::size_t c,
                                                     int depth) {
  if (depth > 4096) {
    throw invariant_error("plan reconstruction exceeded depth bound");
  }
  if (t.fixpoint) return build_plan_node_fixpoint(t, c, depth);
  int im, in, ik;
  cell_coords(t, c, &im, &in, &ik);
  const T2Kind kind = t.t2_kind[c];
  if (kind == T2Kind::pad_or_asis) {
    return leaf_at(t, static_cast<std::size_t>(t.t1_target[c]));
  }

  auto node = std::make_unique<ExecutionPlan::Node>();
  node->is_leaf = false;
  const int left = t.t2_split_left[c];
  std::size_t lc, rc;
  switch (kind) {
    case T2Kind::split_m: {
      const auto info = t.axis_m.start / t.axis_m.step;
      const int sum = im - static_cast<int>(info);
      node->split_axis = Axis::M;
      node->left_value = t.axis_m.value(left);
      node->right_value = t.axis_m.value(sum - left);
      lc = t.index(left, in, ik);
      rc = t.index(sum - left, in, ik);
      break;
    }
    case T2Kind::split_n: {
      const auto info = t.axis_n.start / t.axis_n.step;
      const int sum = in - static_cast<int>(info);
      node->split_axis = Axis::N;
      node->left_value = t.axis_n.value(left);
      node->right_value = t.axis_n.value(sum - left);
      lc = t.index(im, left, ik);
      rc = t.index(im, sum - left, ik);
      break;
    }
    default: {
      const auto info = t.axis_k.start / t.axis_k.step;
      const int sum = ik - static_cast<int>(info);
      node->split_axis = Axis::K;
      node->left_value = t.axis_k.value(left);
      node->right_value = t.axis_k.value(sum - left);
      node->beta_accumulate = true;
      lc = t.index(im, in, left);
      rc = t.index(im, in, sum - left);
      break;
    }
  }
  node->left = build_plan_node(t, lc, depth + 1);
  node->right = build_plan_node(t, rc, depth + 1);
  return node;
}

std::unique_ptr<ExecutionPlan::Node> build_plan_node_fixpoint(
    const DpTables& t, std::size_t c, int depth) {
  if (depth > 4096) {
    throw invariant_error("fixpoint plan reconstruction exceeded depth bound");
  }
  const double v = t.t2[c];
  if (t.t0[c] == v) return leaf_at(t, c);

  int im, in, ik;
  cell_coords(t, c, &im, &in, &ik);
  const int idx3[3] = {im, in, ik};
  for (Axis axis : {Axis::K, Axis::N, Axis::M}) {
    const GridAxis& ax = t.axis(axis);
    if (ax.start % ax.step != 0) continue;
    const int i = idx3[static_cast<int>(axis)];
    const int sum = i - static_cast<int>(ax.start / ax.step);
    if (sum < 0) continue;
    const int a_lo = std::max(0, sum - (ax.count - 1));
    for (int a = a_lo; a <= sum / 2; ++a) {
      std::size_t lc, rc;
      switch (axis) {
        case Axis::M: lc = t.index(a, in, ik); rc = t.index(sum - a, in, ik); break;
        case Axis::N: lc = t.index(im, a, ik); rc = t.index(im, sum - a, ik); break;
        default: lc = t.index(im, in, a); rc = t.index(im, in, sum - a); break;
      }
      if ((t.t2[lc] + t.t2[rc]) + t.split_overhead_s == v) {
        return make_split_node(t, axis, a, sum - a,
                               build_plan_node_fixpoint(t, lc, depth + 1),
                               build_plan_node_fixpoint(t, rc, depth + 1));
      }
    }
  }
  // Equal-valued pad step toward the witness.
  const int up[3][3] = {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
  for (const auto& d : up) {
    const int jm = im + d[0], jn = in + d[1], jk = ik + d[2];
    if (jm >= t.axis_m.count || jn >= t.axis_n.count || jk >= t.axis_k.count) {
      continue;
    }
    const std::size_t nb = t.index(jm, jn, jk);
    if (t.t2[nb] == v) return build_plan_node_fixpoint(t, nb, depth + 1);
  }
  throw invariant_error("fixpoint plan: no exact witness found");
}

double eval_node(const DpTables& t, const ExecutionPlan::Node& node) {
  if (node.is_leaf) {
    const int im = t.axis_m.index_of(node.run_m);
    const int in = t.axis_n.index_of(node.run_n);
    const int ik = t.axis_k.index_of(node.run_k);
    if (im < 0 || in < 0 || ik < 0) {
      throw invariant_error("plan leaf off-lattice");
    }
    return t.t0[t.index(im, in, ik)];
  }
  return (eval_node(t, *node.left) + eval_node(t, *node.right)) +
         t.split_overhead_s;
}

std::size_t count_leaves(const ExecutionPlan::Node& node) {
  if (node.is_leaf) return 1;
  return count_leaves(*node.left) + count_leaves(*node.right);
}

int ceil_index(const GridAxis& ax, dim_t v, bool* rounded) {
  const int exact = ax.index_of(v);
  if (exact >= 0) return exact;
  if (v > ax.max_value()) return -1;
  *rounded = true;
  if (v < ax.start) return 0;
  const dim_t up = (v - ax.start + ax.step - 1) / ax.step;
  return static_cast<int>(up);
}

}  // namespace

std::size_t ExecutionPlan::leaf_count() const {
  return root ? count_leaves(*root) : 0;
}

LookupResult lookup(const DpTables& t, dim_t m, dim_t n, dim_t k) {
  if (m <= 0 || n <= 0 || k <= 0) {
    throw domain_error("lookup: dimensions must be positive");
  }
  LookupResult out;
  const int im = ceil_index(t.axis_m, m, &out.off_lattice);
  const int in = ceil_index(t.axis_n, n, &out.off_lattice);
  const int ik = ceil_index(t.axis_k, k, &out.off_lattice);
  if (im < 0 || in < 0 || ik < 0) {
    throw lookup_error("lookup: query exceeds lattice max");
  }
  out.used_m = t.axis_m.value(im);
  out.used_n = t.axis_n.value(in);
  out.used_k = t.axis_k.value(ik);
  const std::size_t c = t.index(im, in, ik);
  out.predicted_s = t.t2[c];
  out.plan.root = build_plan_node(t, c, 0);
  return out;
}

double evaluate_plan(const DpTables& t, const ExecutionPlan& plan) {
  if (!plan.root) throw domain_error("evaluate_plan: empty plan");
  return eval_node(t, *plan.root);
}

namespace {

json plan_node_to_json(const ExecutionPlan::Node& node) {
  if (node.is_leaf) {
    return json{{"run", {node.run_m, node.run_n, node.run_k}}};
  }
  json j;
  j["split"] = {{"axis", axis_name(node.split_axis)},
                {"at", node.left_value},
                {"left", plan_node_to_json(*node.left)},
                {"right", plan_node_to_json(*node.right)}};
  if (node.beta_accumulate) j["split"]["beta_accumulate"] = true;
  return j;
}

}  // namespace

std::string plan_to_json(const ExecutionPlan& plan) {
  if (!plan.root) return "null\n";
  return plan_node_to_json(*plan.root).dump(2) + "\n";
}

ActionDistribution action_distribution(const DpTables& t,
                                       std::optional<dim_t> fixed_m,
                                       std::optional<dim_t> fixed_n,
                                       std::optional<dim_t> fixed_k) {
  ActionDistribution d;
  std::size_t counts[4] = {0, 0, 0, 0};
  for (int im = 0; im < t.axis_m.count; ++im) {
    if (fixed_m && t.axis_m.value(im) != *fixed_m) continue;
    for (int in = 0; in < t.axis_n.count; ++in) {
      if (fixed_n && t.axis_n.value(in) != *fixed_n) continue;
      for (int ik = 0; ik < t.axis_k.count; ++ik) {
        if (fixed_k && t.axis_k.value(ik) != *fixed_k) continue;
        ++counts[static_cast<int>(t.t2_kind[t.index(im, in, ik)])];
        ++d.total;
      }
    }
  }
  if (d.total == 0) throw domain_error("action_distribution: empty filter");
  const double n = static_cast<double>(d.total);
  d.pad_or_asis = counts[0] / n;
  d.split_m = counts[1] / n;
  d.split_n = counts[2] / n;
  d.split_k = counts[3] / n;
  return d;
}

namespace {

double canonical_roughness_of(const DpTables& t, const std::vector<double>& tbl) {
  if (t.axis_n.count < 2) return 0.0;
  const int im = t.axis_m.count - 1;
  const int ik = t.axis_k.count - 1;
  std::vector<double> tf(t.axis_n.count);
  const dim_t m = t.axis_m.max_value();
  const dim_t k = t.axis_k.max_value();
  for (int in = 0; in < t.axis_n.count; ++in) {
    tf[in] = tflops_of(m, t.axis_n.value(in), k, tbl[t.index(im, in, ik)]);
  }
  return metrics::roughness(tf);
}

}  // namespace

DpImpact dp_impact_report(const DpTables& t) {
  DpImpact r;
  const std::size_t n = t.cell_count();
  double sum0 = 0.0, sum1 = 0.0, sum2 = 0.0;
  double max1 = 0.0, max2 = 0.0;
  std::size_t imp10_1 = 0, imp20_1 = 0, imp10_2 = 0, imp20_2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sum0 += t.t0[i];
    sum1 += t.t1[i];
    sum2 += t.t2[i];
    const double r1 = 1.0 - t.t1[i] / t.t0[i];
    const double r2 = 1.0 - t.t2[i] / t.t0[i];
    max1 = std::max(max1, r1);
    max2 = std::max(max2, r2);
    if (r1 > 0.10) ++imp10_1;
    if (r1 > 0.20) ++imp20_1;
    if (r2 > 0.10) ++imp10_2;
    if (r2 > 0.20) ++imp20_2;
  }
  r.mean_time_reduction_t1_pct = (1.0 - sum1 / sum0) * 100.0;
  r.mean_time_reduction_t2_pct = (1.0 - sum2 / sum0) * 100.0;
  r.max_time_reduction_t1_pct = max1 * 100.0;
  r.max_time_reduction_t2_pct = max2 * 100.0;
  r.configs_improved_10_t1_pct = 100.0 * imp10_1 / n;
  r.configs_improved_20_t1_pct = 100.0 * imp20_1 / n;
  r.configs_improved_10_t2_pct = 100.0 * imp10_2 / n;
  r.configs_improved_20_t2_pct = 100.0 * imp20_2 / n;

  r.canonical_roughness_t0 = canonical_roughness_of(t, t.t0);
  r.canonical_roughness_t1 = canonical_roughness_of(t, t.t1);
  r.canonical_roughness_t2 = canonical_roughness_of(t, t.t2);
  if (r.canonical_roughness_t0 > 0) {
    r.roughness_reduction_t1_pct =
        (1.0 - r.canonical_roughness_t1 / r.canonical_roughness_t0) * 100.0;
    r.roughness_reduction_t2_pct =
        (1.0 - r.canonical_roughness_t2 / r.canonical_roughness_t0) * 100.0;
  }
  return r;
}

std::string impact_to_json(const DpImpact& r) {
  json j;
  j["mean_time_reduction_pct"] = {{"t1", r.mean_time_reduction_t1_pct},
                                  {"t2", r.mean_time_reduction_t2_pct}};
  j["max_time_reduction_pct"] = {{"t1", r.max_time_reduction_t1_pct},
                                 {"t2", r.max_time_reduction_t2_pct}};
  j["configs_improved_gt10_pct"] = {{"t1", r.configs_improved_10_t1_pct},
                                    {"t2", r.configs_improved_10_t2_pct}};
  j["configs_improved_gt20_pct"] = {{"t1", r.configs_improved_20_t1_pct},
                                    {"t2", r.configs_improved_20_t2_pct}};
  j["canonical_roughness"] = {{"t0", r.canonical_roughness_t0},
                              {"t1", r.canonical_roughness_t1},
                              {"t2", r.canonical_roughness_t2}};
  j["canonical_roughness_reduction_pct"] = {{"t1", r.roughness_reduction_t1_pct},
                                            {"t2", r.roughness_reduction_t2_pct}};
  return j.dump(2) + "\n";
}

namespace {

constexpr char kMagic[8] = {'R', 'G', 'D', 'P', 'T', 'B', 'L', '1'};

template <typename T>
void put_raw(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void put_vec(std::string& out, const std::vector<T>& v) {
  const std::uint64_t n = v.size();
  put_raw(out, n);
  out.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
}

class RawReader {
 public:
  explicit RawReader(const std::string& buf) : buf_(buf) {}
  template <typename T>
  T get() {
    T v;
    need(sizeof(T));
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  template <typename T>
  std::vector<T> get_vec() {
    const auto n = get<std::uint64_t>();
    need(n * sizeof(T));
    std::vector<T> v(n);
    std::memcpy(v.data(), buf_.data() + pos_, n * sizeof(T));
    pos_ += n * sizeof(T);
    return v;
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw io_error("truncated dp table bundle");
  }
  const std::string& buf_;
  std::size_t pos_ = 0;
};

void put_axis(std::string& out, const GridAxis& ax) {
  put_raw(out, ax.start);
  put_raw(out, ax.step);
  put_raw(out, static_cast<std::int64_t>(ax.count));
}

GridAxis get_axis(RawReader& r) {
  GridAxis ax;
  ax.start = r.get<dim_t>();
  ax.step = r.get<dim_t>();
  ax.count = static_cast<int>(r.get<std::int64_t>());
  return ax;
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() &&
         s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

}  // namespace

void save_tables(const DpTables& t, const std::string& path) {
  if (ends_with(path, ".bin")) {
    std::string out;
    out.append(kMagic, sizeof(kMagic));
    put_axis(out, t.axis_m);
    put_axis(out, t.axis_n);
    put_axis(out, t.axis_k);
    put_raw(out, t.split_overhead_s);
    put_raw(out, static_cast<std::uint8_t>(t.fixpoint ? 1 : 0));
    put_vec(out, t.t0);
    put_vec(out, t.t1);
    put_vec(out, t.t2);
    put_vec(out, t.t1_target);
    std::vector<std::uint8_t> kinds(t.t2_kind.size());
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      kinds[i] = static_cast<std::uint8_t>(t.t2_kind[i]);
    }
    put_vec(out, kinds);
    put_vec(out, t.t2_split_left);
    atomic_write_file(path, out);
    return;
  }
  json j;
  j["axes"] = {{"m", {{"start", t.axis_m.start}, {"step", t.axis_m.step}, {"count", t.axis_m.count}}},
               {"n", {{"start", t.axis_n.start}, {"step", t.axis_n.step}, {"count", t.axis_n.count}}},
               {"k", {{"start", t.axis_k.start}, {"step", t.axis_k.step}, {"count", t.axis_k.count}}}};
  j["split_overhead_s"] = t.split_overhead_s;
  j["fixpoint"] = t.fixpoint;
  j["t0"] = t.t0;
  j["t1"] = t.t1;
  j["t2"] = t.t2;
  j["t1_target"] = t.t1_target;
  std::vector<int> kinds(t.t2_kind.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) kinds[i] = static_cast<int>(t.t2_kind[i]);
  j["t2_kind"] = kinds;
  j["t2_split_left"] = t.t2_split_left;
  atomic_write_file(path, j.dump(2) + "\n");
}

DpTables load_tables(const std::string& path) {
  const std::string buf = read_file(path);
  DpTables t;
  if (buf.size() >= sizeof(kMagic) &&
      std::memcmp(buf.data(), kMagic, sizeof(kMagic)) == 0) {
    RawReader r(buf);
    for (std::size_t i = 0; i < sizeof(kMagic); ++i) r.get<char>();
    t.axis_m = get_axis(r);
    t.axis_n = get_axis(r);
    t.axis_k = get_axis(r);
    t.split_overhead_s = r.get<double>();
    t.fixpoint = r.get<std::uint8_t>() != 0;
    t.t0 = r.get_vec<double>();
    t.t1 = r.get_vec<double>();
    t.t2 = r.get_vec<double>();
    t.t1_target = r.get_vec<std::int32_t>();
    const auto kinds = r.get_vec<std::uint8_t>();
    t.t2_kind.resize(kinds.size());
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      t.t2_kind[i] = static_cast<T2Kind>(kinds[i]);
    }
    t.t2_split_left = r.get_vec<std::int32_t>();
  } else {
    json j;
    try {
      j = json::parse(buf);
      t.axis_m = {j["axes"]["m"]["start"].get<dim_t>(), j["axes"]["m"]["step"].get<dim_t>(), j["axes"]["m"]["count"].get<int>()};
      t.axis_n = {j["axes"]["n"]["start"].get<dim_t>(), j["axes"]["n"]["step"].get<dim_t>(), j["axes"]["n"]["count"].get<int>()};
      t.axis_k = {j["axes"]["k"]["start"].get<dim_t>(), j["axes"]["k"]["step"].get<dim_t>(), j["axes"]["k"]["count"].get<int>()};
      t.split_overhead_s = j["split_overhead_s"].get<double>();
      t.fixpoint = j.value("fixpoint", false);
      t.t0 = j["t0"].get<std::vector<double>>();
      t.t1 = j["t1"].get<std::vector<double>>();
      t.t2 = j["t2"].get<std::vector<double>>();
      t.t1_target = j["t1_target"].get<std::vector<std::int32_t>>();
      const auto kinds = j["t2_kind"].get<std::vector<int>>();
      t.t2_kind.resize(kinds.size());
      for (std::size_t i = 0; i < kinds.size(); ++i) {
        t.t2_kind[i] = static_cast<T2Kind>(kinds[i]);
      }
      t.t2_split_left = j["t2_split_left"].get<std::vector<std::int32_t>>();
    } catch (const json::exception& e) {
      throw io_error(std::string("bad dp table bundle: ") + e.what());
    }
  }
  const std::size_t cells = static_cast<std::size_t>(t.axis_m.count) *
                            t.axis_n.count * t.axis_k.count;
  if (t.t0.size() != cells || t.t1.size() != cells || t.t2.size() != cells ||
      t.t1_target.size() != cells || t.t2_kind.size() != cells ||
      t.t2_split_left.size() != cells) {
    throw io_error("dp table bundle: table sizes do not match lattice");
  }
  return t;
}

}  // namespace rugged
