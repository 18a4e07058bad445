// Acceptance suite: runs every benchmark-level claim this project makes at
// pinned tolerances and prints one PASS/FAIL line per criterion. Exit
// status is the number of failed criteria.
//
// The statistical criteria run full 10,000-spike streams over 16 seeds per
// cell with the shipped defaults; expect a few minutes of wall time.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "ndsort/dendrite.hpp"
#include "ndsort/experiments.hpp"
#include "ndsort/kmeans.hpp"
#include "ndsort/metrics.hpp"
#include "ndsort/rng.hpp"
#include "ndsort/synth.hpp"
#include "../brute_force.hpp"

namespace {

using namespace ndsort;

int g_failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("[%s] %-3s %s\n", pass ? "PASS" : "FAIL", id.c_str(),
              detail.c_str());
  std::fflush(stdout);
  g_failures += !pass;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

using CellKey = std::pair<int, double>;  // (neurons, dev)
using CellMeans = std::map<CellKey, double>;

CellMeans accuracy_means(const ScenarioResult& result,
                         const std::string& metric = "accuracy") {
  CellMeans means;
  for (const SummaryRow& r : summarize(result)) {
    if (r.metric == metric && r.window < 0) {
      means[{r.neurons, r.dev}] = r.mean;
    }
  }
  return means;
}

ExperimentSpec spec_for(const std::string& scenario, int threads,
                        std::vector<double> devs = {}) {
  ExperimentSpec spec;
  spec.scenario = scenario;
  spec.instance_devs = std::move(devs);
  spec.threads = threads;
  return spec;
}

std::vector<double> small_devs() {
  return {1.0 / 16, 2.0 / 16, 3.0 / 16, 4.0 / 16};
}

// ---- exact checks -------------------------------------------------------

void criterion_1_and_2() {
  const auto checks = run_oracle_checks();
  const auto find = [&](const char* name) {
    for (const OracleCheck& c : checks) {
      if (c.name == name) return c;
    }
    return OracleCheck{};
  };
  const OracleCheck sort = find("reference-table-sort-accuracy");
  report("C1", sort.pass && sort.elapsed_seconds < 1.0,
         "reference-table assignment mass 4120/5000: accuracy = " +
             fmt(sort.value) + " (expect 0.824), " +
             fmt(sort.elapsed_seconds * 1e3) + " ms");
  const OracleCheck pur = find("reference-table-purity");
  report("C2", pur.pass && pur.elapsed_seconds < 1.0,
         "reference-table purity = " + fmt(pur.value) +
             " (expect 0.9322), " + fmt(pur.elapsed_seconds * 1e3) + " ms");
}

void criterion_3(int threads) {
  DendriteConfig cfg;
  cfg.templates = 8;
  cfg.features = 6;
  cfg.values = 32;
  cfg.radius = 3;
  const OpCounters f = count_ops_formula(cfg);
  bool pass = f.inference_adds == 328 && f.capture_adds == 42 &&
              f.backoff_adds == 150 && f.search_adds == 294 &&
              f.total() == 814;

  // Measured bypass accounting on a real stream must stay at or under the
  // closed forms in every category, in both search modes.
  ExperimentSpec spec = spec_for("op-count", threads);
  spec.neuron_counts = {8};
  spec.seeds = 4;
  const ScenarioResult res = run_scenario(spec);
  double worst_ratio = 0.0;
  for (const SummaryRow& r : summarize(res)) {
    double cap = -1.0;
    if (r.metric == "bypass.inference" || r.metric == "bypass_prob.inference")
      cap = static_cast<double>(f.inference_adds);
    if (r.metric == "bypass.capture" || r.metric == "bypass_prob.capture")
      cap = static_cast<double>(f.capture_adds);
    if (r.metric == "bypass.backoff" || r.metric == "bypass_prob.backoff")
      cap = static_cast<double>(f.backoff_adds);
    if (r.metric == "bypass.search" || r.metric == "bypass_prob.search")
      cap = static_cast<double>(f.search_adds);
    if (cap >= 0.0) {
      for (double v : r.per_seed) {
        pass = pass && v <= cap;
        worst_ratio = std::max(worst_ratio, v / cap);
      }
    }
  }
  report("C3", pass,
         "op formulas 328/42/150/294 total 814; measured bypass <= formula "
         "per category (worst measured/formula = " +
             fmt(worst_ratio) + ")");
}

void criterion_4() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(20240);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const int rows = 1 + static_cast<int>(rng.next_below(6));
    const int cols = 1 + static_cast<int>(rng.next_below(6));
    ContingencyTable t(rows, cols);
    bool any = false;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (rng.next_below(3) == 0) continue;
        t.at(r, c) = static_cast<std::int64_t>(rng.next_below(1000));
        any = any || t.at(r, c) > 0;
      }
    }
    if (!any) t.at(0, 0) = 1;
    if (sorting_accuracy(t).assigned_sum != testing::brute_force_assignment(t)) {
      ++mismatches;
    }
  }
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  report("C4", mismatches == 0,
         "assignment solver vs exhaustive permutations, 1000 random tables "
         "up to 6x6: " +
             std::to_string(mismatches) + " mismatches, " +
             fmt(elapsed.count()) + " s");
}

// ---- trend checks -------------------------------------------------------

struct GapStats {
  double min_gap = 1e9;
  double mean_gap = 0.0;
  CellKey worst{};
};

GapStats gap_stats(const CellMeans& a, const CellMeans& b) {
  GapStats g;
  double sum = 0.0;
  for (const auto& [key, va] : a) {
    const double gap = va - b.at(key);
    sum += gap;
    if (gap < g.min_gap) {
      g.min_gap = gap;
      g.worst = key;
    }
  }
  g.mean_gap = sum / static_cast<double>(a.size());
  return g;
}

std::string cell_name(const CellKey& k) {
  return "(n=" + std::to_string(k.first) + ", dev=" + fmt(k.second) + ")";
}

void criterion_5(const CellMeans& nd, const CellMeans& km) {
  const GapStats g = gap_stats(nd, km);
  report("C5", g.min_gap >= -0.02 && g.mean_gap >= 0.05,
         "dendrite vs realistic k-means, dev <= 4/16: per-cell min gap " +
             fmt(g.min_gap) + " at " + cell_name(g.worst) +
             " (>= -0.02), mean gap " + fmt(g.mean_gap) + " (>= 0.05)");
}

void criterion_6(const CellMeans& nd, const CellMeans& nosearch) {
  double sum = 0.0;
  for (const auto& [key, v] : nd) sum += v - nosearch.at(key);
  const double mean = sum / static_cast<double>(nd.size());
  report("C6", mean >= 0.05,
         "search ablation costs " + fmt(mean) +
             " mean accuracy at small deviations (>= 0.05)");
}

void criterion_7(const CellMeans& nd, const CellMeans& prob) {
  double worst = 0.0;
  CellKey worst_key{};
  for (const auto& [key, v] : nd) {
    const double diff = std::abs(prob.at(key) - v);
    if (diff > worst) {
      worst = diff;
      worst_key = key;
    }
  }
  report("C7", worst <= 0.03,
         "probabilistic vs fractional search: worst |diff| " + fmt(worst) +
             " at " + cell_name(worst_key) + " (<= 0.03)");
}

void criterion_8(const CellMeans& fl, const CellMeans& disc) {
  double worst = 0.0;
  CellKey worst_key{};
  for (const auto& [key, v] : fl) {
    const double diff = std::abs(disc.at(key) - v);
    if (diff > worst) {
      worst = diff;
      worst_key = key;
    }
  }
  report("C8", worst <= 0.03,
         "discretized vs float k-means: worst |diff| " + fmt(worst) + " at " +
             cell_name(worst_key) + " (<= 0.03)");
}

void criterion_9(const CellMeans& realistic, const CellMeans& ideal) {
  double worst = -1e9;
  CellKey worst_key{};
  for (const auto& [key, v] : realistic) {
    const double over = v - ideal.at(key);
    if (over > worst) {
      worst = over;
      worst_key = key;
    }
  }
  report("C9", worst <= 0.02,
         "realistic k-means never beats the ideal bound: worst excess " +
             fmt(worst) + " at " + cell_name(worst_key) + " (<= 0.02)");
}

void criterion_10(int threads) {
  // One trace per seed: near-perfect before the switch, a sharp drop at
  // it, recovery within 1500 steps. A fresh random base set can land on
  // the old templates and disturb little, so the full pattern is required
  // of the majority of seeds rather than every one.
  ExperimentSpec spec = spec_for("nd-adapt", threads);
  const ScenarioResult res = run_scenario(spec);
  const int switch_window = res.spec.switch_at / res.spec.window;
  const int recovery_windows = 1500 / res.spec.window;
  std::map<int, std::map<int, double>> traces;  // seed -> window -> acc
  for (const CellResult& c : res.cells) {
    traces[c.seed][c.window] = c.value;
  }
  int showing = 0;
  for (const auto& [seed, tr] : traces) {
    double pre_max = 0.0;
    for (int w = 0; w < switch_window; ++w) pre_max = std::max(pre_max, tr.at(w));
    double post_min = 1.0;
    for (int w = switch_window; w < switch_window + 5; ++w) {
      post_min = std::min(post_min, tr.at(w));
    }
    const double drop = tr.at(switch_window - 1) - post_min;
    bool recovered = false;
    for (int w = switch_window; w < switch_window + recovery_windows; ++w) {
      recovered = recovered || tr.at(w) >= 0.9;
    }
    showing += pre_max >= 0.9 && drop >= 0.3 && recovered;
  }
  const int seeds = static_cast<int>(traces.size());
  report("C10", 2 * showing >= seeds,
         "adaptability (switch at 5000): " + std::to_string(showing) + "/" +
             std::to_string(seeds) +
             " seeds reach >= 0.9, drop >= 0.3 and recover to >= 0.9 "
             "within 1500 steps (need a majority)");
}

void criterion_11(int threads) {
  // Zipf rates: the ordering binds at the smallest deviation. The
  // accurate-neuron cliff (C13) already caps zipf accuracy for the larger
  // small-grid deviations, where k-means is on par or better.
  const CellMeans nd =
      accuracy_means(run_scenario(spec_for("zipf-nd", threads, {1.0 / 16})));
  const CellMeans km = accuracy_means(
      run_scenario(spec_for("zipf-kmeans", threads, {1.0 / 16})));
  const GapStats g = gap_stats(nd, km);
  report("C11", g.min_gap >= -0.02 && g.mean_gap >= 0.05,
         "zipf ordering at dev 1/16: per-cell min gap " + fmt(g.min_gap) +
             " at " + cell_name(g.worst) + " (>= -0.02), mean gap " +
             fmt(g.mean_gap) + " (>= 0.05)");
}

void criterion_12(int threads) {
  ExperimentSpec mm = spec_for("cid-mismatch", threads, small_devs());
  const ScenarioResult acc_res = run_scenario(mm);
  std::map<int, double> acc;  // cid count -> mean accuracy over cells
  std::map<int, int> n;
  for (const SummaryRow& r : summarize(acc_res)) {
    if (r.metric != "accuracy") continue;
    acc[r.cids] += r.mean;
    ++n[r.cids];
  }
  for (auto& [k, v] : acc) v /= n[k];

  ExperimentSpec pu = spec_for("cid-merge-purity", threads, small_devs());
  const ScenarioResult pu_res = run_scenario(pu);
  std::map<int, double> purity_by_k;
  std::map<int, int> pn;
  for (const SummaryRow& r : summarize(pu_res)) {
    if (r.metric != "purity" || r.cids < 8) continue;
    purity_by_k[r.cids] += r.mean;
    ++pn[r.cids];
  }
  for (auto& [k, v] : purity_by_k) v /= pn[k];
  double lo = 1.0, hi = 0.0;
  for (const auto& [k, v] : purity_by_k) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const bool non_inferior = acc[7] >= acc[8] - 0.02;
  const bool flat = hi - lo < 0.05;
  report("C12", non_inferior && flat,
         "8 zipf neurons: accuracy at 7 cids " + fmt(acc[7]) +
             " vs 8 cids " + fmt(acc[8]) + " (>= -0.02); merged purity over "
             "cids 8..12 spans " +
             fmt(hi - lo) + " (< 0.05)");
}

void criterion_13(int threads) {
  ExperimentSpec spec = spec_for("maa-count", threads, {1.0 / 16, 4.0 / 16});
  const ScenarioResult res = run_scenario(spec);
  std::map<CellKey, double> counts;
  for (const SummaryRow& r : summarize(res)) {
    if (r.metric == "accurate_neurons@0.8") {
      counts[{r.neurons, r.dev}] = r.mean;
    }
  }
  bool in_band = true;
  double lo = 1e9, hi = -1e9, sum25 = 0.0, sum06 = 0.0;
  int cells = 0;
  for (int n = 4; n <= 12; ++n) {
    const double at25 = counts.at({n, 0.25});
    const double at06 = counts.at({n, 0.0625});
    in_band = in_band && at25 >= 3.0 && at25 <= 5.0;
    lo = std::min(lo, at25);
    hi = std::max(hi, at25);
    sum25 += at25;
    sum06 += at06;
    ++cells;
  }
  const bool cliff = sum25 / cells < sum06 / cells;
  report("C13", in_band && cliff,
         "accurate neurons at maa 0.8: dev 4/16 counts span [" + fmt(lo) +
             ", " + fmt(hi) + "] across N (accept 3..5), mean " +
             fmt(sum25 / cells) + " < mean at dev 1/16 " + fmt(sum06 / cells));
}

// ---- always-on property reruns ------------------------------------------

bool property_weight_bounds() {
  DendriteConfig c;
  c.templates = 3;
  c.features = 3;
  c.values = 8;
  c.radius = 1;
  Dendrite d(c, 9);
  Rng rng(10);
  const Weight cap = static_cast<Weight>(c.max_weight * d.weight_scale());
  for (int i = 0; i < 2000; ++i) {
    FeatureVector x(3);
    for (int j = 0; j < 3; ++j) x[j] = 1 + static_cast<int>(rng.next_below(8));
    d.step(x);
    for (Weight w : d.weights()) {
      if (w < 0 || w > cap) return false;
    }
  }
  return true;
}

bool property_tie_and_search() {
  DendriteConfig c;
  c.templates = 4;
  c.features = 2;
  c.values = 8;
  c.radius = 1;
  Dendrite d(c, 0);
  for (int t = 1; t <= 4; ++t)
    for (int f = 1; f <= 2; ++f)
      for (int v = 1; v <= 8; ++v) d.set_weight_at(t, f, v, 3);
  if (d.infer({4, 4}).cid != 1) return false;
  // search never lowers a weight nor lifts one past base_weight
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    FeatureVector x{1 + static_cast<int>(rng.next_below(8)),
                    1 + static_cast<int>(rng.next_below(8))};
    const std::vector<Weight> before(d.weights().begin(), d.weights().end());
    d.update_search(x, 1);
    const auto after = d.weights();
    const Weight base = static_cast<Weight>(c.base_weight * d.weight_scale());
    for (std::size_t k = 0; k < after.size(); ++k) {
      if (after[k] < before[k] || after[k] > std::max(before[k], base)) {
        return false;
      }
    }
  }
  return true;
}

bool property_r0_equivalence() {
  Rng rng(14);
  for (int rep = 0; rep < 40; ++rep) {
    DendriteConfig c;
    c.templates = 1 + static_cast<int>(rng.next_below(4));
    c.features = 1 + static_cast<int>(rng.next_below(4));
    c.values = 2 + static_cast<int>(rng.next_below(7));
    c.radius = 0;
    Dendrite d(c, 0);
    for (int t = 1; t <= c.templates; ++t)
      for (int f = 1; f <= c.features; ++f)
        for (int v = 1; v <= c.values; ++v)
          d.set_weight_at(t, f, v, static_cast<Weight>(rng.next_below(10)));
    for (int i = 0; i < 10; ++i) {
      FeatureVector x(c.features);
      for (int j = 0; j < c.features; ++j)
        x[j] = 1 + static_cast<int>(rng.next_below(c.values));
      std::int64_t best = -1;
      int best_t = 0;
      for (int t = 1; t <= c.templates; ++t) {
        std::int64_t s = 0;
        for (int f = 1; f <= c.features; ++f) s += d.weight_at(t, f, x[f - 1]);
        if (s > best) {
          best = s;
          best_t = t;
        }
      }
      if (d.infer(x).cid != best_t) return false;
    }
  }
  return true;
}

bool property_generator() {
  const CanonicalShape canon = CanonicalShape::defaults();
  const auto a = gen_base_neurons(canon, 8, 0.375, 5);
  const auto b = gen_base_neurons(canon, 8, 0.375, 5);
  for (int i = 0; i < 8; ++i) {
    if (a[i].features != b[i].features) return false;
  }
  GeneratorConfig cfg;
  cfg.neuron_count = 8;
  cfg.stream_length = 30000;
  cfg.rate = RateModel::kZipf;
  cfg.seed = 77;
  const LabeledStream s = gen_stream(canon, a, cfg);
  const LabeledStream s2 = gen_stream(canon, a, cfg);
  if (s.labels != s2.labels || s.quantized != s2.quantized) return false;
  std::vector<int> counts(8, 0);
  for (int l : s.labels) ++counts[l - 1];
  double h = 0.0;
  for (int i = 1; i <= 8; ++i) h += 1.0 / i;
  for (int i = 0; i < 8; ++i) {
    const double expected = (1.0 / (i + 1)) / h;
    const double got = counts[i] / 30000.0;
    if (std::abs(got - expected) / expected > 0.05) return false;
  }
  return true;
}

bool property_wcss() {
  Rng rng(15);
  std::vector<RawShape> train;
  for (int i = 0; i < 500; ++i) {
    RawShape s{};
    for (int f = 0; f < kShapeFeatures; ++f) s[f] = rng.next_unit() * 10.0;
    train.push_back(s);
  }
  std::vector<RawShape> init;
  for (int c = 0; c < 4; ++c) {
    RawShape s{};
    s.fill(2.0 * c + 1.0);
    init.push_back(s);
  }
  KMeansConfig cfg;
  cfg.min_convergence = 1.0;
  const KMeansModel model = kmeans_fit(train, init, cfg);
  for (std::size_t i = 1; i < model.wcss_history.size(); ++i) {
    if (model.wcss_history[i] > model.wcss_history[i - 1] + 1e-9) return false;
  }
  return true;
}

void criterion_14() {
  struct Named {
    const char* name;
    bool ok;
  };
  const Named props[] = {
      {"weight-bounds", property_weight_bounds()},
      {"tie-and-search-monotonicity", property_tie_and_search()},
      {"r0-equivalence", property_r0_equivalence()},
      {"generator-determinism-and-zipf", property_generator()},
      {"kmeans-wcss-decrease", property_wcss()},
  };
  bool all = true;
  std::string detail = "property suites:";
  for (const Named& p : props) {
    all = all && p.ok;
    detail += std::string(" ") + p.name + (p.ok ? "(ok)" : "(FAILED)");
  }
  report("C14", all, detail);
}

}  // namespace

int main(int argc, char** argv) {
  int threads = 0;
  for (int i = 1; i < argc - 1; ++i) {
    if (std::strcmp(argv[i], "--threads") == 0) threads = std::atoi(argv[i + 1]);
  }
  const auto t0 = std::chrono::steady_clock::now();

  criterion_1_and_2();
  criterion_3(threads);
  criterion_4();

  // Shared scenario runs for the trend criteria.
  const CellMeans km_real =
      accuracy_means(run_scenario(spec_for("kmeans-realistic", threads)));
  const CellMeans km_ideal =
      accuracy_means(run_scenario(spec_for("kmeans-ideal", threads)));
  const CellMeans km_disc =
      accuracy_means(run_scenario(spec_for("kmeans-discretized", threads)));
  const CellMeans nd_base = accuracy_means(
      run_scenario(spec_for("nd-baseline", threads, small_devs())));
  const CellMeans nd_nosearch = accuracy_means(
      run_scenario(spec_for("nd-no-search", threads, small_devs())));
  const CellMeans nd_prob = accuracy_means(
      run_scenario(spec_for("nd-prob-search", threads, small_devs())));

  const auto restrict_small = [](const CellMeans& m) {
    CellMeans out;
    for (const auto& [key, v] : m) {
      if (key.second <= 0.25 + 1e-9) out[key] = v;
    }
    return out;
  };

  criterion_5(nd_base, restrict_small(km_real));
  criterion_6(nd_base, nd_nosearch);
  criterion_7(nd_base, nd_prob);
  criterion_8(km_real, km_disc);
  criterion_9(km_real, km_ideal);
  criterion_10(threads);
  criterion_11(threads);
  criterion_12(threads);
  criterion_13(threads);
  criterion_14();

  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - t0;
  std::printf("%d/14 criteria passed in %.1f s\n", 14 - g_failures,
              elapsed.count());
  return g_failures;
}
