#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ndsort/dendrite.hpp"
#include "ndsort/kmeans.hpp"
#include "ndsort/metrics.hpp"
#include "ndsort/synth.hpp"

namespace ndsort {

struct ScenarioInfo {
  std::string id;
  std::string summary;
};

// Every runnable scenario with a one-line description.
const std::vector<ScenarioInfo>& scenario_catalog();
bool is_known_scenario(const std::string& id);

// Dendrite hyperparameter overrides; unset fields take the
// deviation-dependent defaults from default_nd_config().
struct HyperOverrides {
  std::optional<int> capture;
  std::optional<int> backoff;
  std::optional<int> max_weight;
  std::optional<int> base_weight;
  std::optional<int> radius;
  std::optional<std::pair<int, int>> search;  // num/den
  std::optional<bool> prob_search;
};

// Stock hyperparameters: max_weight 32, base_weight 28, radius 3,
// search 1/16. capture/backoff switch at the deviation midpoint:
// 3/2 for instance_dev <= 4/16, 4/1 above.
DendriteConfig default_nd_config(double instance_dev, int templates);

struct ExperimentSpec {
  std::string scenario;
  std::vector<int> neuron_counts;     // empty -> scenario default
  std::vector<double> instance_devs;  // empty -> scenario default
  std::vector<int> cid_counts;        // cid-mismatch family; empty -> 6..12
  std::vector<double> maa_levels;     // maa-count; empty -> {0.8, 0.9}
  int seeds = 16;
  std::uint64_t master_seed = 2;
  int stream_length = 10000;
  double base_dev = 0.375;
  double zipf_exponent = 1.0;
  int window = 100;    // windowed-accuracy step size (nd-adapt)
  int switch_at = 5000;
  CanonicalShape canonical = CanonicalShape::defaults();
  HyperOverrides nd;
  KMeansConfig kmeans;
  int threads = 0;  // 0 -> hardware concurrency
};

// Fills scenario defaults into unset fields; throws std::invalid_argument
// on an unknown scenario id.
ExperimentSpec resolve_spec(ExperimentSpec spec);

// One scored value. seed is the seed index, or -1 for data-independent
// rows (closed-form op counts). window is the trace window index, or -1.
struct CellResult {
  int neurons = 0;
  int cids = 0;
  double dev = 0.0;
  int seed = -1;
  int window = -1;
  std::string metric;
  double value = 0.0;
};

struct ScenarioResult {
  ExperimentSpec spec;  // resolved
  std::vector<CellResult> cells;
};

// Runs every (neurons, cids, dev, seed) cell of the scenario. Cells are
// independent and may be computed on spec.threads workers; the returned
// order and all downstream CSVs are independent of the thread count.
//
// Seed discipline: substream seeds derive from (master_seed, purpose tag,
// cell coordinates), so the same cell sees the same base neurons, stream,
// and initial centroid draws in every scenario. The dendrite and the
// k-means baseline are therefore compared on identical inputs and
// identical initial shapes.
ScenarioResult run_scenario(const ExperimentSpec& spec);

struct SummaryRow {
  int neurons = 0;
  int cids = 0;
  double dev = 0.0;
  int window = -1;
  std::string metric;
  double mean = 0.0;
  std::vector<double> per_seed;
};

// Per-seed means grouped by (metric, neurons, cids, dev, window), in
// deterministic order.
std::vector<SummaryRow> summarize(const ScenarioResult& result);

void write_cells_csv(std::ostream& out, const ScenarioResult& result);
void write_summary_csv(std::ostream& out, const ScenarioResult& result);
// Scenario-shaped x/y table, ready for plotting.
void write_plot_csv(std::ostream& out, const ScenarioResult& result);
// Full resolved configuration, one key = value per line; enough to rerun
// the scenario bit-identically.
void write_resolved_spec(std::ostream& out, const ExperimentSpec& spec);

// Hand-checked 6-neuron x 6-cluster fixture (5000 spikes) with known
// optimal assignment mass 4120 and merged mass 4661.
ContingencyTable reference_contingency_table();

struct OracleCheck {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  bool pass = false;
  double elapsed_seconds = 0.0;
};

// Exact built-in checks: reference-table sorting accuracy and purity, and
// the closed-form op counts at p=8, m=6, n=32, r=3.
std::vector<OracleCheck> run_oracle_checks();

}  // namespace ndsort
