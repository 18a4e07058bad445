#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ndsort/rng.hpp"

namespace ndsort {

// One discretized input: m feature values, each an integer in [1, n].
using FeatureVector = std::vector<int>;

// Multi-valued input: element j lists the values (1..n) that feature j
// takes simultaneously.
using FeatureArray = std::vector<std::vector<int>>;

// Stored weights are fixed point: real weight * DendriteConfig::weight_scale().
using Weight = std::int32_t;

struct DendriteConfig {
  int templates = 8;  // clusters this unit can form            (p)
  int features = 6;   // components per input vector            (m)
  int values = 32;    // discrete values per feature            (n)
  int radius = 3;     // similarity half-window per feature     (r)

  int max_weight = 32;   // hard ceiling on any weight
  int base_weight = 28;  // ceiling on search-driven growth, < max_weight
  int capture = 3;       // winner increment inside the addressed windows
  int backoff = 2;       // winner decrement everywhere else

  // Search slowly primes losing templates so they can take over drifting
  // or unclaimed input. Fractional mode (prob_search = false): every
  // addressed weight of every losing template gains search_num/search_den,
  // capped at base_weight. Probabilistic mode: the increment is 1 and is
  // applied with probability search_num/search_den per addressed weight.
  // search_num = 0 disables search in either mode.
  int search_num = 1;
  int search_den = 16;
  bool prob_search = false;

  // Fixed-point denominator of stored weights: search_den in fractional
  // mode (so the search increment is exactly representable), 1 otherwise.
  int weight_scale() const;

  // Throws std::invalid_argument on a bad combination.
  void validate() const;
};

struct InferenceResult {
  int cid = 1;                       // winning template, 1-based; ties go low
  std::vector<std::int64_t> scores;  // per-template sums, fixed-point units
};

enum class OpAccounting {
  kFormulaBaseline,   // closed-form adds per step, data independent
  kBypass,            // measured adds; saturated/floored/zero work skipped
  kBypassProbSearch,  // measured adds on a probabilistic-search engine
};

// Per-category two-input addition counts, the energy proxy.
struct OpCounters {
  OpAccounting mode = OpAccounting::kFormulaBaseline;
  std::uint64_t inference_adds = 0;
  std::uint64_t capture_adds = 0;
  std::uint64_t backoff_adds = 0;
  std::uint64_t search_adds = 0;

  std::uint64_t total() const {
    return inference_adds + capture_adds + backoff_adds + search_adds;
  }
};

// Closed-form per-step counts for a config, assuming interior (unclamped)
// windows:
//   inference = p(m(2r+1) - 1)      capture = m(2r+1)
//   backoff   = m(n - (2r+1))       search  = (p-1) m(2r+1)
OpCounters count_ops_formula(const DendriteConfig& cfg);

// Online clustering unit: p weight templates over an m x n discretized
// feature space. step() infers the best-matching template, reinforces its
// addressed value windows (capture), depresses the rest of that template
// (backoff), and slowly primes the losing templates (search). Addressed
// positions for input x are, per feature j, the values in x_j +- radius
// clamped to [1, n].
//
// Single writer: step()/update_*() must be externally serialized per
// instance. Distinct instances share nothing and may run in parallel.
class Dendrite {
 public:
  // Starts with all weights zero. The seed drives only the probabilistic
  // search trigger stream.
  Dendrite(const DendriteConfig& cfg, std::uint64_t seed);

  // Builds a state whose template i carries stamp_weight (default
  // base_weight) on centroid_i's +-radius windows and zero elsewhere.
  static Dendrite from_centroids(const DendriteConfig& cfg,
                                 std::span<const FeatureVector> centroids,
                                 std::uint64_t seed,
                                 std::optional<int> stamp_weight = std::nullopt);

  // Pure inference; validates x, never mutates weights or counters.
  // Ties resolve to the lowest template index.
  InferenceResult infer(const FeatureVector& x) const;

  // Multi-valued generalization: feature j contributes the window sum of
  // every one of its active values.
  InferenceResult infer_multi(const FeatureArray& x) const;

  // One online step: infer, then both updates against the pre-step winner.
  // Returns the winning CId. This is the mutation path for streaming, and
  // the only place formula-baseline accounting accrues.
  int step(const FeatureVector& x);

  // The two update halves, exposed separately for callers that need them.
  // cid is 1-based and must be the infer() result for x on the current
  // state. update_winner touches only template cid; update_search touches
  // only the other templates and never lowers a weight nor raises one
  // beyond max(current, base_weight).
  void update_winner(const FeatureVector& x, int cid);
  void update_search(const FeatureVector& x, int cid);

  const DendriteConfig& config() const { return cfg_; }
  int weight_scale() const { return scale_; }

  // Fixed-point weight at (cid, feature, value), all 1-based.
  Weight weight_at(int cid, int feature, int value) const;
  void set_weight_at(int cid, int feature, int value, Weight w);
  std::span<const Weight> weights() const { return weights_; }

  void set_accounting(OpAccounting mode);
  const OpCounters& counters() const { return counters_; }
  void reset_counters();

  // Versioned text snapshot of (config, fixed-point weights); round-trip
  // exact. The search trigger stream is not part of the learned state and
  // is reseeded on load.
  void save(std::ostream& out) const;
  static Dendrite load(std::istream& in, std::uint64_t seed = 0);

 private:
  std::size_t index(int t, int f, int v) const {
    return (static_cast<std::size_t>(t) * cfg_.features + f) *
               static_cast<std::size_t>(cfg_.values) +
           v;
  }
  // Inclusive 0-based window [lo, hi] for 1-based input value.
  void window(int value, int& lo, int& hi) const;
  void check_input(const FeatureVector& x) const;
  InferenceResult infer_counting(const FeatureVector& x,
                                 std::uint64_t* measured_adds) const;
  bool measured() const { return counters_.mode != OpAccounting::kFormulaBaseline; }

  DendriteConfig cfg_;
  int scale_ = 1;
  Weight w_max_ = 0;      // scaled
  Weight w_base_ = 0;     // scaled
  Weight capture_ = 0;    // scaled
  Weight backoff_ = 0;    // scaled
  Weight search_inc_ = 0; // scaled; fractional: search_num, probabilistic: 1
  std::vector<Weight> weights_;
  OpCounters counters_;
  OpCounters formula_;  // cached closed form per step
  Rng rng_;
};

}  // namespace ndsort
