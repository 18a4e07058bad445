#include "ndsort/dendrite.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ndsort {

int DendriteConfig::weight_scale() const {
  if (prob_search || search_num == 0) {
    return 1;
  }
  return search_den;
}

void DendriteConfig::validate() const {
  if (templates < 1) throw std::invalid_argument("templates must be >= 1");
  if (features < 1) throw std::invalid_argument("features must be >= 1");
  if (values < 2) throw std::invalid_argument("values must be >= 2");
  if (radius < 0) throw std::invalid_argument("radius must be >= 0");
  if (2 * radius + 1 > values) {
    throw std::invalid_argument("similarity window 2r+1 exceeds value range");
  }
  if (max_weight <= 0 || base_weight <= 0 || base_weight >= max_weight) {
    throw std::invalid_argument("need 0 < base_weight < max_weight");
  }
  if (capture <= 0) throw std::invalid_argument("capture must be > 0");
  if (backoff < 0) throw std::invalid_argument("backoff must be >= 0");
  if (search_num < 0 || search_den < 1) {
    throw std::invalid_argument("search amount must be >= 0");
  }
  if (prob_search && search_num > search_den) {
    throw std::invalid_argument("search trigger probability exceeds 1");
  }
}

OpCounters count_ops_formula(const DendriteConfig& cfg) {
  cfg.validate();
  const std::uint64_t p = static_cast<std::uint64_t>(cfg.templates);
  const std::uint64_t m = static_cast<std::uint64_t>(cfg.features);
  const std::uint64_t n = static_cast<std::uint64_t>(cfg.values);
  const std::uint64_t win = 2 * static_cast<std::uint64_t>(cfg.radius) + 1;
  OpCounters c;
  c.mode = OpAccounting::kFormulaBaseline;
  c.inference_adds = p * (m * win - 1);
  c.capture_adds = m * win;
  c.backoff_adds = m * (n - win);
  c.search_adds = (p - 1) * m * win;
  return c;
}

Dendrite::Dendrite(const DendriteConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed) {
  cfg_.validate();
  scale_ = cfg_.weight_scale();
  w_max_ = static_cast<Weight>(cfg_.max_weight * scale_);
  w_base_ = static_cast<Weight>(cfg_.base_weight * scale_);
  capture_ = static_cast<Weight>(cfg_.capture * scale_);
  backoff_ = static_cast<Weight>(cfg_.backoff * scale_);
  search_inc_ = cfg_.prob_search ? static_cast<Weight>(scale_)
                                 : static_cast<Weight>(cfg_.search_num);
  weights_.assign(static_cast<std::size_t>(cfg_.templates) * cfg_.features *
                      cfg_.values,
                  0);
  formula_ = count_ops_formula(cfg_);
}

Dendrite Dendrite::from_centroids(const DendriteConfig& cfg,
                                  std::span<const FeatureVector> centroids,
                                  std::uint64_t seed,
                                  std::optional<int> stamp_weight) {
  Dendrite d(cfg, seed);
  if (static_cast<int>(centroids.size()) != cfg.templates) {
    throw std::invalid_argument("centroid count does not match template count");
  }
  const int stamp_units = stamp_weight.value_or(cfg.base_weight);
  if (stamp_units < 0 || stamp_units > cfg.max_weight) {
    throw std::invalid_argument("stamp weight outside [0, max_weight]");
  }
  const Weight stamp = static_cast<Weight>(stamp_units * d.scale_);
  for (int t = 0; t < cfg.templates; ++t) {
    d.check_input(centroids[t]);
    for (int f = 0; f < cfg.features; ++f) {
      int lo = 0, hi = 0;
      d.window(centroids[t][f], lo, hi);
      for (int v = lo; v <= hi; ++v) {
        d.weights_[d.index(t, f, v)] = stamp;
      }
    }
  }
  return d;
}

void Dendrite::window(int value, int& lo, int& hi) const {
  // Clamp the similarity window to the value range; boundary inputs
  // address fewer than 2r+1 weights.
  lo = std::max(1, value - cfg_.radius) - 1;
  hi = std::min(cfg_.values, value + cfg_.radius) - 1;
}

void Dendrite::check_input(const FeatureVector& x) const {
  if (static_cast<int>(x.size()) != cfg_.features) {
    throw std::invalid_argument("feature vector has wrong length");
  }
  for (int v : x) {
    if (v < 1 || v > cfg_.values) {
      throw std::invalid_argument("feature value outside [1, n]");
    }
  }
}

InferenceResult Dendrite::infer_counting(const FeatureVector& x,
                                         std::uint64_t* measured_adds) const {
  check_input(x);
  InferenceResult res;
  res.scores.resize(cfg_.templates, 0);
  for (int t = 0; t < cfg_.templates; ++t) {
    std::int64_t sum = 0;
    std::uint64_t nonzero = 0;
    for (int f = 0; f < cfg_.features; ++f) {
      int lo = 0, hi = 0;
      window(x[f], lo, hi);
      const Weight* row = &weights_[index(t, f, 0)];
      for (int v = lo; v <= hi; ++v) {
        sum += row[v];
        nonzero += row[v] != 0;
      }
    }
    res.scores[t] = sum;
    if (measured_adds != nullptr && nonzero > 1) {
      // Summing c nonzero addends costs c-1 two-input additions.
      *measured_adds += nonzero - 1;
    }
  }
  res.cid = 1 + static_cast<int>(std::max_element(res.scores.begin(),
                                                  res.scores.end()) -
                                 res.scores.begin());
  return res;
}

InferenceResult Dendrite::infer(const FeatureVector& x) const {
  return infer_counting(x, nullptr);
}

InferenceResult Dendrite::infer_multi(const FeatureArray& x) const {
  if (static_cast<int>(x.size()) != cfg_.features) {
    throw std::invalid_argument("feature array has wrong length");
  }
  for (const auto& active : x) {
    for (int v : active) {
      if (v < 1 || v > cfg_.values) {
        throw std::invalid_argument("feature value outside [1, n]");
      }
    }
  }
  InferenceResult res;
  res.scores.resize(cfg_.templates, 0);
  for (int t = 0; t < cfg_.templates; ++t) {
    std::int64_t sum = 0;
    for (int f = 0; f < cfg_.features; ++f) {
      const Weight* row = &weights_[index(t, f, 0)];
      for (int value : x[f]) {
        int lo = 0, hi = 0;
        window(value, lo, hi);
        for (int v = lo; v <= hi; ++v) {
          sum += row[v];
        }
      }
    }
    res.scores[t] = sum;
  }
  res.cid = 1 + static_cast<int>(std::max_element(res.scores.begin(),
                                                  res.scores.end()) -
                                 res.scores.begin());
  return res;
}

void Dendrite::update_winner(const FeatureVector& x, int cid) {
  check_input(x);
  if (cid < 1 || cid > cfg_.templates) {
    throw std::invalid_argument("cid outside [1, p]");
  }
  const int t = cid - 1;
  for (int f = 0; f < cfg_.features; ++f) {
    int lo = 0, hi = 0;
    window(x[f], lo, hi);
    Weight* row = &weights_[index(t, f, 0)];
    for (int v = 0; v < cfg_.values; ++v) {
      if (v >= lo && v <= hi) {
        if (row[v] < w_max_) {
          row[v] = std::min<Weight>(row[v] + capture_, w_max_);
          if (measured()) ++counters_.capture_adds;
        }
      } else if (row[v] > 0) {
        row[v] = std::max<Weight>(row[v] - backoff_, 0);
        if (measured()) ++counters_.backoff_adds;
      }
    }
  }
}

void Dendrite::update_search(const FeatureVector& x, int cid) {
  check_input(x);
  if (cid < 1 || cid > cfg_.templates) {
    throw std::invalid_argument("cid outside [1, p]");
  }
  if (search_inc_ == 0 || cfg_.search_num == 0) {
    return;
  }
  const int winner = cid - 1;
  for (int t = 0; t < cfg_.templates; ++t) {
    if (t == winner) continue;
    for (int f = 0; f < cfg_.features; ++f) {
      int lo = 0, hi = 0;
      window(x[f], lo, hi);
      Weight* row = &weights_[index(t, f, 0)];
      for (int v = lo; v <= hi; ++v) {
        // In probabilistic mode the trigger is drawn per addressed
        // position, unconditionally, so the trigger stream consumption
        // does not depend on the weight data.
        if (cfg_.prob_search &&
            !rng_.chance(static_cast<std::uint32_t>(cfg_.search_num),
                         static_cast<std::uint32_t>(cfg_.search_den))) {
          continue;
        }
        if (row[v] < w_base_) {
          row[v] = std::min<Weight>(row[v] + search_inc_, w_base_);
          if (measured()) ++counters_.search_adds;
        }
      }
    }
  }
}

int Dendrite::step(const FeatureVector& x) {
  std::uint64_t measured_inference = 0;
  const InferenceResult res =
      infer_counting(x, measured() ? &measured_inference : nullptr);
  if (measured()) {
    counters_.inference_adds += measured_inference;
  } else {
    counters_.inference_adds += formula_.inference_adds;
    counters_.capture_adds += formula_.capture_adds;
    counters_.backoff_adds += formula_.backoff_adds;
    counters_.search_adds += formula_.search_adds;
  }
  update_winner(x, res.cid);
  update_search(x, res.cid);
  return res.cid;
}

Weight Dendrite::weight_at(int cid, int feature, int value) const {
  if (cid < 1 || cid > cfg_.templates || feature < 1 ||
      feature > cfg_.features || value < 1 || value > cfg_.values) {
    throw std::out_of_range("weight index outside (p, m, n)");
  }
  return weights_[index(cid - 1, feature - 1, value - 1)];
}

void Dendrite::set_weight_at(int cid, int feature, int value, Weight w) {
  if (cid < 1 || cid > cfg_.templates || feature < 1 ||
      feature > cfg_.features || value < 1 || value > cfg_.values) {
    throw std::out_of_range("weight index outside (p, m, n)");
  }
  if (w < 0 || w > w_max_) {
    throw std::invalid_argument("weight outside [0, max_weight * scale]");
  }
  weights_[index(cid - 1, feature - 1, value - 1)] = w;
}

void Dendrite::set_accounting(OpAccounting mode) { counters_.mode = mode; }

void Dendrite::reset_counters() {
  const OpAccounting mode = counters_.mode;
  counters_ = OpCounters{};
  counters_.mode = mode;
}

void Dendrite::save(std::ostream& out) const {
  out << "ndsort-state v1\n";
  out << "templates " << cfg_.templates << "\n";
  out << "features " << cfg_.features << "\n";
  out << "values " << cfg_.values << "\n";
  out << "radius " << cfg_.radius << "\n";
  out << "max_weight " << cfg_.max_weight << "\n";
  out << "base_weight " << cfg_.base_weight << "\n";
  out << "capture " << cfg_.capture << "\n";
  out << "backoff " << cfg_.backoff << "\n";
  out << "search " << cfg_.search_num << "/" << cfg_.search_den << "\n";
  out << "prob_search " << (cfg_.prob_search ? 1 : 0) << "\n";
  out << "scale " << scale_ << "\n";
  out << "weights";
  for (Weight w : weights_) {
    out << ' ' << w;
  }
  out << "\n";
}

namespace {

std::string expect_key(std::istream& in, const std::string& key) {
  std::string got;
  if (!(in >> got) || got != key) {
    throw std::runtime_error("state snapshot: expected '" + key + "'");
  }
  std::string value;
  if (!(in >> value)) {
    throw std::runtime_error("state snapshot: missing value for '" + key + "'");
  }
  return value;
}

int expect_int(std::istream& in, const std::string& key) {
  return std::stoi(expect_key(in, key));
}

}  // namespace

Dendrite Dendrite::load(std::istream& in, std::uint64_t seed) {
  std::string magic, version;
  if (!(in >> magic >> version) || magic != "ndsort-state" || version != "v1") {
    throw std::runtime_error("state snapshot: bad header");
  }
  DendriteConfig cfg;
  cfg.templates = expect_int(in, "templates");
  cfg.features = expect_int(in, "features");
  cfg.values = expect_int(in, "values");
  cfg.radius = expect_int(in, "radius");
  cfg.max_weight = expect_int(in, "max_weight");
  cfg.base_weight = expect_int(in, "base_weight");
  cfg.capture = expect_int(in, "capture");
  cfg.backoff = expect_int(in, "backoff");
  const std::string search = expect_key(in, "search");
  const auto slash = search.find('/');
  if (slash == std::string::npos) {
    throw std::runtime_error("state snapshot: malformed search amount");
  }
  cfg.search_num = std::stoi(search.substr(0, slash));
  cfg.search_den = std::stoi(search.substr(slash + 1));
  cfg.prob_search = expect_int(in, "prob_search") != 0;
  const int scale = expect_int(in, "scale");
  Dendrite d(cfg, seed);
  if (scale != d.scale_) {
    throw std::runtime_error("state snapshot: scale does not match config");
  }
  std::string key;
  if (!(in >> key) || key != "weights") {
    throw std::runtime_error("state snapshot: expected 'weights'");
  }
  for (Weight& w : d.weights_) {
    long long v = 0;
    if (!(in >> v)) {
      throw std::runtime_error("state snapshot: truncated weights");
    }
    if (v < 0 || v > d.w_max_) {
      throw std::runtime_error("state snapshot: weight outside bounds");
    }
    w = static_cast<Weight>(v);
  }
  return d;
}

}  // namespace ndsort
