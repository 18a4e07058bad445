#include "ndsort/synth.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "ndsort/rng.hpp"

namespace ndsort {

void CanonicalShape::validate() const {
  for (double m : means) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument("canonical feature means must be positive");
    }
  }
}

double quant_window_dev(double base_dev, double instance_dev) {
  return base_dev + instance_dev;
}

double GeneratorConfig::resolved_window_dev() const {
  return window_dev > 0.0 ? window_dev
                          : quant_window_dev(base_dev, instance_dev);
}

void GeneratorConfig::validate() const {
  if (neuron_count < 1) throw std::invalid_argument("neuron_count must be >= 1");
  if (base_dev < 0.0) throw std::invalid_argument("base_dev must be >= 0");
  if (instance_dev < 0.0) throw std::invalid_argument("instance_dev must be >= 0");
  if (window_dev < 0.0) throw std::invalid_argument("window_dev must be >= 0");
  if (resolved_window_dev() <= 0.0) {
    throw std::invalid_argument("quantizer window deviation must be > 0");
  }
  if (stream_length < 1) throw std::invalid_argument("stream_length must be >= 1");
  if (rate == RateModel::kZipf && !(zipf_exponent > 0.0)) {
    throw std::invalid_argument("zipf exponent must be > 0");
  }
  if (switch_at && (*switch_at < 0 || *switch_at > stream_length)) {
    throw std::invalid_argument("switch_at outside [0, stream_length]");
  }
}

std::vector<BaseNeuron> gen_base_neurons(const CanonicalShape& canonical,
                                         int count, double base_dev,
                                         std::uint64_t seed) {
  canonical.validate();
  if (count < 1) throw std::invalid_argument("neuron count must be >= 1");
  if (base_dev < 0.0) throw std::invalid_argument("base_dev must be >= 0");
  Rng rng(seed);
  std::vector<BaseNeuron> neurons(count);
  for (int i = 0; i < count; ++i) {
    neurons[i].id = i + 1;
    for (int f = 0; f < kShapeFeatures; ++f) {
      // The draw happens even at zero deviation so sequences with
      // different base_dev stay aligned.
      const double z = rng.next_normal();
      neurons[i].features[f] =
          canonical.means[f] * (1.0 + base_dev * z);
    }
  }
  return neurons;
}

namespace {

int pick_neuron(Rng& rng, const GeneratorConfig& cfg,
                const std::vector<double>& zipf_cum) {
  if (cfg.rate == RateModel::kUniform) {
    return static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.neuron_count)));
  }
  const double u = rng.next_unit() * zipf_cum.back();
  for (std::size_t i = 0; i < zipf_cum.size(); ++i) {
    if (u < zipf_cum[i]) return static_cast<int>(i);
  }
  return static_cast<int>(zipf_cum.size()) - 1;
}

}  // namespace

LabeledStream gen_stream(const CanonicalShape& canonical,
                         std::span<const BaseNeuron> neurons,
                         const GeneratorConfig& cfg) {
  canonical.validate();
  cfg.validate();
  if (neurons.empty()) throw std::invalid_argument("neuron set is empty");
  if (static_cast<int>(neurons.size()) != cfg.neuron_count) {
    throw std::invalid_argument("neuron set does not match neuron_count");
  }

  std::vector<double> zipf_cum;
  if (cfg.rate == RateModel::kZipf) {
    zipf_cum.resize(neurons.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < neurons.size(); ++i) {
      acc += 1.0 / std::pow(static_cast<double>(i + 1), cfg.zipf_exponent);
      zipf_cum[i] = acc;
    }
  }

  std::vector<BaseNeuron> switched;
  if (cfg.switch_at) {
    switched = gen_base_neurons(canonical, cfg.neuron_count, cfg.base_dev,
                                cfg.switch_seed);
  }

  Rng rng(cfg.seed);
  const double window_dev = cfg.resolved_window_dev();
  LabeledStream stream;
  stream.labels.reserve(cfg.stream_length);
  stream.raw.reserve(cfg.stream_length);
  stream.quantized.reserve(cfg.stream_length);
  for (int t = 0; t < cfg.stream_length; ++t) {
    const bool after_switch = cfg.switch_at && t >= *cfg.switch_at;
    const BaseNeuron* base = after_switch ? switched.data() : neurons.data();
    const int pick = pick_neuron(rng, cfg, zipf_cum);
    RawShape raw{};
    for (int f = 0; f < kShapeFeatures; ++f) {
      const double z = rng.next_normal();
      raw[f] = base[pick].features[f] +
               cfg.instance_dev * canonical.means[f] * z;
    }
    stream.labels.push_back(pick + 1);
    stream.raw.push_back(raw);
    stream.quantized.push_back(discretize(raw, canonical, window_dev));
  }
  return stream;
}

RawShape normalize(const RawShape& raw, const CanonicalShape& canonical,
                   double base_dev) {
  canonical.validate();
  if (!(base_dev > 0.0)) {
    throw std::invalid_argument("normalization needs base_dev > 0");
  }
  RawShape out{};
  for (int f = 0; f < kShapeFeatures; ++f) {
    const double sigma = base_dev * canonical.means[f];
    const double lo = canonical.means[f] - 3.0 * sigma;
    const double t = (raw[f] - lo) / (6.0 * sigma);
    const double scaled = 1.0 + t * (kQuantLevels - 1);
    out[f] = std::min(static_cast<double>(kQuantLevels), std::max(1.0, scaled));
  }
  return out;
}

FeatureVector discretize(const RawShape& raw, const CanonicalShape& canonical,
                         double base_dev) {
  const RawShape scaled = normalize(raw, canonical, base_dev);
  FeatureVector out(kShapeFeatures);
  for (int f = 0; f < kShapeFeatures; ++f) {
    const int v = static_cast<int>(std::floor(scaled[f] + 0.5));  // half-up
    out[f] = std::min(kQuantLevels, std::max(1, v));
  }
  return out;
}

void write_stream_csv(std::ostream& out, const LabeledStream& stream) {
  out << "step,true_neuron";
  for (int f = 1; f <= kShapeFeatures; ++f) out << ",f" << f;
  for (int f = 1; f <= kShapeFeatures; ++f) out << ",d" << f;
  out << "\n";
  char buf[32];
  for (std::size_t i = 0; i < stream.size(); ++i) {
    out << (i + 1) << ',' << stream.labels[i];
    for (double v : stream.raw[i]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    for (int v : stream.quantized[i]) {
      out << ',' << v;
    }
    out << "\n";
  }
}

}  // namespace ndsort
