#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ndsort/dendrite.hpp"

namespace ndsort {

inline constexpr int kShapeFeatures = 6;
inline constexpr int kQuantLevels = 32;

using RawShape = std::array<double, kShapeFeatures>;

// Per-feature means of the canonical spike shape. All deviations in the
// generator are relative to these means, and discretization renormalizes
// per feature, so downstream accuracy results do not depend on the
// particular magnitudes chosen here.
struct CanonicalShape {
  RawShape means;

  static CanonicalShape defaults() {
    // Voltage magnitudes at six characteristic points of the waveform
    // (trough, rebound, and the slopes between them), all in the same
    // unit. Deviations are relative to the means and the quantizer
    // renormalizes per feature, so the dendrite and discretized
    // pipelines are exactly invariant to these values. Unnormalized
    // Euclidean distance in the float k-means baseline weights feature
    // j by mean_j squared, so the means are kept within a few percent
    // of each other to give all six features equal say there too.
    return CanonicalShape{{80.0, 80.6, 79.4, 81.2, 78.8, 80.3}};
  }

  void validate() const;  // throws std::invalid_argument
};

struct BaseNeuron {
  int id = 0;  // 1-based label
  RawShape features{};
};

enum class RateModel { kUniform, kZipf };

struct GeneratorConfig {
  int neuron_count = 8;
  double base_dev = 0.375;        // sigma / mean for base-neuron draws
  double instance_dev = 2.0 / 16; // sigma / canonical mean for spike draws
  RateModel rate = RateModel::kUniform;
  double zipf_exponent = 1.0;     // P(neuron i) proportional to 1 / i^s
  int stream_length = 10000;
  std::uint64_t seed = 1;         // selection + instance draw stream
  // Adaptability scenario: from this step on, an independent base-neuron
  // set generated from switch_seed replaces the original one.
  std::optional<int> switch_at;
  std::uint64_t switch_seed = 0;
  // Deviation that sizes the quantizer window; 0 picks
  // quant_window_dev(base_dev, instance_dev).
  double window_dev = 0.0;

  double resolved_window_dev() const;
  void validate() const;
};

// Window deviation that makes the +-3 sigma quantizer range cover the
// spread of the streamed features themselves: base neurons reach +-3
// base deviations from the canonical means and instances another +-3
// instance deviations beyond that.
double quant_window_dev(double base_dev, double instance_dev);

// A generated stream, kept as parallel arrays: 1-based true labels, the
// raw 6-feature instances, and their discretized [1, 32] form.
struct LabeledStream {
  std::vector<int> labels;
  std::vector<RawShape> raw;
  std::vector<FeatureVector> quantized;

  std::size_t size() const { return labels.size(); }
};

// N base neurons, feature j of neuron i ~ Normal(mean_j, (base_dev*mean_j)^2).
// Draw order is neuron-major, feature-minor. base_dev = 0 copies the
// canonical shape exactly.
std::vector<BaseNeuron> gen_base_neurons(const CanonicalShape& canonical,
                                         int count, double base_dev,
                                         std::uint64_t seed);

// Streams cfg.stream_length spikes. Each step draws the emitting neuron
// (one uniform integer draw in uniform mode, one unit draw in zipf mode),
// then 6 normals for the instance: feature j ~ Normal(neuron_j,
// (instance_dev * canonical_mean_j)^2). Quantized forms use discretize().
LabeledStream gen_stream(const CanonicalShape& canonical,
                         std::span<const BaseNeuron> neurons,
                         const GeneratorConfig& cfg);

// Continuous normalization: feature j maps linearly from
// [mean_j - 3*sigma_j, mean_j + 3*sigma_j] (sigma_j = base_dev * mean_j)
// onto the real interval [1, 32], clamping outliers to the endpoints.
RawShape normalize(const RawShape& raw, const CanonicalShape& canonical,
                   double base_dev);

// normalize() rounded half-up onto the integer grid [1, 32]. A raw value
// exactly at the mean lands on 17.
FeatureVector discretize(const RawShape& raw, const CanonicalShape& canonical,
                         double base_dev);

// CSV with header: step,true_neuron,f1..f6,d1..d6. Byte-identical for a
// fixed (seed, config).
void write_stream_csv(std::ostream& out, const LabeledStream& stream);

}  // namespace ndsort
