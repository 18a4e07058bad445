#pragma once

#include <span>
#include <vector>

#include "ndsort/synth.hpp"

namespace ndsort {

struct KMeansConfig {
  // Lloyd iterations stop once this fraction of points keeps its nearest
  // centroid from one iteration to the next.
  double min_convergence = 0.99;
  int max_iters = 100;  // safety cap against non-convergence
};

struct KMeansModel {
  std::vector<RawShape> centroids;
  int iterations_used = 0;
  double final_convergence = 0.0;
  bool converged = false;  // final_convergence >= min_convergence at stop
  std::vector<double> wcss_history;  // within-cluster sum of squares per iteration
};

// Lloyd's algorithm from the given initial centroids. Nearest-centroid is
// squared Euclidean with ties to the lowest centroid index; a centroid
// whose cluster empties keeps its previous position for that iteration.
KMeansModel kmeans_fit(std::span<const RawShape> train,
                       std::vector<RawShape> initial_centroids,
                       const KMeansConfig& cfg = {});

// Single-pass nearest-centroid labeling, 1-based cids. No centroid moves.
std::vector<int> kmeans_assign(const KMeansModel& model,
                               std::span<const RawShape> data);

}  // namespace ndsort
