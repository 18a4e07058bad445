#include "ndsort/kmeans.hpp"

#include <limits>
#include <stdexcept>

namespace ndsort {

namespace {

double sq_dist(const RawShape& a, const RawShape& b) {
  double d = 0.0;
  for (int f = 0; f < kShapeFeatures; ++f) {
    const double diff = a[f] - b[f];
    d += diff * diff;
  }
  return d;
}

int nearest(const std::vector<RawShape>& centroids, const RawShape& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = sq_dist(centroids[c], x);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

KMeansModel kmeans_fit(std::span<const RawShape> train,
                       std::vector<RawShape> initial_centroids,
                       const KMeansConfig& cfg) {
  if (train.empty()) throw std::invalid_argument("empty training set");
  if (initial_centroids.empty()) throw std::invalid_argument("need >= 1 centroid");
  if (!(cfg.min_convergence > 0.0) || cfg.min_convergence > 1.0) {
    throw std::invalid_argument("min_convergence must be in (0, 1]");
  }
  if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");

  KMeansModel model;
  model.centroids = std::move(initial_centroids);
  const int k = static_cast<int>(model.centroids.size());

  std::vector<int> assignment(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    assignment[i] = nearest(model.centroids, train[i]);
  }

  while (model.iterations_used < cfg.max_iters) {
    // Recompute centroids as component-wise means of their members.
    std::vector<RawShape> sums(k, RawShape{});
    std::vector<std::int64_t> sizes(k, 0);
    for (std::size_t i = 0; i < train.size(); ++i) {
      for (int f = 0; f < kShapeFeatures; ++f) {
        sums[assignment[i]][f] += train[i][f];
      }
      ++sizes[assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;  // empty cluster keeps its old centroid
      for (int f = 0; f < kShapeFeatures; ++f) {
        model.centroids[c][f] = sums[c][f] / static_cast<double>(sizes[c]);
      }
    }
    ++model.iterations_used;

    std::size_t unchanged = 0;
    double wcss = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const int next = nearest(model.centroids, train[i]);
      unchanged += next == assignment[i];
      assignment[i] = next;
      wcss += sq_dist(model.centroids[next], train[i]);
    }
    model.wcss_history.push_back(wcss);
    model.final_convergence =
        static_cast<double>(unchanged) / static_cast<double>(train.size());
    if (model.final_convergence >= cfg.min_convergence) {
      model.converged = true;
      break;
    }
  }
  return model;
}

std::vector<int> kmeans_assign(const KMeansModel& model,
                               std::span<const RawShape> data) {
  if (model.centroids.empty()) throw std::invalid_argument("model not fitted");
  std::vector<int> cids;
  cids.reserve(data.size());
  for (const RawShape& x : data) {
    cids.push_back(nearest(model.centroids, x) + 1);
  }
  return cids;
}

}  // namespace ndsort
