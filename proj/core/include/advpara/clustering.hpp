#pragma once

#include <cstddef>
#include <vector>

#include "advpara/config.hpp"

namespace advpara::clustering {

using Points = std::vector<std::vector<double>>;

struct Result {
  std::vector<int> labels;  // cluster index per point, -1 for noise
  std::size_t num_clusters = 0;
  std::size_t num_noise = 0;
};

// Hierarchical density-based clustering (HDBSCAN) with Euclidean distances,
// excess-of-mass cluster selection, and points that belong to no selected
// cluster reported as noise.
Result hdbscan(const Points& points, std::size_t min_cluster_size, std::size_t min_samples,
               bool allow_single_cluster);

// Projection onto the top principal components, signs fixed so the largest
// loading of each component is positive.
Points pca_reduce(const Points& points, std::size_t dims);

// Reduces only when both the dimension and the point count exceed the
// configured limits, then clusters.
Result cluster(const Points& points, const ClusteringConfig& cfg);

}  // namespace advpara::clustering
