#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace fsmx {

struct KMeansResult {
  std::vector<std::size_t> assignment;
  std::vector<Eigen::VectorXd> centroids;
  std::size_t iterations = 0;
};

// k-means++ seeding from mt19937_64(seed), then Lloyd iterations until the
// assignment stops changing or `max_iter` is hit. A cluster that empties is
// reseeded at the point farthest from its current centroid (left empty when
// all points coincide with their centroids). Distance ties go
// to the lower cluster index. Throws InvalidInput when k is 0 or exceeds the
// number of points.
KMeansResult kmeans(const std::vector<Eigen::VectorXd>& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter = 300);

std::size_t nearest_centroid(const std::vector<Eigen::VectorXd>& centroids, const Eigen::VectorXd& x);

}  // namespace fsmx
