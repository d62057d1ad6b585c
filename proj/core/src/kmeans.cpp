#include "fsmx/kmeans.hpp"

#include <limits>
#include <random>

#include "fsmx/error.hpp"

namespace fsmx {

std::size_t nearest_centroid(const std::vector<Eigen::VectorXd>& centroids, const Eigen::VectorXd& x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = (centroids[c] - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

KMeansResult kmeans(const std::vector<Eigen::VectorXd>& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter) {
  if (k == 0) throw InvalidInput("k-means needs k >= 1");
  if (k > points.size()) throw InvalidInput("k-means needs at least k points");
  const std::size_t n = points.size();
  std::mt19937_64 rng(seed);

  KMeansResult out;
  std::vector<bool> chosen(n, false);
  std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  out.centroids.push_back(points[first]);
  chosen[first] = true;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = (points[i] - points[first]).squaredNorm();
  while (out.centroids.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        pick = i;
        if (u < d2[i]) break;
        u -= d2[i];
      }
    } else {
      // Only duplicates remain: take the first unused point.
      for (std::size_t i = 0; i < n && pick == n; ++i)
        if (!chosen[i]) pick = i;
    }
    chosen[pick] = true;
    out.centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], (points[i] - points[pick]).squaredNorm());
  }

  out.assignment.assign(n, k);
  for (std::size_t it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = nearest_centroid(out.centroids, points[i]);
      if (c != out.assignment[i]) {
        out.assignment[i] = c;
        changed = true;
      }
    }
    out.iterations = it + 1;
    if (!changed) break;

    std::vector<Eigen::VectorXd> sums(k, Eigen::VectorXd::Zero(points[0].size()));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[out.assignment[i]] += points[i];
      ++counts[out.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        out.centroids[c] = sums[c] / static_cast<double>(counts[c]);
        continue;
      }
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = (points[i] - out.centroids[out.assignment[i]]).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      // Nothing to split off when every point sits on its centroid.
      if (far_d > 0.0) out.centroids[c] = points[far];
    }
  }
  return out;
}

}  // namespace fsmx
