#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fsmx/automata_io.hpp"
#include "fsmx/dfa.hpp"
#include "fsmx/oracle.hpp"

namespace fsmx {

enum class Method { Quantization, Clustering, Lstar };

std::string to_string(Method m);
Method parse_method(std::string_view text);

struct ExtractionConfig {
  Method method = Method::Lstar;
  std::uint64_t seed = 42;
  std::size_t max_depth = 10;

  // quantization
  std::size_t resolution = 2;
  std::size_t cell_cap = 100000;

  // clustering
  std::size_t clusters = 15;
  std::size_t budget = 2000;

  // lstar
  std::size_t refinement_budget = 1000;
  std::size_t granularity = 2;  // initial cells per axis of the unit box
  std::size_t equivalence_words = 1000;  // random words of length ≤ 2|H| per query
  std::size_t max_equivalence_queries = 200;
  std::size_t max_membership_queries = 2000000;
  std::size_t max_states = 200;
};

// Per (cluster, symbol): how many observed transitions went to each target.
struct TransitionTally {
  std::size_t cluster;
  Symbol symbol;
  std::size_t chosen;
  std::vector<std::pair<std::size_t, std::size_t>> targets;  // (cluster, count)
};

struct ExtractionResult {
  ExtractionResult(Dfa d, Method m, ExtractionConfig c) : dfa(std::move(d)), method(m), config(c) {}

  Dfa dfa;
  Method method;
  ExtractionConfig config;
  double runtime_ms = 0.0;
  bool converged = true;
  std::size_t membership_queries = 0;
  std::size_t equivalence_queries = 0;
  std::size_t conflicts_resolved = 0;
  std::size_t abstract_states = 0;  // quantization cells, clusters kept, or partition leaves
  std::vector<std::size_t> hypothesis_sizes;
  std::vector<TransitionTally> tallies;
};

// BFS over grid cells of side 1/q inside oracle.unit_box. Throws
// StateExplosion once more than cfg.cell_cap cells are discovered.
ExtractionResult extract_quantization(const StateMachineOracle& oracle, const ExtractionConfig& cfg);

// k-means over hidden vectors of length-lex prefixes (at most cfg.budget
// prefixes of length ≤ cfg.max_depth), majority transitions and labels.
ExtractionResult extract_clustering(const StateMachineOracle& oracle, const ExtractionConfig& cfg);

// L* with a refinable abstraction of the oracle's state space answering
// equivalence queries, backed by random words of length ≤ 2|H|. Budget
// exhaustion yields converged = false.
ExtractionResult extract_lstar(const StateMachineOracle& oracle, const ExtractionConfig& cfg);

ExtractionResult extract(const StateMachineOracle& oracle, const ExtractionConfig& cfg);

// Partition of R^d: a uniform grid of `granularity` cells per axis over
// the unit box, each cell refined by its own axis-aligned k-d tree. Grid
// cells are created on first visit. Leaves are the abstract states.
class AbstractionPartition {
 public:
  explicit AbstractionPartition(std::size_t dim, std::size_t granularity = 1);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t granularity() const noexcept { return grid_; }
  // Leaves materialized so far.
  std::size_t leaves() const noexcept { return leaves_; }
  std::vector<std::size_t> leaf_ids() const;
  // Stable id of the leaf containing x (a node index).
  std::size_t locate(const Eigen::VectorXd& x);
  // Splits the leaf containing both points along the coordinate where they
  // differ most, at the midpoint. Returns false when the points coincide or
  // already lie in different leaves.
  bool split(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
  // Splits `leaf` at `threshold` along `axis`.
  void split_leaf(std::size_t leaf, std::size_t axis, double threshold);

 private:
  struct Node {
    int axis = -1;  // leaf when negative
    double threshold = 0.0;
    std::size_t low = 0;
    std::size_t high = 0;
  };
  std::size_t dim_;
  std::size_t grid_;
  std::vector<Node> nodes_;
  std::map<std::vector<std::size_t>, std::size_t> roots_;
  std::size_t leaves_ = 0;
};

Json to_json(const ExtractionResult& r, bool with_timing = true);

}  // namespace fsmx
