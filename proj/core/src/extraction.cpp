#include "fsmx/extraction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "fsmx/error.hpp"
#include "fsmx/kmeans.hpp"

namespace fsmx {

using Eigen::VectorXd;

std::string to_string(Method m) {
  switch (m) {
    case Method::Quantization: return "quantization";
    case Method::Clustering: return "clustering";
    case Method::Lstar: return "lstar";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "quantization") return Method::Quantization;
  if (text == "clustering") return Method::Clustering;
  if (text == "lstar") return Method::Lstar;
  throw InvalidInput("unknown extraction method '" + std::string(text) + "'");
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

ExtractionResult extract_quantization(const StateMachineOracle& oracle, const ExtractionConfig& cfg) {
  if (cfg.resolution == 0) throw InvalidInput("quantization resolution must be >= 1");
  if (cfg.max_depth == 0) throw InvalidInput("BFS depth must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t k = oracle.num_symbols();
  const double q = static_cast<double>(cfg.resolution);

  auto cell_of = [&](const VectorXd& v) {
    const VectorXd u = oracle.unit_box(v);
    std::vector<std::uint32_t> key(static_cast<std::size_t>(u.size()));
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double x = std::floor(u(i) * q);
      key[static_cast<std::size_t>(i)] =
          static_cast<std::uint32_t>(std::clamp(x, 0.0, q - 1.0));
    }
    return key;
  };

  std::map<std::vector<std::uint32_t>, std::size_t> index;
  std::vector<VectorXd> witness;
  std::vector<std::size_t> depth;
  std::vector<std::vector<std::uint32_t>> keys;
  auto discover = [&](const VectorXd& v, std::size_t d) -> std::pair<std::size_t, bool> {
    auto key = cell_of(v);
    if (auto it = index.find(key); it != index.end()) return {it->second, false};
    if (witness.size() >= cfg.cell_cap)
      throw StateExplosion("quantization exceeded " + std::to_string(cfg.cell_cap) + " cells", witness.size());
    const std::size_t id = witness.size();
    index.emplace(key, id);
    keys.push_back(std::move(key));
    witness.push_back(v);
    depth.push_back(d);
    return {id, true};
  };

  std::size_t steps = 0;
  discover(oracle.initial(), 0);
  std::vector<std::size_t> delta;
  std::vector<std::pair<std::size_t, VectorXd>> frontier;  // (source slot, successor vector)
  for (std::size_t cur = 0; cur < witness.size(); ++cur) {
    delta.resize(witness.size() * k, 0);
    for (Symbol s = 0; s < k; ++s) {
      VectorXd next = oracle.step(witness[cur], s);
      ++steps;
      if (depth[cur] < cfg.max_depth) {
        delta[cur * k + s] = discover(next, depth[cur] + 1).first;
      } else {
        frontier.emplace_back(cur * k + s, std::move(next));
      }
    }
  }
  delta.resize(witness.size() * k, 0);
  // Successors beyond the depth bound land in their own cell when it was
  // discovered, otherwise in the cell with the nearest witness.
  std::vector<VectorXd> boxes;
  for (auto& [slot, next] : frontier) {
    if (auto it = index.find(cell_of(next)); it != index.end()) {
      delta[slot] = it->second;
      continue;
    }
    if (boxes.empty())
      for (const auto& w : witness) boxes.push_back(oracle.unit_box(w));
    delta[slot] = nearest_centroid(boxes, oracle.unit_box(next));
  }

  std::vector<bool> accepting(witness.size());
  for (std::size_t i = 0; i < witness.size(); ++i) accepting[i] = oracle.classify(witness[i]);
  Dfa raw(oracle.alphabet(), witness.size(), 0, std::move(delta), std::move(accepting));

  ExtractionResult r{minimize(raw), Method::Quantization, cfg};
  r.membership_queries = steps;
  r.abstract_states = witness.size();
  r.runtime_ms = elapsed_ms(start);
  return r;
}

ExtractionResult extract_clustering(const StateMachineOracle& oracle, const ExtractionConfig& cfg) {
  if (cfg.clusters == 0) throw InvalidInput("number of clusters must be >= 1");
  if (cfg.budget < cfg.clusters) throw InvalidInput("sample budget must be at least the number of clusters");
  if (cfg.max_depth == 0) throw InvalidInput("BFS depth must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t k = oracle.num_symbols();

  // Length-lex prefixes; each vector is one step from its parent's.
  std::vector<VectorXd> points{oracle.initial()};
  std::vector<std::size_t> parent{0};
  std::vector<std::size_t> depth{0};
  std::vector<std::size_t> child;  // child[i*k+s], or npos when not collected
  constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::size_t steps = 0;
  for (std::size_t cur = 0; cur < points.size(); ++cur) {
    child.resize(points.size() * k, npos);
    if (depth[cur] >= cfg.max_depth) continue;
    for (Symbol s = 0; s < k && points.size() < cfg.budget; ++s) {
      child[cur * k + s] = points.size();
      points.push_back(oracle.step(points[cur], s));
      parent.push_back(cur);
      depth.push_back(depth[cur] + 1);
      ++steps;
    }
  }
  child.resize(points.size() * k, npos);
  if (points.size() < cfg.clusters)
    throw InvalidInput("fewer distinct prefixes than clusters within the depth bound");

  const KMeansResult km = kmeans(points, cfg.clusters, cfg.seed);
  const std::size_t K = cfg.clusters;

  // Successor cluster for every (point, symbol).
  std::vector<std::size_t> members(K, 0);
  for (std::size_t c : km.assignment) ++members[c];
  std::vector<VectorXd> live_centroids;
  std::vector<std::size_t> live_ids;
  for (std::size_t c = 0; c < K; ++c)
    if (members[c] > 0) {
      live_centroids.push_back(km.centroids[c]);
      live_ids.push_back(c);
    }
  std::vector<std::vector<std::size_t>> counts(K * k, std::vector<std::size_t>(K, 0));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (Symbol s = 0; s < k; ++s) {
      std::size_t target;
      if (child[i * k + s] != npos) {
        target = km.assignment[child[i * k + s]];
      } else {
        target = live_ids[nearest_centroid(live_centroids, oracle.step(points[i], s))];
        ++steps;
      }
      ++counts[km.assignment[i] * k + s][target];
    }

  // Clusters without members are dropped; survivors are renumbered.
  std::vector<std::size_t> renumber(K, npos);
  for (std::size_t i = 0; i < live_ids.size(); ++i) renumber[live_ids[i]] = i;
  const std::size_t n = live_ids.size();
  std::vector<StateId> delta(n * k);
  ExtractionResult r{Dfa::trivial(oracle.alphabet(), false), Method::Clustering, cfg};
  for (std::size_t c : live_ids)
    for (Symbol s = 0; s < k; ++s) {
      const auto& row = counts[c * k + s];
      std::size_t best = 0;
      for (std::size_t t = 1; t < K; ++t)
        if (row[t] > row[best]) best = t;
      TransitionTally tally{renumber[c], s, renumber[best], {}};
      for (std::size_t t = 0; t < K; ++t)
        if (row[t] > 0) tally.targets.emplace_back(renumber[t], row[t]);
      if (tally.targets.size() > 1) ++r.conflicts_resolved;
      r.tallies.push_back(std::move(tally));
      delta[renumber[c] * k + s] = renumber[best];
    }

  std::vector<long> votes(K, 0);
  for (std::size_t i = 0; i < points.size(); ++i) votes[km.assignment[i]] += oracle.classify(points[i]) ? 1 : -1;
  std::vector<bool> accepting(n);
  for (std::size_t c : live_ids) accepting[renumber[c]] = votes[c] > 0;  // ties reject

  Dfa raw(oracle.alphabet(), n, renumber[km.assignment[0]], std::move(delta), std::move(accepting));
  r.dfa = minimize(raw);
  r.membership_queries = steps;
  r.abstract_states = n;
  r.runtime_ms = elapsed_ms(start);
  return r;
}

ExtractionResult extract(const StateMachineOracle& oracle, const ExtractionConfig& cfg) {
  switch (cfg.method) {
    case Method::Quantization: return extract_quantization(oracle, cfg);
    case Method::Clustering: return extract_clustering(oracle, cfg);
    case Method::Lstar: return extract_lstar(oracle, cfg);
  }
  throw InvalidInput("unknown extraction method");
}

AbstractionPartition::AbstractionPartition(std::size_t dim, std::size_t granularity) : dim_(dim), grid_(granularity) {
  if (granularity == 0) throw InvalidInput("partition granularity must be positive");
}

std::size_t AbstractionPartition::locate(const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != dim_) throw ShapeMismatch("point does not match the partition dimension");
  std::vector<std::size_t> cell(grid_ > 1 ? dim_ : 0);
  for (std::size_t i = 0; i < cell.size(); ++i) {
    const double c = std::floor(x(static_cast<Eigen::Index>(i)) * static_cast<double>(grid_));
    cell[i] = static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(grid_ - 1)));
  }
  auto [it, fresh] = roots_.emplace(std::move(cell), nodes_.size());
  if (fresh) {
    nodes_.emplace_back();
    ++leaves_;
  }
  std::size_t at = it->second;
  while (nodes_[at].axis >= 0) {
    const Node& n = nodes_[at];
    at = x(n.axis) < n.threshold ? n.low : n.high;
  }
  return at;
}

std::vector<std::size_t> AbstractionPartition::leaf_ids() const {
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].axis < 0) ids.push_back(i);
  return ids;
}

void AbstractionPartition::split_leaf(std::size_t leaf, std::size_t axis, double threshold) {
  if (leaf >= nodes_.size() || nodes_[leaf].axis >= 0) throw InvalidInput("not a leaf of the partition");
  if (axis >= dim_) throw InvalidInput("split axis out of range");
  const std::size_t low = nodes_.size();
  nodes_.emplace_back();
  nodes_.emplace_back();
  nodes_[leaf] = Node{static_cast<int>(axis), threshold, low, low + 1};
  ++leaves_;
}

bool AbstractionPartition::split(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const std::size_t leaf = locate(a);
  if (leaf != locate(b)) return false;
  Eigen::Index axis = 0;
  const double spread = (a - b).cwiseAbs().maxCoeff(&axis);
  if (spread == 0.0) return false;
  split_leaf(leaf, static_cast<std::size_t>(axis), (a(axis) + b(axis)) / 2.0);
  return true;
}

Json to_json(const ExtractionResult& r, bool with_timing) {
  Json j;
  j["dfa"] = to_json(r.dfa);
  j["method"] = to_string(r.method);
  Json cfg;
  cfg["seed"] = r.config.seed;
  cfg["max_depth"] = r.config.max_depth;
  switch (r.method) {
    case Method::Quantization:
      cfg["resolution"] = r.config.resolution;
      cfg["cell_cap"] = r.config.cell_cap;
      break;
    case Method::Clustering:
      cfg["clusters"] = r.config.clusters;
      cfg["budget"] = r.config.budget;
      break;
    case Method::Lstar:
      cfg["refinement_budget"] = r.config.refinement_budget;
      cfg["granularity"] = r.config.granularity;
      cfg["equivalence_words"] = r.config.equivalence_words;
      cfg["max_equivalence_queries"] = r.config.max_equivalence_queries;
      cfg["max_membership_queries"] = r.config.max_membership_queries;
      break;
  }
  j["config"] = cfg;
  j["runtime_ms"] = with_timing ? r.runtime_ms : 0.0;
  j["converged"] = r.converged;
  j["queries"] = {{"membership", r.membership_queries}, {"equivalence", r.equivalence_queries}};
  j["conflicts_resolved"] = r.conflicts_resolved;
  j["abstract_states"] = r.abstract_states;
  if (!r.hypothesis_sizes.empty()) j["hypothesis_sizes"] = r.hypothesis_sizes;
  return j;
}

}  // namespace fsmx
