#include <algorithm>
#include <chrono>
#include <deque>
#include <map>
#include <random>

#include "fsmx/error.hpp"
#include "fsmx/extraction.hpp"

namespace fsmx {

using Eigen::VectorXd;

namespace {

struct BudgetExhausted {};

class ObservationTable {
 public:
  ObservationTable(const StateMachineOracle& oracle, std::size_t max_queries)
      : oracle_(oracle), max_queries_(max_queries), S_{Word{}}, E_{Word{}} {}

  bool query(const Word& w) {
    if (auto it = cache_.find(w); it != cache_.end()) return it->second;
    if (queries_ >= max_queries_) throw BudgetExhausted{};
    ++queries_;
    const bool label = oracle_.membership(w);
    cache_.emplace(w, label);
    return label;
  }

  // Same as query(w), reusing the oracle state already reached by w.
  bool query(const Word& w, const VectorXd& state) {
    if (auto it = cache_.find(w); it != cache_.end()) return it->second;
    if (queries_ >= max_queries_) throw BudgetExhausted{};
    ++queries_;
    const bool label = oracle_.classify(state);
    cache_.emplace(w, label);
    return label;
  }

  std::vector<bool> row(const Word& prefix) {
    std::vector<bool> r;
    r.reserve(E_.size());
    for (const auto& e : E_) {
      Word w = prefix;
      w.insert(w.end(), e.begin(), e.end());
      r.push_back(query(w));
    }
    return r;
  }

  // Adds S·Σ rows missing from S until closed. Rows of S stay pairwise
  // distinct, so the table is always consistent.
  void close(std::size_t max_states) {
    const std::size_t k = oracle_.num_symbols();
    std::map<std::vector<bool>, std::size_t> seen;
    rows_.clear();
    for (std::size_t i = 0; i < S_.size(); ++i) {
      rows_.push_back(row(S_[i]));
      seen.emplace(rows_.back(), i);
    }
    for (std::size_t i = 0; i < S_.size(); ++i)
      for (Symbol s = 0; s < k; ++s) {
        Word next = S_[i];
        next.push_back(s);
        auto r = row(next);
        if (seen.count(r)) continue;
        if (S_.size() >= max_states) throw BudgetExhausted{};
        S_.push_back(std::move(next));
        rows_.push_back(r);
        seen.emplace(std::move(r), S_.size() - 1);
      }
    index_ = std::move(seen);
  }

  Dfa hypothesis() {
    const std::size_t k = oracle_.num_symbols();
    std::vector<StateId> delta(S_.size() * k);
    std::vector<bool> accepting(S_.size());
    for (std::size_t i = 0; i < S_.size(); ++i) {
      accepting[i] = rows_[i][0];
      for (Symbol s = 0; s < k; ++s) {
        Word next = S_[i];
        next.push_back(s);
        delta[i * k + s] = index_.at(row(next));
      }
    }
    return Dfa(oracle_.alphabet(), S_.size(), 0, std::move(delta), std::move(accepting));
  }

  // Maler–Pnueli: every suffix of the counterexample becomes an experiment.
  void add_counterexample(const Word& w) {
    for (std::size_t i = 0; i <= w.size(); ++i) {
      Word suffix(w.begin() + static_cast<std::ptrdiff_t>(i), w.end());
      if (std::find(E_.begin(), E_.end(), suffix) == E_.end()) E_.push_back(std::move(suffix));
    }
  }

  // An experiment on which the rows of states a and b differ.
  const Word& separator(StateId a, StateId b) const {
    for (std::size_t j = 0; j < E_.size(); ++j)
      if (rows_[a][j] != rows_[b][j]) return E_[j];
    return E_[0];
  }

  std::size_t queries() const noexcept { return queries_; }

 private:
  const StateMachineOracle& oracle_;
  std::size_t max_queries_;
  std::size_t queries_ = 0;
  std::vector<Word> S_;
  std::vector<Word> E_;
  std::vector<std::vector<bool>> rows_;
  std::map<std::vector<bool>, std::size_t> index_;
  std::map<Word, bool> cache_;
};

Word append(Word w, const Word& tail) {
  w.insert(w.end(), tail.begin(), tail.end());
  return w;
}

}  // namespace

ExtractionResult extract_lstar(const StateMachineOracle& oracle, const ExtractionConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t k = oracle.num_symbols();
  ObservationTable table(oracle, cfg.max_membership_queries);
  ExtractionResult r{Dfa::trivial(oracle.alphabet(), oracle.classify(oracle.initial())), Method::Lstar, cfg};
  r.converged = false;

  // The abstraction lives in the unit box when the oracle has one.
  bool bounded = true;
  try {
    oracle.unit_box(oracle.initial());
  } catch (const InvalidInput&) {
    bounded = false;
  }
  auto coords = [&](const VectorXd& v) { return bounded ? oracle.unit_box(v) : v; };
  AbstractionPartition partition(static_cast<std::size_t>(oracle.initial().size()), bounded ? cfg.granularity : 1);
  std::size_t refinements = 0;
  std::mt19937_64 rng(cfg.seed);

  // Searches for a word on which `h` and the oracle disagree.
  auto equivalence = [&](const Dfa& h) -> std::optional<Word> {
    struct Visit {
      StateId q;
      Word w;
      VectorXd x;
    };
    bool explore = true;
    while (explore) {
      explore = false;
      std::map<std::pair<std::size_t, bool>, Visit> visited;
      std::deque<std::tuple<Word, VectorXd, StateId>> queue;
      queue.emplace_back(Word{}, oracle.initial(), h.initial());
      while (!queue.empty()) {
        auto [w, v, q] = std::move(queue.front());
        queue.pop_front();
        const bool label = table.query(w, v);
        if (label != h.accepting(q)) return w;
        const VectorXd x = coords(v);
        const auto key = std::make_pair(partition.locate(x), label);
        if (auto it = visited.find(key); it != visited.end()) {
          if (it->second.q == q) continue;
          // Abstraction merges two words the hypothesis separates.
          const Word& e = table.separator(it->second.q, q);
          const Word w1 = append(it->second.w, e);
          const Word w2 = append(w, e);
          if (table.query(w1) != h.run(w1)) return w1;
          if (table.query(w2) != h.run(w2)) return w2;
          if (refinements < cfg.refinement_budget && partition.split(it->second.x, x)) {
            ++refinements;
            ++r.conflicts_resolved;
            explore = true;
          }
          break;
        }
        visited.emplace(key, Visit{q, w, x});
        for (Symbol s = 0; s < k; ++s) {
          Word next = w;
          next.push_back(s);
          queue.emplace_back(std::move(next), oracle.step(v, s), h.next(q, s));
        }
      }
    }
    // Random words of length ≤ 2|H|.
    for (std::size_t i = 0; i < cfg.equivalence_words; ++i) {
      const Word w = uniform_word(rng, k, 2 * h.size());
      if (table.query(w) != h.run(w)) return w;
    }
    return std::nullopt;
  };

  try {
    while (true) {
      table.close(cfg.max_states);
      Dfa h = table.hypothesis();
      r.hypothesis_sizes.push_back(h.size());
      r.dfa = minimize(h);
      if (r.equivalence_queries >= cfg.max_equivalence_queries) break;
      ++r.equivalence_queries;
      auto cex = equivalence(h);
      if (!cex) {
        r.converged = true;
        break;
      }
      table.add_counterexample(*cex);
    }
  } catch (const BudgetExhausted&) {
    r.converged = false;
  }
  r.membership_queries = table.queries();
  r.abstract_states = partition.leaves();
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace fsmx
