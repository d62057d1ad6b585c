#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "fsmx/alphabet.hpp"
#include "fsmx/wfa.hpp"

namespace fsmx {

struct ScoredWord {
  Word word;
  double prob;
};

// A probability distribution over Σ* used as the sampling oracle.
class ReferenceLm {
 public:
  virtual ~ReferenceLm() = default;

  virtual const Alphabet& alphabet() const = 0;
  virtual Word sample(std::mt19937_64& rng) const = 0;
  virtual double prob(const Word& w) const = 0;
  // The `count` most probable words outside `history`, in nonincreasing
  // probability. Throws InvalidInput when fewer than `count` words of
  // positive probability remain.
  virtual std::vector<ScoredWord> most_probable(const std::set<Word>& history, std::size_t count) const = 0;
  // Finite support as (word, probability) pairs, or nullopt.
  virtual std::optional<std::vector<ScoredWord>> support() const { return std::nullopt; }
};

class FiniteSupportLm final : public ReferenceLm {
 public:
  // Probabilities are normalized to sum to 1; zero entries are dropped.
  FiniteSupportLm(Alphabet alphabet, std::map<Word, double> weights);

  // Empirical distribution of a multiset of words.
  static FiniteSupportLm empirical(Alphabet alphabet, const std::vector<Word>& words);
  // Uniform over Σ^{≤max_len}.
  static FiniteSupportLm uniform(Alphabet alphabet, std::size_t max_len);

  const Alphabet& alphabet() const override { return alphabet_; }
  Word sample(std::mt19937_64& rng) const override;
  double prob(const Word& w) const override;
  std::vector<ScoredWord> most_probable(const std::set<Word>& history, std::size_t count) const override;
  std::optional<std::vector<ScoredWord>> support() const override;

 private:
  Alphabet alphabet_;
  std::vector<ScoredWord> ranked_;  // nonincreasing, ties length-lex
  std::map<Word, double> probs_;
  std::vector<double> cumulative_;
};

// Deterministic PFA. Prefix masses come from s = (I − M)^{-1} f with
// M = Σ_σ A_σ, which needs the automaton to be consistent.
class DpfaLm final : public ReferenceLm {
 public:
  explicit DpfaLm(Pfa pfa);

  const Pfa& pfa() const noexcept { return pfa_; }
  const Alphabet& alphabet() const override { return pfa_.alphabet(); }
  Word sample(std::mt19937_64& rng) const override;
  double prob(const Word& w) const override { return pfa_.weight(w); }
  // Total probability of words starting with `prefix`.
  double prefix_mass(const Word& prefix) const;
  // Best-first over the prefix tree ordered by prefix mass; exact.
  std::vector<ScoredWord> most_probable(const std::set<Word>& history, std::size_t count) const override;

 private:
  Pfa pfa_;
  Eigen::VectorXd suffix_mass_;
  // For sampling: per state, outgoing (symbol or end, target, weight).
  std::vector<std::vector<std::tuple<std::size_t, std::size_t, double>>> moves_;
};

// Random DPFA with `n` states: a random total transition function and
// per-state distributions with stop probability at least `min_stop`.
Pfa random_dpfa(std::mt19937_64& rng, std::size_t n, const Alphabet& alphabet, double min_stop = 0.1);

}  // namespace fsmx
