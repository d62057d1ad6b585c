#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "fsmx/alphabet.hpp"

namespace fsmx {

using StateId = std::size_t;

// Complete deterministic automaton. Transitions are stored densely,
// row-major by state: delta[q * |Σ| + σ].
class Dfa {
 public:
  Dfa(Alphabet alphabet, std::size_t num_states, StateId initial,
      std::vector<StateId> delta, std::vector<bool> accepting);

  // Single-state automaton accepting everything or nothing.
  static Dfa trivial(Alphabet alphabet, bool accept);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t num_symbols() const noexcept { return alphabet_.size(); }
  std::size_t size() const noexcept { return num_states_; }
  StateId initial() const noexcept { return initial_; }
  StateId next(StateId q, Symbol s) const { return delta_[q * num_symbols() + s]; }
  bool accepting(StateId q) const { return accepting_[q]; }
  const std::vector<StateId>& delta() const noexcept { return delta_; }
  const std::vector<bool>& accepting_states() const noexcept { return accepting_; }

  // State reached from `from` after reading w. Throws InvalidInput on
  // symbols outside the alphabet.
  StateId walk(const Word& w, StateId from) const;
  StateId walk(const Word& w) const { return walk(w, initial_); }
  bool run(const Word& w) const { return accepting_[walk(w)]; }

  friend bool operator==(const Dfa&, const Dfa&) = default;

 private:
  Alphabet alphabet_;
  std::size_t num_states_;
  StateId initial_;
  std::vector<StateId> delta_;
  std::vector<bool> accepting_;
};

// Minimal complete DFA for the same language, states numbered in BFS order
// from the initial state (symbols visited in alphabet order). Two
// language-equivalent inputs therefore minimize to identical objects.
Dfa minimize(const Dfa& dfa);

// Removes unreachable states; numbering is BFS order as above.
Dfa trim_unreachable(const Dfa& dfa);

// nullopt when equivalent; otherwise a shortest, length-lex least word on
// which the two automata disagree. Throws InvalidInput on alphabet mismatch.
std::optional<Word> find_counterexample(const Dfa& a, const Dfa& b);

inline bool equivalent(const Dfa& a, const Dfa& b) { return !find_counterexample(a, b); }

// Structural identity up to state renaming, for reachable parts.
bool isomorphic(const Dfa& a, const Dfa& b);

// For each reachable state, its length-lex least access word.
std::map<StateId, Word> nerode_prefixes(const Dfa& dfa);

}  // namespace fsmx
