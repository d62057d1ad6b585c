#include "fsmx/dfa.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "fsmx/error.hpp"

namespace fsmx {

Dfa::Dfa(Alphabet alphabet, std::size_t num_states, StateId initial,
         std::vector<StateId> delta, std::vector<bool> accepting)
    : alphabet_(std::move(alphabet)),
      num_states_(num_states),
      initial_(initial),
      delta_(std::move(delta)),
      accepting_(std::move(accepting)) {
  if (alphabet_.empty()) throw InvalidInput("DFA alphabet must be nonempty");
  if (num_states_ == 0) throw InvalidInput("DFA must have at least one state");
  if (initial_ >= num_states_) throw InvalidInput("DFA initial state out of range");
  if (delta_.size() != num_states_ * alphabet_.size())
    throw InvalidInput("DFA transition table is not total over states x symbols");
  if (accepting_.size() != num_states_)
    throw InvalidInput("DFA accepting vector has wrong length");
  for (StateId t : delta_)
    if (t >= num_states_) throw InvalidInput("DFA transition target out of range");
}

Dfa Dfa::trivial(Alphabet alphabet, bool accept) {
  const std::size_t k = alphabet.size();
  return Dfa(std::move(alphabet), 1, 0, std::vector<StateId>(k, 0), {accept});
}

StateId Dfa::walk(const Word& w, StateId from) const {
  const std::size_t k = num_symbols();
  StateId q = from;
  for (Symbol s : w) {
    if (s >= k) throw InvalidInput("word contains a symbol outside the DFA alphabet");
    q = delta_[q * k + s];
  }
  return q;
}

Dfa trim_unreachable(const Dfa& dfa) {
  const std::size_t k = dfa.num_symbols();
  constexpr StateId kUnseen = static_cast<StateId>(-1);
  std::vector<StateId> renumber(dfa.size(), kUnseen);
  std::vector<StateId> order;
  std::deque<StateId> queue{dfa.initial()};
  renumber[dfa.initial()] = 0;
  order.push_back(dfa.initial());
  while (!queue.empty()) {
    StateId q = queue.front();
    queue.pop_front();
    for (Symbol s = 0; s < k; ++s) {
      StateId t = dfa.next(q, s);
      if (renumber[t] == kUnseen) {
        renumber[t] = order.size();
        order.push_back(t);
        queue.push_back(t);
      }
    }
  }
  std::vector<StateId> delta(order.size() * k);
  std::vector<bool> accepting(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    accepting[i] = dfa.accepting(order[i]);
    for (Symbol s = 0; s < k; ++s) delta[i * k + s] = renumber[dfa.next(order[i], s)];
  }
  return Dfa(dfa.alphabet(), order.size(), 0, std::move(delta), std::move(accepting));
}

Dfa minimize(const Dfa& input) {
  // Moore-style partition refinement on the reachable part.
  const Dfa dfa = trim_unreachable(input);
  const std::size_t n = dfa.size();
  const std::size_t k = dfa.num_symbols();

  std::vector<std::size_t> block(n);
  for (StateId q = 0; q < n; ++q) block[q] = dfa.accepting(q) ? 1 : 0;
  std::size_t num_blocks = 0;
  {
    // Normalize so that block ids are dense.
    bool has_acc = std::any_of(block.begin(), block.end(), [](auto b) { return b == 1; });
    bool has_rej = std::any_of(block.begin(), block.end(), [](auto b) { return b == 0; });
    if (has_acc && !has_rej) std::fill(block.begin(), block.end(), 0);
    num_blocks = (has_acc && has_rej) ? 2 : 1;
  }

  for (;;) {
    std::map<std::vector<std::size_t>, std::size_t> signatures;
    std::vector<std::size_t> refined(n);
    std::vector<std::size_t> sig(k + 1);
    for (StateId q = 0; q < n; ++q) {
      sig[0] = block[q];
      for (Symbol s = 0; s < k; ++s) sig[s + 1] = block[dfa.next(q, s)];
      auto [it, inserted] = signatures.emplace(sig, signatures.size());
      refined[q] = it->second;
    }
    const std::size_t count = signatures.size();
    block.swap(refined);
    if (count == num_blocks) break;
    num_blocks = count;
  }

  std::vector<StateId> delta(num_blocks * k);
  std::vector<bool> accepting(num_blocks);
  for (StateId q = 0; q < n; ++q) {
    accepting[block[q]] = dfa.accepting(q);
    for (Symbol s = 0; s < k; ++s) delta[block[q] * k + s] = block[dfa.next(q, s)];
  }
  return trim_unreachable(
      Dfa(dfa.alphabet(), num_blocks, block[dfa.initial()], std::move(delta), std::move(accepting)));
}

std::optional<Word> find_counterexample(const Dfa& a, const Dfa& b) {
  if (!(a.alphabet() == b.alphabet()))
    throw InvalidInput("cannot compare automata over different alphabets");
  const std::size_t k = a.num_symbols();
  const std::size_t nb = b.size();
  struct Parent {
    std::size_t pair;
    Symbol symbol;
  };
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::unordered_map<std::size_t, Parent> parent;
  auto encode = [nb](StateId p, StateId q) { return p * nb + q; };

  const std::size_t start = encode(a.initial(), b.initial());
  parent.emplace(start, Parent{kNone, 0});
  std::deque<std::size_t> queue{start};
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const StateId p = cur / nb, q = cur % nb;
    if (a.accepting(p) != b.accepting(q)) {
      Word w;
      for (std::size_t node = cur; parent.at(node).pair != kNone; node = parent.at(node).pair)
        w.push_back(parent.at(node).symbol);
      std::reverse(w.begin(), w.end());
      return w;
    }
    for (Symbol s = 0; s < k; ++s) {
      const std::size_t nxt = encode(a.next(p, s), b.next(q, s));
      if (parent.emplace(nxt, Parent{cur, s}).second) queue.push_back(nxt);
    }
  }
  return std::nullopt;
}

bool isomorphic(const Dfa& a, const Dfa& b) { return trim_unreachable(a) == trim_unreachable(b); }

std::map<StateId, Word> nerode_prefixes(const Dfa& dfa) {
  const std::size_t k = dfa.num_symbols();
  std::map<StateId, Word> access;
  std::deque<StateId> queue{dfa.initial()};
  access.emplace(dfa.initial(), Word{});
  while (!queue.empty()) {
    const StateId q = queue.front();
    queue.pop_front();
    for (Symbol s = 0; s < k; ++s) {
      const StateId t = dfa.next(q, s);
      if (access.count(t)) continue;
      Word w = access.at(q);
      w.push_back(s);
      access.emplace(t, std::move(w));
      queue.push_back(t);
    }
  }
  return access;
}

}  // namespace fsmx
