#include "fsmx/rpni.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "fsmx/error.hpp"

namespace fsmx {

namespace {

constexpr int kUnknown = -1;
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Prefix-tree acceptor whose nodes are numbered in length-lex order of
// their access words, with an undo log so failed merges roll back cheaply.
class Folding {
 public:
  Folding(const LabeledSample& sample, std::size_t k) : k_(k) {
    // Insert words sorted so node ids follow length-lex order.
    std::vector<const LabeledItem*> items;
    for (const auto& it : sample.items) items.push_back(&it);
    std::stable_sort(items.begin(), items.end(), [](const LabeledItem* a, const LabeledItem* b) {
      return a->word.size() != b->word.size() ? a->word.size() < b->word.size() : a->word < b->word;
    });
    add_node();
    std::map<Word, std::size_t> index{{Word{}, 0}};
    // BFS over all prefixes in length-lex order.
    std::map<std::pair<std::size_t, Word>, bool> prefixes;
    for (const auto* it : items)
      for (std::size_t l = 1; l <= it->word.size(); ++l)
        prefixes.emplace(std::make_pair(l, Word(it->word.begin(), it->word.begin() + static_cast<std::ptrdiff_t>(l))),
                         true);
    for (const auto& [key, unused] : prefixes) {
      (void)unused;
      const Word& p = key.second;
      const std::size_t parent = index.at(Word(p.begin(), p.end() - 1));
      const std::size_t id = add_node();
      trans_[parent * k_ + p.back()] = id;
      index.emplace(p, id);
    }
    for (const auto* it : items) {
      const std::size_t node = index.at(it->word);
      const int label = it->label ? 1 : 0;
      if (label_[node] != kUnknown && label_[node] != label)
        throw InvalidInput("sample labels word '" + sample.alphabet.format(it->word) + "' both ways");
      label_[node] = label;
    }
  }

  std::size_t nodes() const { return label_.size(); }
  std::size_t child(std::size_t q, Symbol s) const { return trans_[q * k_ + s]; }

  // Redirects the edge (parent, s) from blue to red and folds blue's subtree
  // into red. Rolls back and returns false on a label clash.
  bool try_merge(std::size_t parent, Symbol s, std::size_t red, std::size_t blue) {
    log_.clear();
    set_trans(parent * k_ + s, red);
    if (fold(red, blue)) return true;
    for (auto it = log_.rbegin(); it != log_.rend(); ++it) {
      if (it->is_label)
        label_[it->index] = static_cast<int>(it->old);
      else
        trans_[it->index] = it->old;
    }
    return false;
  }

  Dfa to_dfa(const Alphabet& alphabet, const std::vector<std::size_t>& red) const {
    // States: red nodes plus a rejecting sink.
    std::map<std::size_t, StateId> id;
    for (std::size_t r : red) id.emplace(r, id.size());
    const StateId sink = id.size();
    std::vector<StateId> delta((id.size() + 1) * k_, sink);
    std::vector<bool> accepting(id.size() + 1, false);
    for (const auto& [node, q] : id) {
      accepting[q] = label_[node] == 1;
      for (Symbol s = 0; s < k_; ++s)
        if (const std::size_t c = child(node, s); c != kNone) delta[q * k_ + s] = id.at(c);
    }
    return minimize(Dfa(alphabet, id.size() + 1, id.at(0), std::move(delta), std::move(accepting)));
  }

 private:
  struct Change {
    bool is_label;
    std::size_t index;
    std::size_t old;
  };

  std::size_t add_node() {
    label_.push_back(kUnknown);
    trans_.insert(trans_.end(), k_, kNone);
    return label_.size() - 1;
  }

  void set_trans(std::size_t i, std::size_t v) {
    log_.push_back({false, i, trans_[i]});
    trans_[i] = v;
  }

  // Blue's subtree is still a tree, so the recursion terminates.
  bool fold(std::size_t red, std::size_t blue) {
    if (label_[blue] != kUnknown) {
      if (label_[red] == kUnknown) {
        log_.push_back({true, red, static_cast<std::size_t>(kUnknown)});
        label_[red] = label_[blue];
      } else if (label_[red] != label_[blue]) {
        return false;
      }
    }
    for (Symbol s = 0; s < k_; ++s) {
      const std::size_t b = child(blue, s);
      if (b == kNone) continue;
      const std::size_t r = child(red, s);
      if (r == kNone)
        set_trans(red * k_ + s, b);
      else if (!fold(r, b))
        return false;
    }
    return true;
  }

  std::size_t k_;
  std::vector<int> label_;
  std::vector<std::size_t> trans_;
  std::vector<Change> log_;
};

}  // namespace

Dfa rpni(const LabeledSample& sample) {
  const std::size_t k = sample.alphabet.size();
  if (k == 0) throw InvalidInput("sample has an empty alphabet");
  for (const auto& it : sample.items) sample.alphabet.check(it.word);
  Folding f(sample, k);
  std::vector<std::size_t> red{0};
  while (true) {
    // Length-lex least blue node: a child of a red node that is not red.
    std::size_t blue = kNone, parent = kNone;
    Symbol via = 0;
    for (std::size_t r : red)
      for (Symbol s = 0; s < k; ++s) {
        const std::size_t c = f.child(r, s);
        if (c == kNone || std::find(red.begin(), red.end(), c) != red.end()) continue;
        if (c < blue) {
          blue = c;
          parent = r;
          via = s;
        }
      }
    if (blue == kNone) break;
    bool merged = false;
    for (std::size_t r : red)
      if (f.try_merge(parent, via, r, blue)) {
        merged = true;
        break;
      }
    if (!merged) {
      red.push_back(blue);
      std::sort(red.begin(), red.end());
    }
  }
  return f.to_dfa(sample.alphabet, red);
}

}  // namespace fsmx
