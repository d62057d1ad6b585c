#include "fsmx/alphabet.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>

#include "fsmx/error.hpp"

namespace fsmx {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw InvalidInput("alphabet must be nonempty");
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (s.empty()) throw InvalidInput("alphabet symbols must be nonempty strings");
    if (s == kEndMarker) throw InvalidInput("'$' is reserved as the end marker");
    if (std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }))
      throw InvalidInput("alphabet symbol contains whitespace: '" + s + "'");
    if (!seen.insert(s).second) throw InvalidInput("duplicate alphabet symbol '" + s + "'");
    if (s.size() != 1) compact_ = false;
  }
}

const std::string& Alphabet::name(Symbol s) const {
  if (s >= symbols_.size()) throw InvalidInput("symbol index out of range");
  return symbols_[s];
}

std::optional<Symbol> Alphabet::find(std::string_view name) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == name) return i;
  return std::nullopt;
}

Symbol Alphabet::index(std::string_view name) const {
  if (auto s = find(name)) return *s;
  throw InvalidInput("unknown symbol '" + std::string(name) + "'");
}

Word Alphabet::parse(std::string_view text) const {
  Word w;
  if (text.empty() || text == "ε" || text == "<eps>") return w;
  if (compact_) {
    w.reserve(text.size());
    for (char c : text) w.push_back(index(std::string_view(&c, 1)));
    return w;
  }
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) w.push_back(index(text.substr(i, j - i)));
    i = j;
  }
  return w;
}

std::string Alphabet::format(const Word& w) const {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!compact_ && i > 0) out.push_back(' ');
    out += name(w[i]);
  }
  return out;
}

void Alphabet::check(const Word& w) const {
  for (Symbol s : w)
    if (s >= symbols_.size()) throw InvalidInput("word contains a symbol outside the alphabet");
}

bool next_word(Word& w, std::size_t k, std::size_t max_len) {
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] + 1 < k) {
      ++w[i];
      return true;
    }
    w[i] = 0;
  }
  if (w.size() >= max_len) return false;
  w.assign(w.size() + 1, 0);
  return true;
}

std::size_t words_up_to(std::size_t k, std::size_t n) {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 0, layer = 1;
  for (std::size_t l = 0; l <= n; ++l) {
    if (total > kMax - layer) return kMax;
    total += layer;
    if (l < n) {
      if (k != 0 && layer > kMax / k) return kMax;
      layer *= k;
    }
  }
  return total;
}

Word uniform_word_of_length(std::mt19937_64& rng, std::size_t k, std::size_t len) {
  std::uniform_int_distribution<std::size_t> sym(0, k - 1);
  Word w(len);
  for (auto& s : w) s = sym(rng);
  return w;
}

Word uniform_word(std::mt19937_64& rng, std::size_t k, std::size_t max_len) {
  // Walk down from the longest length; P(ℓ | ℓ ≤ L) = k^L / Σ_{j≤L} k^j.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double kk = static_cast<double>(k);
  std::size_t len = max_len;
  while (len > 0) {
    // Σ_{j≤len} k^{j-len} = Σ_{i=0..len} k^{-i}
    double denom = 0.0, term = 1.0;
    for (std::size_t i = 0; i <= len && term > 1e-300; ++i, term /= kk) denom += term;
    if (unit(rng) < 1.0 / denom) break;
    --len;
  }
  return uniform_word_of_length(rng, k, len);
}

}  // namespace fsmx
