#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace fsmx {

using Symbol = std::size_t;
using Word = std::vector<Symbol>;

inline constexpr std::string_view kEndMarker = "$";

// Ordered finite set of symbol names. Symbols are referred to by index
// everywhere inside the library; names only matter at the I/O boundary.
// The end marker `$` is reserved and never an ordinary symbol.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);
  Alphabet(std::initializer_list<std::string> symbols)
      : Alphabet(std::vector<std::string>(symbols)) {}

  static Alphabet binary() { return Alphabet({"0", "1"}); }

  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::string& name(Symbol s) const;
  std::optional<Symbol> find(std::string_view name) const;
  Symbol index(std::string_view name) const;

  // Single-character alphabets render words as plain strings ("0110");
  // otherwise symbols are space separated. The empty word parses from ""
  // and also from the conventional spellings "ε" and "<eps>".
  bool compact() const noexcept { return compact_; }
  Word parse(std::string_view text) const;
  std::string format(const Word& w) const;

  void check(const Word& w) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  bool compact_ = true;
};

// Length-lexicographic successor over an alphabet of `k` symbols. Returns
// false after the last word of length `max_len`.
bool next_word(Word& w, std::size_t k, std::size_t max_len);

// |Σ^{≤n}| = Σ_{l=0..n} k^l, saturating at SIZE_MAX.
std::size_t words_up_to(std::size_t k, std::size_t n);

// Uniform draw from Σ^{≤max_len}: length ℓ has probability k^ℓ / |Σ^{≤max_len}|.
Word uniform_word(std::mt19937_64& rng, std::size_t k, std::size_t max_len);

// Uniform draw from Σ^ℓ.
Word uniform_word_of_length(std::mt19937_64& rng, std::size_t k, std::size_t len);

}  // namespace fsmx
