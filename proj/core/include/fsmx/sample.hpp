#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fsmx/alphabet.hpp"

namespace fsmx {

struct LabeledItem {
  Word word;
  bool label = false;

  friend bool operator==(const LabeledItem&, const LabeledItem&) = default;
};

struct SampleMeta {
  std::string strategy;
  std::size_t support_bound = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const SampleMeta&, const SampleMeta&) = default;
};

// Multiset of labeled words; duplicates are meaningful.
struct LabeledSample {
  Alphabet alphabet;
  std::vector<LabeledItem> items;
  SampleMeta meta;

  std::size_t size() const noexcept { return items.size(); }
  bool empty() const noexcept { return items.empty(); }
  std::size_t positives() const;

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

}  // namespace fsmx
