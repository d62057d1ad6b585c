#include "fsmx/tomita.hpp"

#include <string>

#include "fsmx/error.hpp"

namespace fsmx {

namespace {

// rows: {on 0, on 1}
Dfa make(std::vector<std::pair<StateId, StateId>> rows, std::vector<bool> accepting) {
  std::vector<StateId> delta;
  for (const auto& [a, b] : rows) {
    delta.push_back(a);
    delta.push_back(b);
  }
  const std::size_t n = rows.size();
  return minimize(Dfa(Alphabet::binary(), n, 0, std::move(delta), std::move(accepting)));
}

}  // namespace

Dfa tomita_dfa(int id) {
  switch (id) {
    case 1:
      return make({{1, 0}, {1, 1}}, {true, false});
    case 2:
      return make({{2, 1}, {0, 2}, {2, 2}}, {true, false, false});
    case 3:
      // 0: even 0-block or after 1s, 1: odd 0-block, 2: odd 0s then odd 1s,
      // 3: odd 0s then even 1s, 4: dead
      return make({{1, 0}, {0, 2}, {4, 3}, {1, 2}, {4, 4}}, {true, true, false, true, false});
    case 4:
      return make({{1, 0}, {2, 0}, {3, 0}, {3, 3}}, {true, true, true, false});
    case 5:
      // bit 0: parity of 0s, bit 1: parity of 1s
      return make({{1, 2}, {0, 3}, {3, 0}, {2, 1}}, {true, false, false, false});
    case 6:
      return make({{1, 2}, {2, 0}, {0, 1}}, {true, false, false});
    case 7:
      return make({{0, 1}, {2, 1}, {2, 3}, {4, 3}, {4, 4}}, {true, true, true, true, false});
    default:
      throw InvalidInput("Tomita grammar id must be in 1..7, got " + std::to_string(id));
  }
}

}  // namespace fsmx
