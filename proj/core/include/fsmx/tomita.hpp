#pragma once

#include "fsmx/dfa.hpp"

namespace fsmx {

inline constexpr int kTomitaCount = 7;

// Canonical minimal complete DFA over {0,1} for Tomita grammar `id` (1..7):
//   1  1*
//   2  (10)*
//   3  no maximal odd block of 0s immediately followed by an odd block of 1s
//   4  no 000
//   5  even number of 0s and even number of 1s
//   6  #0 − #1 ≡ 0 (mod 3)
//   7  0*1*0*1*
Dfa tomita_dfa(int id);

}  // namespace fsmx
