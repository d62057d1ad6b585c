#pragma once

#include "fsmx/dfa.hpp"
#include "fsmx/sample.hpp"

namespace fsmx {

// Red-blue state merging over the prefix-tree acceptor. Blue states are
// tried in length-lex order of their access words against red states in the
// same order. Unlabeled states reject. Output is minimal and classifies
// every sample item correctly. Throws InvalidInput on a word carrying both
// labels.
Dfa rpni(const LabeledSample& sample);

}  // namespace fsmx
