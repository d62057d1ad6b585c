#pragma once

#include "fsmx/automata_io.hpp"
#include "fsmx/rnn.hpp"

namespace fsmx {

// rnn.json: {"kind", "activation", "dim", "alphabet", "head",
//            "weights": {name: [[row] ...]}} with decimal-string entries.
Json to_json(const RnnModel& model);
RnnModel rnn_from_json(const Json& j);

}  // namespace fsmx
