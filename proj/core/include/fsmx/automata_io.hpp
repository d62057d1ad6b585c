#pragma once

#include <filesystem>
#include <iosfwd>

#include <nlohmann/json.hpp>

#include "fsmx/dfa.hpp"
#include "fsmx/sample.hpp"
#include "fsmx/wfa.hpp"

namespace fsmx {

using Json = nlohmann::ordered_json;

// dfa.json: {"alphabet": [...], "states": n, "initial": i,
//            "accepting": [...], "delta": [[target per symbol] per state]}
Json to_json(const Dfa& dfa);
Dfa dfa_from_json(const Json& j);

// pfa.json: {"alphabet": [...], "dim": n, "alpha": [...], "final": [...],
//            "trans": {symbol: [[row] ...]}, "deterministic": bool}
// Weights are decimal strings that round-trip exactly; "p/q" is accepted on input.
Json to_json(const Pfa& pfa);
Pfa pfa_from_json(const Json& j);

Json alphabet_to_json(const Alphabet& alphabet);
Alphabet alphabet_from_json(const Json& j);

// Dataset file: one record per line, "<0|1>\t<word>".
void write_dataset(std::ostream& out, const LabeledSample& sample);
LabeledSample read_dataset(std::istream& in, const Alphabet& alphabet);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
// Two-space indented dump terminated by a newline.
std::string dump(const Json& j);

}  // namespace fsmx
