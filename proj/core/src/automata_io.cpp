#include "fsmx/automata_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fsmx/error.hpp"
#include "fsmx/rational.hpp"

namespace fsmx {

std::size_t LabeledSample::positives() const {
  std::size_t n = 0;
  for (const auto& item : items) n += item.label ? 1 : 0;
  return n;
}

namespace {

Json number_to_json(double x) { return format_double(x); }

double number_from_json(const Json& j) {
  if (j.is_string()) return parse_decimal(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw InvalidInput("expected a numeric weight, got " + j.dump());
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number_to_json(v(i)));
  return arr;
}

Eigen::VectorXd vector_from_json(const Json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n)
    throw InvalidInput(std::string(what) + " must be an array of length " + std::to_string(n));
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = number_from_json(j[i]);
  return v;
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Json alphabet_to_json(const Alphabet& alphabet) { return alphabet.symbols(); }

Alphabet alphabet_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidInput("alphabet must be an array of strings");
  std::vector<std::string> symbols;
  for (const auto& s : j) {
    if (!s.is_string()) throw InvalidInput("alphabet must be an array of strings");
    symbols.push_back(s.get<std::string>());
  }
  return Alphabet(std::move(symbols));
}

Json to_json(const Dfa& dfa) {
  Json j;
  j["alphabet"] = alphabet_to_json(dfa.alphabet());
  j["states"] = dfa.size();
  j["initial"] = dfa.initial();
  Json acc = Json::array();
  for (StateId q = 0; q < dfa.size(); ++q)
    if (dfa.accepting(q)) acc.push_back(q);
  j["accepting"] = acc;
  Json delta = Json::array();
  for (StateId q = 0; q < dfa.size(); ++q) {
    Json row = Json::array();
    for (Symbol s = 0; s < dfa.num_symbols(); ++s) row.push_back(dfa.next(q, s));
    delta.push_back(row);
  }
  j["delta"] = delta;
  return j;
}

Dfa dfa_from_json(const Json& j) {
  try {
    Alphabet alphabet = alphabet_from_json(require(j, "alphabet"));
    const auto n = require(j, "states").get<std::size_t>();
    const auto initial = require(j, "initial").get<std::size_t>();
    std::vector<bool> accepting(n, false);
    for (const auto& q : require(j, "accepting")) {
      auto idx = q.get<std::size_t>();
      if (idx >= n) throw InvalidInput("accepting state out of range");
      accepting[idx] = true;
    }
    const Json& rows = require(j, "delta");
    if (!rows.is_array() || rows.size() != n) throw InvalidInput("delta must have one row per state");
    std::vector<StateId> delta;
    delta.reserve(n * alphabet.size());
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != alphabet.size())
        throw InvalidInput("delta row must have one target per symbol");
      for (const auto& t : row) delta.push_back(t.get<std::size_t>());
    }
    return Dfa(std::move(alphabet), n, initial, std::move(delta), std::move(accepting));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed dfa.json: ") + e.what());
  }
}

Json to_json(const Pfa& pfa) {
  Json j;
  j["alphabet"] = alphabet_to_json(pfa.alphabet());
  j["dim"] = pfa.dim();
  j["alpha"] = vector_to_json(pfa.initial());
  j["final"] = vector_to_json(pfa.final_weights());
  Json trans = Json::object();
  for (Symbol s = 0; s < pfa.alphabet().size(); ++s) {
    const auto& m = pfa.transition(s);
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number_to_json(m(r, c)));
      rows.push_back(row);
    }
    trans[pfa.alphabet().name(s)] = rows;
  }
  j["trans"] = trans;
  j["deterministic"] = pfa.deterministic();
  return j;
}

Pfa pfa_from_json(const Json& j) {
  try {
    Alphabet alphabet = alphabet_from_json(require(j, "alphabet"));
    const auto n = require(j, "dim").get<std::size_t>();
    Eigen::VectorXd alpha = vector_from_json(require(j, "alpha"), n, "alpha");
    Eigen::VectorXd fin = vector_from_json(require(j, "final"), n, "final");
    const Json& trans = require(j, "trans");
    std::vector<Eigen::MatrixXd> mats;
    for (const auto& name : alphabet.symbols()) {
      if (!trans.contains(name)) throw InvalidInput("missing transition matrix for '" + name + "'");
      const Json& m = trans.at(name);
      Eigen::MatrixXd mat(n, n);
      // Accept nested rows or a flat row-major array.
      if (m.is_array() && m.size() == n * n && (n == 0 || !m[0].is_array())) {
        for (std::size_t i = 0; i < n * n; ++i)
          mat(static_cast<Eigen::Index>(i / n), static_cast<Eigen::Index>(i % n)) = number_from_json(m[i]);
      } else {
        if (!m.is_array() || m.size() != n) throw InvalidInput("transition matrix has wrong shape");
        for (std::size_t r = 0; r < n; ++r)
          mat.row(static_cast<Eigen::Index>(r)) = vector_from_json(m[r], n, "transition row").transpose();
      }
      mats.push_back(std::move(mat));
    }
    const bool det = j.contains("deterministic") && j.at("deterministic").get<bool>();
    return Pfa(std::move(alphabet), std::move(alpha), std::move(mats), std::move(fin), det);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed pfa.json: ") + e.what());
  }
}

void write_dataset(std::ostream& out, const LabeledSample& sample) {
  for (const auto& item : sample.items)
    out << (item.label ? '1' : '0') << '\t' << sample.alphabet.format(item.word) << '\n';
}

LabeledSample read_dataset(std::istream& in, const Alphabet& alphabet) {
  LabeledSample sample{alphabet, {}, {"file", 0, 0}};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    const std::string label = line.substr(0, tab);
    if (label != "0" && label != "1")
      throw InvalidInput("dataset line " + std::to_string(lineno) + ": label must be 0 or 1");
    const std::string text = tab == std::string::npos ? std::string() : line.substr(tab + 1);
    Word w = alphabet.parse(text);
    sample.meta.support_bound = std::max(sample.meta.support_bound, w.size());
    sample.items.push_back({std::move(w), label == "1"});
  }
  return sample;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("invalid JSON in " + path.string() + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << dump(j);
}

}  // namespace fsmx
