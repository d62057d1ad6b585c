#include "fsmx/rnn_io.hpp"

#include "fsmx/error.hpp"
#include "fsmx/rational.hpp"

namespace fsmx {

Json to_json(const RnnModel& model) {
  Json j;
  j["kind"] = to_string(model.kind());
  j["activation"] = to_string(model.activation());
  j["dim"] = model.dim();
  j["alphabet"] = alphabet_to_json(model.alphabet());
  j["head"] = to_string(model.head());
  Json weights = Json::object();
  for (const auto& p : model.params()) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < p.value.cols(); ++c) row.push_back(format_double(p.value(r, c)));
      rows.push_back(std::move(row));
    }
    weights[p.name] = std::move(rows);
  }
  j["weights"] = std::move(weights);
  return j;
}

RnnModel rnn_from_json(const Json& j) {
  try {
    RnnModel model(parse_cell_kind(j.at("kind").get<std::string>()),
                   parse_activation(j.at("activation").get<std::string>()),
                   j.at("dim").get<std::size_t>(), alphabet_from_json(j.at("alphabet")),
                   parse_head(j.at("head").get<std::string>()));
    const Json& weights = j.at("weights");
    for (auto& p : model.params()) {
      if (!weights.contains(p.name)) throw InvalidInput("rnn.json lacks weight '" + p.name + "'");
      const Json& rows = weights.at(p.name);
      if (!rows.is_array() || rows.size() != static_cast<std::size_t>(p.value.rows()))
        throw ShapeMismatch("weight '" + p.name + "' has the wrong number of rows");
      for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
        const Json& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(p.value.cols()))
          throw ShapeMismatch("weight '" + p.name + "' has the wrong number of columns");
        for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
          const Json& x = row[static_cast<std::size_t>(c)];
          p.value(r, c) = x.is_string() ? parse_decimal(x.get<std::string>()) : x.get<double>();
        }
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed rnn.json: ") + e.what());
  }
}

}  // namespace fsmx
