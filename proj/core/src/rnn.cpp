#include "fsmx/rnn.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fsmx/error.hpp"

namespace fsmx {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Shape {
  const char* name;
  Eigen::Index rows;
  Eigen::Index cols;
};

std::vector<Shape> layout(CellKind kind, Eigen::Index d, Eigen::Index in, Eigen::Index out) {
  switch (kind) {
    case CellKind::FirstOrder:
      return {{"B", d, in}, {"W", d, d}, {"c", d, 1}, {"h0", d, 1}, {"O", out, d}, {"Ob", out, 1}};
    case CellKind::SecondOrder:
      return {{"W", d, in * d}, {"h0", d, 1}, {"O", out, d}, {"Ob", out, 1}};
    case CellKind::Lstm:
      return {{"B", d, in},  {"Wi", d, d}, {"Ui", d, d}, {"Wf", d, d}, {"Uf", d, d},
              {"Wo", d, d},  {"Uo", d, d}, {"W", d, d},  {"U", d, d},  {"h0", d, 1},
              {"c0", d, 1},  {"O", out, d}, {"Ob", out, 1}};
    case CellKind::Gru:
      return {{"B", d, in}, {"Wz", d, d}, {"Uz", d, d}, {"Wr", d, d}, {"Ur", d, d},
              {"W", d, d},  {"h0", d, 1}, {"O", out, d}, {"Ob", out, 1}};
  }
  throw InvalidInput("unknown cell kind");
}

VectorXd apply(Activation act, VectorXd x) {
  switch (act) {
    case Activation::Sigmoid:
      return x.unaryExpr([](double v) { return sigmoid(v); });
    case Activation::Tanh:
      return x.array().tanh().matrix();
    case Activation::Relu:
      return x.cwiseMax(0.0);
  }
  return x;
}

VectorXd sigmoid_vec(const VectorXd& x) {
  return x.unaryExpr([](double v) { return sigmoid(v); });
}

}  // namespace

std::string to_string(CellKind kind) {
  switch (kind) {
    case CellKind::FirstOrder: return "first-order";
    case CellKind::SecondOrder: return "second-order";
    case CellKind::Lstm: return "lstm";
    case CellKind::Gru: return "gru";
  }
  return "?";
}

std::string to_string(Activation act) {
  switch (act) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
  }
  return "?";
}

std::string to_string(Head head) { return head == Head::Lm ? "lm" : "recognizer"; }

CellKind parse_cell_kind(std::string_view text) {
  if (text == "first-order") return CellKind::FirstOrder;
  if (text == "second-order") return CellKind::SecondOrder;
  if (text == "lstm") return CellKind::Lstm;
  if (text == "gru") return CellKind::Gru;
  throw InvalidInput("unknown cell kind '" + std::string(text) + "'");
}

Activation parse_activation(std::string_view text) {
  if (text == "sigmoid") return Activation::Sigmoid;
  if (text == "tanh") return Activation::Tanh;
  if (text == "relu") return Activation::Relu;
  throw InvalidInput("unknown activation '" + std::string(text) + "'");
}

Head parse_head(std::string_view text) {
  if (text == "recognizer") return Head::Recognizer;
  if (text == "lm") return Head::Lm;
  throw InvalidInput("unknown head '" + std::string(text) + "'");
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

RnnModel::RnnModel(CellKind kind, Activation activation, std::size_t dim, Alphabet alphabet, Head head)
    : kind_(kind), activation_(activation), dim_(dim), alphabet_(std::move(alphabet)), head_(head) {
  if (dim_ == 0) throw ShapeMismatch("hidden dimension must be >= 1");
  if (alphabet_.empty()) throw InvalidInput("alphabet must be nonempty");
  // Gated cells fix their own nonlinearities.
  if (kind_ == CellKind::Lstm || kind_ == CellKind::Gru) activation_ = Activation::Tanh;
  const auto d = static_cast<Eigen::Index>(dim_);
  for (const auto& s : layout(kind_, d, static_cast<Eigen::Index>(num_inputs()),
                              static_cast<Eigen::Index>(num_outputs())))
    params_.push_back({s.name, MatrixXd::Zero(s.rows, s.cols)});
}

Eigen::MatrixXd& RnnModel::param(std::string_view name) {
  for (auto& p : params_)
    if (p.name == name) return p.value;
  throw InvalidInput("model has no parameter '" + std::string(name) + "'");
}

const Eigen::MatrixXd& RnnModel::param(std::string_view name) const {
  return const_cast<RnnModel*>(this)->param(name);
}

std::size_t RnnModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

Eigen::VectorXd RnnModel::flatten() const {
  VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index at = 0;
  for (const auto& p : params_) {
    flat.segment(at, p.value.size()) = p.value.reshaped();
    at += p.value.size();
  }
  return flat;
}

void RnnModel::assign(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count())
    throw ShapeMismatch("flat parameter vector has wrong length");
  Eigen::Index at = 0;
  for (auto& p : params_) {
    p.value.reshaped() = flat.segment(at, p.value.size());
    at += p.value.size();
  }
}

HiddenState RnnModel::initial_state() const {
  HiddenState st{param("h0").col(0), {}};
  if (kind_ == CellKind::Lstm) st.c = param("c0").col(0);
  return st;
}

HiddenState RnnModel::step(const HiddenState& state, Symbol s) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  if (state.h.size() != d) throw ShapeMismatch("hidden state has wrong dimension");
  if (s >= num_inputs()) throw InvalidInput("symbol outside the model's input alphabet");
  const auto& P = params_;
  const auto si = static_cast<Eigen::Index>(s);
  switch (kind_) {
    case CellKind::FirstOrder: {
      // B W c h0 O Ob
      VectorXd pre = P[1].value * state.h + P[0].value.col(si) + P[2].value.col(0);
      return {apply(activation_, std::move(pre)), {}};
    }
    case CellKind::SecondOrder: {
      // W h0 O Ob
      VectorXd pre = P[0].value.middleCols(si * d, d) * state.h;
      return {apply(activation_, std::move(pre)), {}};
    }
    case CellKind::Lstm: {
      // B Wi Ui Wf Uf Wo Uo W U h0 c0 O Ob
      if (state.c.size() != d) throw ShapeMismatch("LSTM cell state has wrong dimension");
      const auto b = P[0].value.col(si);
      VectorXd i = sigmoid_vec(P[1].value * b + P[2].value * state.h);
      VectorXd f = sigmoid_vec(P[3].value * b + P[4].value * state.h);
      VectorXd o = sigmoid_vec(P[5].value * b + P[6].value * state.h);
      VectorXd g = (P[7].value * b + P[8].value * state.h).array().tanh().matrix();
      VectorXd c = f.cwiseProduct(state.c) + i.cwiseProduct(g);
      VectorXd h = o.cwiseProduct(c.array().tanh().matrix());
      return {std::move(h), std::move(c)};
    }
    case CellKind::Gru: {
      // B Wz Uz Wr Ur W h0 O Ob
      const auto b = P[0].value.col(si);
      VectorXd z = sigmoid_vec(P[1].value * b + P[2].value * state.h);
      VectorXd r = sigmoid_vec(P[3].value * b + P[4].value * state.h);
      VectorXd g = (P[5].value * state.h.cwiseProduct(r) + b).array().tanh().matrix();
      VectorXd h = (1.0 - z.array()).matrix().cwiseProduct(g) + z.cwiseProduct(state.h);
      return {std::move(h), {}};
    }
  }
  throw InvalidInput("unknown cell kind");
}

HiddenState RnnModel::run(const Word& w) const {
  HiddenState st = initial_state();
  for (Symbol s : w) st = step(st, s);
  return st;
}

Eigen::VectorXd RnnModel::logits(const HiddenState& state) const {
  const auto n = params_.size();
  return params_[n - 2].value * state.h + params_[n - 1].value.col(0);
}

void randomize(RnnModel& model, double stddev, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, stddev);
  for (auto& p : model.params())
    for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = gauss(rng);
}

Classification recognizer_classify(const RnnModel& model, const Word& w) {
  if (model.head() != Head::Recognizer) throw InvalidInput("model has a language-model head");
  const double conf = sigmoid(model.logits(model.run(w))(0));
  return {conf > 0.5, conf};
}

Eigen::VectorXd softmax2(const Eigen::VectorXd& x) {
  if (x.size() == 0) return x;
  const double m = x.maxCoeff();
  VectorXd e = (x.array() - m).unaryExpr([](double v) { return std::exp2(v); }).matrix();
  return e / e.sum();
}

double lm_weight(const RnnModel& model, const Word& w) {
  if (model.head() != Head::Lm) throw InvalidInput("model has a recognizer head");
  model.alphabet().check(w);
  HiddenState st = model.step(model.initial_state(), model.end_marker());
  double weight = 1.0;
  for (Symbol s : w) {
    weight *= softmax2(model.logits(st))(static_cast<Eigen::Index>(s));
    st = model.step(st, s);
  }
  return weight * softmax2(model.logits(st))(static_cast<Eigen::Index>(model.end_marker()));
}

Rational enc4(std::string_view bits) {
  Rational total = 0;
  Rational scale(1, 4);
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw InvalidInput("enc4 expects a binary string");
    if (ch == '1') total += scale;
    scale /= 4;
  }
  return total;
}

LipschitzReport lipschitz_bound(const RnnModel& model) {
  if (model.kind() != CellKind::FirstOrder)
    throw DiagnosticUnavailable("Lipschitz bound is only defined for first-order cells");
  const double norm = model.param("W").norm();
  return {norm, norm < 1.0};
}

double empirical_lipschitz(const RnnModel& model,
                           const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs,
                           Symbol s) {
  if (model.kind() != CellKind::FirstOrder)
    throw DiagnosticUnavailable("empirical Lipschitz ratio is only defined for first-order cells");
  if (pairs.empty()) throw InvalidInput("need at least one pair of hidden states");
  double best = 0.0;
  for (const auto& [x, y] : pairs) {
    const double gap = (x - y).norm();
    if (gap == 0.0) continue;
    const VectorXd fx = model.step({x, {}}, s).h;
    const VectorXd fy = model.step({y, {}}, s).h;
    best = std::max(best, (fx - fy).norm() / gap);
  }
  return best;
}

RnnModel embed_dfa(const Dfa& dfa, double gain) {
  const auto d = static_cast<Eigen::Index>(dfa.size());
  RnnModel model(CellKind::SecondOrder, Activation::Sigmoid, dfa.size(), dfa.alphabet(), Head::Recognizer);
  auto& W = model.param("W");
  W.setConstant(-gain);
  for (StateId q = 0; q < dfa.size(); ++q)
    for (Symbol s = 0; s < dfa.num_symbols(); ++s)
      W(static_cast<Eigen::Index>(dfa.next(q, s)), static_cast<Eigen::Index>(s) * d + static_cast<Eigen::Index>(q)) = gain;
  model.param("h0")(static_cast<Eigen::Index>(dfa.initial()), 0) = 1.0;
  auto& O = model.param("O");
  for (StateId q = 0; q < dfa.size(); ++q) O(0, static_cast<Eigen::Index>(q)) = dfa.accepting(q) ? gain : -gain;
  return model;
}

}  // namespace fsmx
