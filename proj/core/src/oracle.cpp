#include "fsmx/oracle.hpp"

#include "fsmx/error.hpp"

namespace fsmx {

using Eigen::VectorXd;

VectorXd StateMachineOracle::state_of(const Word& w) const {
  VectorXd v = initial();
  for (Symbol s : w) v = step(v, s);
  return v;
}

RnnOracle::RnnOracle(RnnModel model) : model_(std::move(model)) {
  if (model_.head() != Head::Recognizer) throw InvalidInput("extraction needs a recognizer model");
}

VectorXd RnnOracle::initial() const {
  HiddenState st = model_.initial_state();
  if (model_.kind() != CellKind::Lstm) return st.h;
  VectorXd v(st.h.size() * 2);
  v << st.h, st.c;
  return v;
}

VectorXd RnnOracle::step(const VectorXd& state, Symbol s) const {
  const auto d = static_cast<Eigen::Index>(model_.dim());
  if (model_.kind() != CellKind::Lstm) return model_.step({state, {}}, s).h;
  HiddenState next = model_.step({state.head(d), state.tail(d)}, s);
  VectorXd v(2 * d);
  v << next.h, next.c;
  return v;
}

bool RnnOracle::classify(const VectorXd& state) const {
  const auto d = static_cast<Eigen::Index>(model_.dim());
  return sigmoid(model_.logits({state.head(d), {}})(0)) > 0.5;
}

VectorXd RnnOracle::unit_box(const VectorXd& state) const {
  switch (model_.kind()) {
    case CellKind::Lstm:
      // h lies in (-1,1); the cell memory is squashed through tanh first.
      return (state.array().tanh() + 1.0) / 2.0;
    case CellKind::Gru:
      return (state.array() + 1.0) / 2.0;
    case CellKind::FirstOrder:
    case CellKind::SecondOrder:
      break;
  }
  switch (model_.activation()) {
    case Activation::Sigmoid: return state;
    case Activation::Tanh: return (state.array() + 1.0) / 2.0;
    case Activation::Relu: break;
  }
  throw InvalidInput("relu states are unbounded and cannot be quantized");
}

VectorXd DfaOracle::initial() const {
  VectorXd v = VectorXd::Zero(static_cast<Eigen::Index>(dfa_.size()));
  v(static_cast<Eigen::Index>(dfa_.initial())) = 1.0;
  return v;
}

StateId DfaOracle::decode(const VectorXd& state) const {
  Eigen::Index q = 0;
  state.maxCoeff(&q);
  return static_cast<StateId>(q);
}

VectorXd DfaOracle::step(const VectorXd& state, Symbol s) const {
  if (s >= dfa_.num_symbols()) throw InvalidInput("symbol outside the alphabet");
  VectorXd v = VectorXd::Zero(state.size());
  v(static_cast<Eigen::Index>(dfa_.next(decode(state), s))) = 1.0;
  return v;
}

bool DfaOracle::classify(const VectorXd& state) const { return dfa_.accepting(decode(state)); }

}  // namespace fsmx
