#pragma once

#include <Eigen/Dense>

#include "fsmx/dfa.hpp"
#include "fsmx/rnn.hpp"

namespace fsmx {

// A sequential machine seen through real state vectors.
class StateMachineOracle {
 public:
  virtual ~StateMachineOracle() = default;

  virtual const Alphabet& alphabet() const = 0;
  virtual Eigen::VectorXd initial() const = 0;
  virtual Eigen::VectorXd step(const Eigen::VectorXd& state, Symbol s) const = 0;
  virtual bool classify(const Eigen::VectorXd& state) const = 0;
  // Image of a state in [0,1]^d. Throws InvalidInput for unbounded cells.
  virtual Eigen::VectorXd unit_box(const Eigen::VectorXd& state) const = 0;

  std::size_t num_symbols() const { return alphabet().size(); }
  Eigen::VectorXd state_of(const Word& w) const;
  bool membership(const Word& w) const { return classify(state_of(w)); }
};

// Recognizer RNN. LSTM states are the concatenation [h; c].
class RnnOracle final : public StateMachineOracle {
 public:
  explicit RnnOracle(RnnModel model);

  const RnnModel& model() const noexcept { return model_; }
  const Alphabet& alphabet() const override { return model_.alphabet(); }
  Eigen::VectorXd initial() const override;
  Eigen::VectorXd step(const Eigen::VectorXd& state, Symbol s) const override;
  bool classify(const Eigen::VectorXd& state) const override;
  Eigen::VectorXd unit_box(const Eigen::VectorXd& state) const override;

 private:
  RnnModel model_;
};

// Exact one-hot embedding of a DFA; ground truth for extractor tests.
class DfaOracle final : public StateMachineOracle {
 public:
  explicit DfaOracle(Dfa dfa) : dfa_(std::move(dfa)) {}

  const Dfa& dfa() const noexcept { return dfa_; }
  const Alphabet& alphabet() const override { return dfa_.alphabet(); }
  Eigen::VectorXd initial() const override;
  Eigen::VectorXd step(const Eigen::VectorXd& state, Symbol s) const override;
  bool classify(const Eigen::VectorXd& state) const override;
  Eigen::VectorXd unit_box(const Eigen::VectorXd& state) const override { return state; }

 private:
  StateId decode(const Eigen::VectorXd& state) const;
  Dfa dfa_;
};

}  // namespace fsmx
