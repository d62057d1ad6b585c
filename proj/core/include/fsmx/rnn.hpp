#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fsmx/alphabet.hpp"
#include "fsmx/dfa.hpp"
#include "fsmx/rational.hpp"

namespace fsmx {

enum class CellKind { FirstOrder, SecondOrder, Lstm, Gru };
enum class Activation { Sigmoid, Tanh, Relu };
enum class Head { Recognizer, Lm };

std::string to_string(CellKind kind);
std::string to_string(Activation act);
std::string to_string(Head head);
CellKind parse_cell_kind(std::string_view text);
Activation parse_activation(std::string_view text);
Head parse_head(std::string_view text);

double sigmoid(double x);

// `c` is empty unless the cell is an LSTM.
struct HiddenState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};

struct Param {
  std::string name;
  Eigen::MatrixXd value;
};

// Parameter layout per cell (d = dim, S = number of input symbols, which is
// |Σ| for recognizers and |Σ|+1 for language models, `$` last):
//   first-order   B d×S, W d×d, c d×1, h0
//                 h' = φ(W h + B[:,σ] + c)
//   second-order  W d×(S·d), h0; one-hot embeddings, so column block σ
//                 W[:, σd : σd+d] is the transition matrix for σ
//                 h' = φ(W_σ h)
//   lstm          B, Wi Ui Wf Uf Wo Uo W U, h0, c0
//                 gates x = sigmoid(Wx b + Ux h); c' = f⊙c + i⊙tanh(W b + U h)
//                 h' = o⊙tanh(c')
//   gru           B, Wz Uz Wr Ur W, h0
//                 h' = (1−z)⊙tanh(W(h⊙r) + b) + z⊙h
// Every cell ends with the head O (out×d) and Ob (out×1); out is 1 for a
// recognizer and S for a language model.
class RnnModel {
 public:
  RnnModel(CellKind kind, Activation activation, std::size_t dim, Alphabet alphabet, Head head);

  CellKind kind() const noexcept { return kind_; }
  Activation activation() const noexcept { return activation_; }
  std::size_t dim() const noexcept { return dim_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  Head head() const noexcept { return head_; }
  std::size_t num_inputs() const noexcept { return alphabet_.size() + (head_ == Head::Lm ? 1 : 0); }
  std::size_t num_outputs() const noexcept { return head_ == Head::Lm ? alphabet_.size() + 1 : 1; }
  // Index of `$` among LM inputs and outputs.
  Symbol end_marker() const noexcept { return alphabet_.size(); }

  std::vector<Param>& params() noexcept { return params_; }
  const std::vector<Param>& params() const noexcept { return params_; }
  Eigen::MatrixXd& param(std::string_view name);
  const Eigen::MatrixXd& param(std::string_view name) const;
  std::size_t parameter_count() const;
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);

  HiddenState initial_state() const;
  HiddenState step(const HiddenState& state, Symbol s) const;
  HiddenState run(const Word& w) const;
  Eigen::VectorXd logits(const HiddenState& state) const;

 private:
  CellKind kind_;
  Activation activation_;
  std::size_t dim_;
  Alphabet alphabet_;
  Head head_;
  std::vector<Param> params_;
};

// Fresh i.i.d. N(0, stddev²) draw for every parameter.
void randomize(RnnModel& model, double stddev, std::uint64_t seed);

struct Classification {
  bool accept;
  double confidence;
};

// Confidence exactly 0.5 rejects.
Classification recognizer_classify(const RnnModel& model, const Word& w);

Eigen::VectorXd softmax2(const Eigen::VectorXd& x);

// Product of |w|+1 next-symbol probabilities: feed `$`, then w, reading the
// probability of each following symbol and finally of `$`.
double lm_weight(const RnnModel& model, const Word& w);

// Σ w_i 4^{-i} over a string of '0'/'1' characters.
Rational enc4(std::string_view bits);

struct LipschitzReport {
  double bound;
  bool contractive;
};

// Frobenius norm of the recurrent matrix; first-order cells only.
LipschitzReport lipschitz_bound(const RnnModel& model);

// max ‖step(x,σ) − step(y,σ)‖ / ‖x − y‖ over the given pairs.
double empirical_lipschitz(const RnnModel& model,
                           const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs,
                           Symbol s);

// Second-order sigmoid recognizer simulating `dfa` with one-hot states;
// larger gains saturate harder.
RnnModel embed_dfa(const Dfa& dfa, double gain = 20.0);

}  // namespace fsmx
