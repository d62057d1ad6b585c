#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fsmx/alphabet.hpp"

namespace fsmx {

// Weighted automaton over the reals: f(w) = αᵀ A_{w1} ... A_{wn} β.
class Wfa {
 public:
  Wfa(Alphabet alphabet, Eigen::VectorXd alpha, std::vector<Eigen::MatrixXd> transitions,
      Eigen::VectorXd beta);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(alpha_.size()); }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  const Eigen::VectorXd& beta() const noexcept { return beta_; }
  const Eigen::MatrixXd& transition(Symbol s) const { return transitions_.at(s); }
  const std::vector<Eigen::MatrixXd>& transitions() const noexcept { return transitions_; }

  // Row vector αᵀ A_w.
  Eigen::RowVectorXd forward(const Word& w) const;
  double weight(const Word& w) const;

 private:
  Alphabet alphabet_;
  Eigen::VectorXd alpha_;
  std::vector<Eigen::MatrixXd> transitions_;
  Eigen::VectorXd beta_;
};

// Probabilistic automaton. The final-weight vector plays the role of β.
// Stochasticity is row-wise over all symbols plus the final weight:
//   Σ_σ Σ_j A_σ[i,j] + final[i] = 1 for every state i.
class Pfa {
 public:
  Pfa(Alphabet alphabet, Eigen::VectorXd initial, std::vector<Eigen::MatrixXd> transitions,
      Eigen::VectorXd final_weights, bool deterministic = false);

  const Wfa& wfa() const noexcept { return wfa_; }
  const Alphabet& alphabet() const noexcept { return wfa_.alphabet(); }
  std::size_t dim() const noexcept { return wfa_.dim(); }
  const Eigen::VectorXd& initial() const noexcept { return wfa_.alpha(); }
  const Eigen::VectorXd& final_weights() const noexcept { return wfa_.beta(); }
  const Eigen::MatrixXd& transition(Symbol s) const { return wfa_.transition(s); }
  bool deterministic() const noexcept { return deterministic_; }

  double weight(const Word& w) const { return wfa_.weight(w); }

 private:
  Wfa wfa_;
  bool deterministic_;
};

inline constexpr double kStochasticTolerance = 1e-9;

struct PfaViolation {
  std::string constraint;  // "initial-mass", "initial-negative", "transition-negative", ...
  std::optional<std::size_t> row;
  std::string message;
};

// nullopt when every invariant holds within 1e-9; otherwise the first
// violated constraint in a fixed scan order (initial, entries, rows,
// determinism).
std::optional<PfaViolation> validate(const Pfa& pfa);

// Σ_{|w|≤max_len} pfa(w), by iterating the state vector through Σ_σ A_σ.
double mass_up_to(const Pfa& pfa, std::size_t max_len);

}  // namespace fsmx
