#include "fsmx/wfa.hpp"

#include <cmath>

#include "fsmx/error.hpp"

namespace fsmx {

Wfa::Wfa(Alphabet alphabet, Eigen::VectorXd alpha, std::vector<Eigen::MatrixXd> transitions,
         Eigen::VectorXd beta)
    : alphabet_(std::move(alphabet)),
      alpha_(std::move(alpha)),
      transitions_(std::move(transitions)),
      beta_(std::move(beta)) {
  const auto n = alpha_.size();
  if (n == 0) throw ShapeMismatch("weighted automaton must have dimension >= 1");
  if (beta_.size() != n) throw ShapeMismatch("final vector length differs from initial vector");
  if (transitions_.size() != alphabet_.size())
    throw ShapeMismatch("need exactly one transition matrix per symbol");
  for (const auto& m : transitions_)
    if (m.rows() != n || m.cols() != n) throw ShapeMismatch("transition matrix has wrong shape");
}

Eigen::RowVectorXd Wfa::forward(const Word& w) const {
  Eigen::RowVectorXd v = alpha_.transpose();
  for (Symbol s : w) {
    if (s >= transitions_.size()) throw InvalidInput("word contains a symbol outside the alphabet");
    v = v * transitions_[s];
  }
  return v;
}

double Wfa::weight(const Word& w) const { return forward(w).dot(beta_); }

Pfa::Pfa(Alphabet alphabet, Eigen::VectorXd initial, std::vector<Eigen::MatrixXd> transitions,
         Eigen::VectorXd final_weights, bool deterministic)
    : wfa_(std::move(alphabet), std::move(initial), std::move(transitions), std::move(final_weights)),
      deterministic_(deterministic) {}

std::optional<PfaViolation> validate(const Pfa& pfa) {
  const double tol = kStochasticTolerance;
  const auto n = static_cast<Eigen::Index>(pfa.dim());
  const std::size_t k = pfa.alphabet().size();

  for (Eigen::Index i = 0; i < n; ++i)
    if (pfa.initial()(i) < -tol || !std::isfinite(pfa.initial()(i)))
      return PfaViolation{"initial-negative", static_cast<std::size_t>(i),
                          "initial weight of state " + std::to_string(i) + " is negative"};
  if (double mass = pfa.initial().sum(); std::abs(mass - 1.0) > tol)
    return PfaViolation{"initial-mass", std::nullopt,
                        "initial weights sum to " + std::to_string(mass) + ", not 1"};

  for (Eigen::Index i = 0; i < n; ++i) {
    if (pfa.final_weights()(i) < -tol || !std::isfinite(pfa.final_weights()(i)))
      return PfaViolation{"final-negative", static_cast<std::size_t>(i),
                          "final weight of state " + std::to_string(i) + " is negative"};
    for (Symbol s = 0; s < k; ++s)
      for (Eigen::Index j = 0; j < n; ++j)
        if (pfa.transition(s)(i, j) < -tol || !std::isfinite(pfa.transition(s)(i, j)))
          return PfaViolation{"transition-negative", static_cast<std::size_t>(i),
                              "negative transition weight from state " + std::to_string(i) +
                                  " on symbol '" + pfa.alphabet().name(s) + "'"};
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    double row = pfa.final_weights()(i);
    for (Symbol s = 0; s < k; ++s) row += pfa.transition(s).row(i).sum();
    if (std::abs(row - 1.0) > tol)
      return PfaViolation{"row-stochastic", static_cast<std::size_t>(i),
                          "outgoing plus final weight of state " + std::to_string(i) + " is " +
                              std::to_string(row) + ", not 1"};
  }

  if (pfa.deterministic()) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Symbol s = 0; s < k; ++s) {
        int nonzero = 0;
        for (Eigen::Index j = 0; j < n; ++j)
          if (std::abs(pfa.transition(s)(i, j)) > tol) ++nonzero;
        if (nonzero > 1)
          return PfaViolation{"deterministic", static_cast<std::size_t>(i),
                              "state " + std::to_string(i) + " has several transitions on '" +
                                  pfa.alphabet().name(s) + "'"};
      }
    int starts = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(pfa.initial()(i)) > tol) ++starts;
    if (starts > 1)
      return PfaViolation{"deterministic", std::nullopt, "deterministic PFA has several initial states"};
  }
  return std::nullopt;
}

double mass_up_to(const Pfa& pfa, std::size_t max_len) {
  Eigen::MatrixXd step = Eigen::MatrixXd::Zero(pfa.dim(), pfa.dim());
  for (const auto& m : pfa.wfa().transitions()) step += m;
  Eigen::RowVectorXd v = pfa.initial().transpose();
  double total = v.dot(pfa.final_weights());
  for (std::size_t l = 1; l <= max_len; ++l) {
    v = v * step;
    total += v.dot(pfa.final_weights());
  }
  return total;
}

}  // namespace fsmx
