#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fsmx/automata_io.hpp"
#include "fsmx/oracle.hpp"
#include "fsmx/rnn.hpp"
#include "fsmx/sat.hpp"
#include "fsmx/wfa.hpp"

namespace fsmx {

// A function Σ* → R evaluated incrementally: a prefix is summarized by a
// real vector so brute-force sweeps share work between words.
class WeightedLanguage {
 public:
  virtual ~WeightedLanguage() = default;

  virtual const Alphabet& alphabet() const = 0;
  virtual Eigen::VectorXd start() const = 0;
  virtual Eigen::VectorXd extend(const Eigen::VectorXd& prefix, Symbol s) const = 0;
  // Weight of the word whose prefix summary is given.
  virtual double finish(const Eigen::VectorXd& prefix) const = 0;

  double weight(const Word& w) const;
};

class WfaLanguage final : public WeightedLanguage {
 public:
  explicit WfaLanguage(Wfa wfa) : wfa_(std::move(wfa)) {}
  explicit WfaLanguage(const Pfa& pfa) : wfa_(pfa.wfa()) {}

  const Alphabet& alphabet() const override { return wfa_.alphabet(); }
  Eigen::VectorXd start() const override { return wfa_.alpha(); }
  Eigen::VectorXd extend(const Eigen::VectorXd& prefix, Symbol s) const override;
  double finish(const Eigen::VectorXd& prefix) const override { return prefix.dot(wfa_.beta()); }

 private:
  Wfa wfa_;
};

// lm_weight of a language-model RNN. The summary is [h; c; running product].
class RnnLmLanguage final : public WeightedLanguage {
 public:
  explicit RnnLmLanguage(RnnModel model);

  const Alphabet& alphabet() const override { return model_.alphabet(); }
  Eigen::VectorXd start() const override;
  Eigen::VectorXd extend(const Eigen::VectorXd& prefix, Symbol s) const override;
  double finish(const Eigen::VectorXd& prefix) const override;

 private:
  HiddenState unpack(const Eigen::VectorXd& v) const;
  Eigen::VectorXd pack(const HiddenState& st, double p) const;
  RnnModel model_;
};

// Reads words over `alphabet` as words of `base` through a symbol map.
class RelabeledLanguage final : public WeightedLanguage {
 public:
  RelabeledLanguage(std::shared_ptr<const WeightedLanguage> base, Alphabet alphabet, std::vector<Symbol> map);

  const Alphabet& alphabet() const override { return alphabet_; }
  Eigen::VectorXd start() const override { return base_->start(); }
  Eigen::VectorXd extend(const Eigen::VectorXd& prefix, Symbol s) const override {
    return base_->extend(prefix, map_.at(s));
  }
  double finish(const Eigen::VectorXd& prefix) const override { return base_->finish(prefix); }

 private:
  std::shared_ptr<const WeightedLanguage> base_;
  Alphabet alphabet_;
  std::vector<Symbol> map_;
};

class ScaledLanguage final : public WeightedLanguage {
 public:
  ScaledLanguage(std::shared_ptr<const WeightedLanguage> base, double factor)
      : base_(std::move(base)), factor_(factor) {}

  const Alphabet& alphabet() const override { return base_->alphabet(); }
  Eigen::VectorXd start() const override { return base_->start(); }
  Eigen::VectorXd extend(const Eigen::VectorXd& prefix, Symbol s) const override {
    return base_->extend(prefix, s);
  }
  double finish(const Eigen::VectorXd& prefix) const override { return factor_ * base_->finish(prefix); }

 private:
  std::shared_ptr<const WeightedLanguage> base_;
  double factor_;
};

// First-order relu LM with d = 2, zero recurrent and embedding weights and
// output bias (log2((1−2ε)/(4ε)), log2((1−2ε)/(4ε)), 0): every step emits
// each bit with 1/2 − ε and `$` with 2ε. Binary alphabet.
RnnModel trivial_rnnlm(double eps);
// The same step probabilities kept exact.
Rational trivial_weight_exact(const Rational& eps, std::size_t length);

// c_ε = 2(εs/k)(1/2−ε)^n(1−4ε)/(2ε).
Rational c_epsilon(std::size_t n, std::size_t k, const Rational& eps, const Rational& s);
Rational default_slack(std::size_t k);  // k − 1/2

struct ReductionBundle {
  SatFormula formula;
  Rational epsilon;
  Rational s;
  Rational c_eps;
  ExactPfa exact_pfa;
  Pfa pfa;
  RnnModel rnnlm;
};

// Requires 0 < ε < 1/4 and s ∈ [k−1, k) (default k − 1/2).
ReductionBundle make_bundle(const SatFormula& f, const Rational& eps, std::optional<Rational> s = std::nullopt);

// Writes pfa.json, rnn.json and meta.json into `dir` (created if needed).
void write_bundle(const std::filesystem::path& dir, const ReductionBundle& b);
Json bundle_meta(const ReductionBundle& b);

struct SatDecision {
  bool satisfiable;
  Rational d_inf;  // exact max over Σ^n of |R(w) − A(w)|
  Rational c_eps;
  Word witness;    // length-lex least maximizer
};

// Exact: R and A are evaluated in rationals over every w ∈ Σ^n.
SatDecision decide_sat(const SatFormula& f, const Rational& eps, std::optional<Rational> s = std::nullopt);

inline constexpr double kEnumerationGuard = 1e7;

struct SupDistance {
  double value;
  Word witness;
};

// max |a(w) − b(w)| over Σ^{≤N}; ties go to the length-lex least word.
// Throws GuardExceeded when |Σ|^N > 10^7.
SupDistance dist_inf_finite(const WeightedLanguage& a, const WeightedLanguage& b, std::size_t max_len);

enum class Verdict { Yes, No, Inconclusive };
std::string to_string(Verdict v);

struct EnumerationResult {
  Verdict verdict;
  std::optional<Word> witness;
  std::size_t strings_enumerated;
  double mass_a;
  double mass_b;
};

// Walks Σ* in length-lex order: yes at the first |a(w) − b(w)| > c, no once
// both cumulative masses reach 1 − c, inconclusive after `cap` strings.
EnumerationResult tchebychev_enumerate(const WeightedLanguage& a, const WeightedLanguage& b, double c,
                                       std::size_t cap = 1000000);

inline constexpr double kEqualityTolerance = 1e-12;

// Length-lex least w ∈ Σ^{≤m} with |a(w) − b(w)| > 1e-12, or nullopt.
std::optional<Word> eq_finite(const WeightedLanguage& a, const WeightedLanguage& b, std::size_t m);
// Recognizer version: first w ∈ Σ^{≤m} labeled differently.
std::optional<Word> eq_finite(const StateMachineOracle& a, const StateMachineOracle& b, std::size_t m);

// Cut-point intersection over finite support: a length-lex least
// w ∈ Σ^{≤m} with a(w) > λa and b(w) > λb.
std::optional<Word> cut_intersection_finite(const WeightedLanguage& a, double lambda_a, const WeightedLanguage& b,
                                            double lambda_b, std::size_t m);

}  // namespace fsmx
