#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fsmx/automata_io.hpp"
#include "fsmx/dfa.hpp"
#include "fsmx/reference_lm.hpp"
#include "fsmx/sample.hpp"
#include "fsmx/training.hpp"

namespace fsmx {

struct LearnerConfig {
  double C = 1.0;
  double delta = 0.05;
  double epsilon = 0.1;
  std::size_t size_cap = 4;
  std::uint64_t seed = 42;
};

// Throws InvalidInput unless δ, ε ∈ (0,1), C ≥ 0 and the size cap is positive.
void check_config(const LearnerConfig& cfg);

// Transition tables with n^{n|Σ|} ≤ 10^6 are searched exhaustively.
inline constexpr double kExhaustiveTables = 1e6;
// Largest n whose tables over k symbols fit the exhaustive budget.
std::size_t exhaustive_size_limit(std::size_t k);

// Fraction of items the DFA labels wrongly.
double empirical_risk(const Dfa& dfa, const LabeledSample& sample);
// C·sqrt(|Σ| n (ln n + 1) / m)
double srm_penalty(std::size_t alphabet_size, std::size_t n, std::size_t m, double C);
double srm_objective(const Dfa& dfa, const LabeledSample& sample, double C);

struct SizeTrace {
  std::size_t size;
  double best_risk;
  double objective;
  bool exhaustive;
};

struct SrmResult {
  Dfa dfa;
  double empirical_risk;
  double penalty;
  double objective;
  std::vector<SizeTrace> trace;
};

// Exhaustive search over sizes 1..min(cap, exhaustive limit); past that,
// RPNI on growing prefixes of the (majority-deduplicated) sample supplies
// candidates up to the cap. Returns the objective minimizer, smaller sizes
// winning ties.
SrmResult learn_srm(const LabeledSample& sample, const LearnerConfig& cfg);

// Smallest m with 2C·sqrt((c|Σ|(1/ε)(ln(c/ε)+1) + ln(1/δ)) / m) ≤ ε.
std::size_t sample_size_bound(double eps, double delta, std::size_t alphabet_size, double C, double c);

// C·sqrt((|Σ| n (ln n + 1) + ln(1/δ')) / m), δ' = δ, or δ·2^{−n} when
// `weighted` (the per-size share of the confidence budget).
double generalization_bound(std::size_t m, std::size_t n, double delta, std::size_t alphabet_size, double C,
                            bool weighted = false);

std::vector<ScoredWord> most_probable_strings(const ReferenceLm& lm, std::size_t count,
                                              const std::set<Word>& history = {});

struct MpsResult {
  Dfa dfa;
  double covered_mass;
  std::vector<ScoredWord> queried;
};

// Labels the n most probable words with `membership` and folds them with
// RPNI. On a finite-support lm, L_P(dfa) ≤ 1 − covered_mass.
MpsResult learn_mps(const ReferenceLm& lm, const Labeler& membership, std::size_t n);

// Exact L_P: probability mass of support words the DFA labels unlike
// `target`. Requires finite support.
double true_risk(const Dfa& dfa, const ReferenceLm& lm, const Labeler& target);

// Minimum exact L_P over all DFAs of each size 1..cap (index 0 is size 1).
std::vector<double> best_risk_by_size(const ReferenceLm& lm, const Labeler& target, std::size_t cap);

// Smallest size whose best L_P is below inf + ε, inf taken over sizes ≤ cap.
// Throws GuardExceeded when cap is past the exhaustive limit.
std::size_t estimate_zeta(const ReferenceLm& lm, const Labeler& target, double eps, std::size_t cap = 4);

// Realizable: L_P(candidate) ≤ ε. Otherwise L_P ≤ inf + ε with the inf
// enumerated over sizes ≤ cap; the general inf is not computable.
bool test_oracle(const Dfa& candidate, const ReferenceLm& lm, const Labeler& target, double eps, bool realizable,
                 std::size_t cap = 4);

struct CalibrationResult {
  double C;
  std::vector<std::pair<double, double>> success;  // (C, success rate)
};

// Picks the C (first in `grid` on ties) with the highest rate of exact
// recovery on Tomita tasks: m uniform words of length ≤ max_len, a fraction
// `noise` of labels flipped, learned with learn_srm at size cap 4.
CalibrationResult calibrate_c(const std::vector<double>& grid, const std::vector<int>& grammars, std::size_t m,
                              std::size_t max_len, double noise, std::size_t trials, std::uint64_t seed);

struct LearnerReport {
  std::string method;
  LearnerConfig config;
  std::size_t m = 0;
  std::optional<Dfa> dfa;
  std::optional<double> empirical_risk;
  std::optional<double> true_risk;
  std::optional<double> covered_mass;
  Json bounds = Json::object();
};

Json to_json(const LearnerReport& r);

}  // namespace fsmx
