#include "fsmx/oracle_learning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "fsmx/error.hpp"
#include "fsmx/rpni.hpp"
#include "fsmx/tomita.hpp"

namespace fsmx {

void check_config(const LearnerConfig& cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
  if (!(cfg.C >= 0.0)) throw InvalidInput("C must be nonnegative");
  if (cfg.size_cap == 0) throw InvalidInput("DFA size cap must be positive");
}

std::size_t exhaustive_size_limit(std::size_t k) {
  std::size_t n = 0;
  while (std::pow(static_cast<double>(n + 1), static_cast<double>((n + 1) * k)) <= kExhaustiveTables) ++n;
  return n;
}

double empirical_risk(const Dfa& dfa, const LabeledSample& sample) {
  if (sample.empty()) throw InvalidInput("empirical risk of an empty sample");
  std::size_t wrong = 0;
  for (const auto& it : sample.items) wrong += dfa.run(it.word) != it.label ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(sample.size());
}

double srm_penalty(std::size_t alphabet_size, std::size_t n, std::size_t m, double C) {
  if (n == 0 || m == 0) throw InvalidInput("penalty needs n >= 1 and m >= 1");
  const double nn = static_cast<double>(n);
  return C * std::sqrt(static_cast<double>(alphabet_size) * nn * (std::log(nn) + 1.0) / static_cast<double>(m));
}

double srm_objective(const Dfa& dfa, const LabeledSample& sample, double C) {
  return empirical_risk(dfa, sample) + srm_penalty(sample.alphabet.size(), dfa.size(), sample.size(), C);
}

namespace {

// Prefix tree of weighted labeled words: parents precede children, so a
// single pass in node order runs any transition table over every word.
struct WeightedTree {
  std::vector<std::size_t> parent{0};
  std::vector<Symbol> symbol{0};
  std::vector<double> pos{0.0};
  std::vector<double> neg{0.0};

  void add(const Word& w, bool label, double weight, std::map<Word, std::size_t>& index) {
    std::size_t node = 0;
    Word prefix;
    for (Symbol s : w) {
      prefix.push_back(s);
      auto [it, fresh] = index.emplace(prefix, parent.size());
      if (fresh) {
        parent.push_back(node);
        symbol.push_back(s);
        pos.push_back(0.0);
        neg.push_back(0.0);
      }
      node = it->second;
    }
    (label ? pos : neg)[node] += weight;
  }
};

struct TableSearch {
  double risk;
  Dfa dfa;
};

// Minimum over all n-state transition tables (initial state 0) of the
// weighted misclassification; accepting states are chosen per table by
// majority, ties rejecting. The first minimal table in counter order wins.
TableSearch best_table(const WeightedTree& tree, const Alphabet& alphabet, std::size_t n) {
  const std::size_t k = alphabet.size();
  const std::size_t nodes = tree.parent.size();
  std::vector<StateId> delta(n * k, 0);
  std::vector<StateId> at(nodes, 0);
  std::vector<double> pos(n), neg(n);
  double best = std::numeric_limits<double>::infinity();
  std::vector<StateId> best_delta = delta;
  while (true) {
    std::fill(pos.begin(), pos.end(), 0.0);
    std::fill(neg.begin(), neg.end(), 0.0);
    for (std::size_t i = 0; i < nodes; ++i) {
      if (i > 0) at[i] = delta[at[tree.parent[i]] * k + tree.symbol[i]];
      pos[at[i]] += tree.pos[i];
      neg[at[i]] += tree.neg[i];
    }
    double risk = 0.0;
    for (std::size_t q = 0; q < n; ++q) risk += std::min(pos[q], neg[q]);
    if (risk < best - 1e-15) {
      best = risk;
      best_delta = delta;
    }
    // Mixed-radix increment.
    std::size_t i = 0;
    while (i < delta.size() && ++delta[i] == n) delta[i++] = 0;
    if (i == delta.size()) break;
  }
  // Recompute labels for the winning table.
  std::fill(pos.begin(), pos.end(), 0.0);
  std::fill(neg.begin(), neg.end(), 0.0);
  for (std::size_t i = 0; i < nodes; ++i) {
    if (i > 0) at[i] = best_delta[at[tree.parent[i]] * k + tree.symbol[i]];
    pos[at[i]] += tree.pos[i];
    neg[at[i]] += tree.neg[i];
  }
  std::vector<bool> accepting(n);
  for (std::size_t q = 0; q < n; ++q) accepting[q] = pos[q] > neg[q];
  return {best, Dfa(alphabet, n, 0, std::move(best_delta), std::move(accepting))};
}

void check_exhaustive(std::size_t k, std::size_t cap) {
  if (cap > exhaustive_size_limit(k))
    throw GuardExceeded("exhaustive DFA enumeration up to size " + std::to_string(cap) + " over " +
                        std::to_string(k) + " symbols exceeds 1e6 transition tables per size");
}

WeightedTree support_tree(const ReferenceLm& lm, const Labeler& target) {
  const auto support = lm.support();
  if (!support) throw InvalidInput("exact risk needs a reference distribution with finite support");
  WeightedTree tree;
  std::map<Word, std::size_t> index{{Word{}, 0}};
  for (const auto& sw : *support) tree.add(sw.word, target(sw.word), sw.prob, index);
  return tree;
}

}  // namespace

SrmResult learn_srm(const LabeledSample& sample, const LearnerConfig& cfg) {
  check_config(cfg);
  const Alphabet& alphabet = sample.alphabet;
  const std::size_t k = alphabet.size();
  const std::size_t m = sample.size();
  if (m == 0) throw InvalidInput("learn_srm needs a nonempty sample");

  WeightedTree tree;
  std::map<Word, std::size_t> index{{Word{}, 0}};
  for (const auto& it : sample.items) {
    alphabet.check(it.word);
    tree.add(it.word, it.label, 1.0, index);
  }

  std::optional<SrmResult> best;
  std::vector<SizeTrace> trace;
  auto offer = [&](const Dfa& raw) {
    Dfa d = minimize(raw);
    const double risk = empirical_risk(d, sample);
    const double pen = srm_penalty(k, d.size(), m, cfg.C);
    if (!best || risk + pen < best->objective - 1e-12 ||
        (std::abs(risk + pen - best->objective) <= 1e-12 && d.size() < best->dfa.size()))
      best = SrmResult{d, risk, pen, risk + pen, {}};
  };

  const std::size_t exhaustive = std::min(cfg.size_cap, exhaustive_size_limit(k));
  for (std::size_t n = 1; n <= exhaustive; ++n) {
    TableSearch t = best_table(tree, alphabet, n);
    const double risk = t.risk / static_cast<double>(m);
    trace.push_back({n, risk, risk + srm_penalty(k, n, m, cfg.C), true});
    offer(t.dfa);
  }

  if (cfg.size_cap > exhaustive) {
    // Majority label per distinct word, in first-occurrence order.
    std::map<Word, std::pair<std::size_t, std::size_t>> votes;
    std::vector<Word> order;
    for (const auto& it : sample.items) {
      auto [pos, fresh] = votes.emplace(it.word, std::make_pair(0, 0));
      if (fresh) order.push_back(it.word);
      (it.label ? pos->second.first : pos->second.second) += 1;
    }
    std::map<std::size_t, double> rpni_best;
    for (std::size_t j = 1; j <= 10; ++j) {
      LabeledSample part{alphabet, {}, sample.meta};
      const std::size_t upto = (order.size() * j + 9) / 10;
      for (std::size_t i = 0; i < upto; ++i) {
        const auto& [p, n] = votes.at(order[i]);
        part.items.push_back({order[i], p > n});
      }
      Dfa d = rpni(part);
      if (d.size() > cfg.size_cap) continue;
      const double risk = empirical_risk(d, sample);
      auto [it, fresh] = rpni_best.emplace(d.size(), risk);
      if (!fresh) it->second = std::min(it->second, risk);
      if (d.size() > exhaustive) offer(d);
    }
    for (const auto& [n, risk] : rpni_best)
      if (n > exhaustive) trace.push_back({n, risk, risk + srm_penalty(k, n, m, cfg.C), false});
  }
  std::sort(trace.begin(), trace.end(), [](const SizeTrace& a, const SizeTrace& b) { return a.size < b.size; });
  best->trace = std::move(trace);
  return *best;
}

std::size_t sample_size_bound(double eps, double delta, std::size_t alphabet_size, double C, double c) {
  if (!(eps > 0.0 && delta > 0.0 && delta <= 1.0 && C > 0.0 && c > 0.0 && alphabet_size > 0))
    throw InvalidInput("sample_size_bound needs positive parameters and delta <= 1");
  const double x = c * static_cast<double>(alphabet_size) / eps * (std::log(c / eps) + 1.0) + std::log(1.0 / delta);
  if (!(x > 0.0)) return 1;
  auto holds = [&](double m) { return 2.0 * C * std::sqrt(x / m) <= eps; };
  double m = std::max(1.0, std::ceil(4.0 * C * C * x / (eps * eps)));
  while (!holds(m)) m += 1.0;
  while (m > 1.0 && holds(m - 1.0)) m -= 1.0;
  return static_cast<std::size_t>(m);
}

double generalization_bound(std::size_t m, std::size_t n, double delta, std::size_t alphabet_size, double C,
                            bool weighted) {
  if (m == 0 || n == 0) throw InvalidInput("generalization bound needs m >= 1 and n >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidInput("delta must lie in (0, 1]");
  const double nn = static_cast<double>(n);
  // ln(1/(δ 2^{-n})) = ln(1/δ) + n ln 2
  const double conf = std::log(1.0 / delta) + (weighted ? nn * std::log(2.0) : 0.0);
  return C * std::sqrt((static_cast<double>(alphabet_size) * nn * (std::log(nn) + 1.0) + conf) /
                       static_cast<double>(m));
}

std::vector<ScoredWord> most_probable_strings(const ReferenceLm& lm, std::size_t count,
                                              const std::set<Word>& history) {
  return lm.most_probable(history, count);
}

MpsResult learn_mps(const ReferenceLm& lm, const Labeler& membership, std::size_t n) {
  std::vector<ScoredWord> top = n == 0 ? std::vector<ScoredWord>{} : lm.most_probable({}, n);
  LabeledSample sample{lm.alphabet(), {}, {"most-probable", 0, 0}};
  double mass = 0.0;
  for (const auto& sw : top) {
    sample.items.push_back({sw.word, membership(sw.word)});
    mass += sw.prob;
  }
  return MpsResult{rpni(sample), mass, std::move(top)};
}

double true_risk(const Dfa& dfa, const ReferenceLm& lm, const Labeler& target) {
  const auto support = lm.support();
  if (!support) throw InvalidInput("exact risk needs a reference distribution with finite support");
  double risk = 0.0;
  for (const auto& sw : *support)
    if (dfa.run(sw.word) != target(sw.word)) risk += sw.prob;
  return risk;
}

std::vector<double> best_risk_by_size(const ReferenceLm& lm, const Labeler& target, std::size_t cap) {
  if (cap == 0) throw InvalidInput("size cap must be positive");
  check_exhaustive(lm.alphabet().size(), cap);
  const WeightedTree tree = support_tree(lm, target);
  std::vector<double> out;
  for (std::size_t n = 1; n <= cap; ++n) out.push_back(best_table(tree, lm.alphabet(), n).risk);
  return out;
}

std::size_t estimate_zeta(const ReferenceLm& lm, const Labeler& target, double eps, std::size_t cap) {
  if (!(eps > 0.0)) throw InvalidInput("epsilon must be positive");
  const auto risks = best_risk_by_size(lm, target, cap);
  const double inf = *std::min_element(risks.begin(), risks.end());
  for (std::size_t i = 0; i < risks.size(); ++i)
    if (risks[i] < inf + eps) return i + 1;
  return risks.size();
}

bool test_oracle(const Dfa& candidate, const ReferenceLm& lm, const Labeler& target, double eps, bool realizable,
                 std::size_t cap) {
  const double risk = true_risk(candidate, lm, target);
  if (realizable) return risk <= eps;
  const auto risks = best_risk_by_size(lm, target, cap);
  return risk <= *std::min_element(risks.begin(), risks.end()) + eps;
}

CalibrationResult calibrate_c(const std::vector<double>& grid, const std::vector<int>& grammars, std::size_t m,
                              std::size_t max_len, double noise, std::size_t trials, std::uint64_t seed) {
  if (grid.empty() || grammars.empty() || trials == 0 || m == 0)
    throw InvalidInput("calibration needs a grid, grammars, trials and a sample size");
  // Fixed tasks shared by every C.
  std::vector<std::pair<Dfa, LabeledSample>> tasks;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(noise);
  for (int g : grammars)
    for (std::size_t t = 0; t < trials; ++t) {
      Dfa target = tomita_dfa(g);
      LabeledSample s{target.alphabet(), {}, {"uniform", max_len, seed}};
      for (std::size_t i = 0; i < m; ++i) {
        Word w = uniform_word(rng, 2, max_len);
        s.items.push_back({w, target.run(w) != flip(rng)});
      }
      tasks.emplace_back(std::move(target), std::move(s));
    }
  CalibrationResult out{grid.front(), {}};
  double best = -1.0;
  for (double C : grid) {
    LearnerConfig cfg;
    cfg.C = C;
    std::size_t hits = 0;
    for (const auto& [target, s] : tasks) hits += equivalent(learn_srm(s, cfg).dfa, target) ? 1 : 0;
    const double rate = static_cast<double>(hits) / static_cast<double>(tasks.size());
    out.success.emplace_back(C, rate);
    if (rate > best) {
      best = rate;
      out.C = C;
    }
  }
  return out;
}

Json to_json(const LearnerReport& r) {
  auto opt = [](const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); };
  return Json{{"method", r.method},
              {"config",
               {{"C", r.config.C},
                {"delta", r.config.delta},
                {"epsilon", r.config.epsilon},
                {"size_cap", r.config.size_cap}}},
              {"m", r.m},
              {"returned_dfa", r.dfa ? to_json(*r.dfa) : Json(nullptr)},
              {"L_S", opt(r.empirical_risk)},
              {"L_P", opt(r.true_risk)},
              {"covered_mass", opt(r.covered_mass)},
              {"bound_values", r.bounds},
              {"seed", r.config.seed}};
}

}  // namespace fsmx
