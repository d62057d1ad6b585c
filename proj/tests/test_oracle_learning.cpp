#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "fsmx/error.hpp"
#include "fsmx/oracle_learning.hpp"
#include "fsmx/reference_lm.hpp"
#include "fsmx/rpni.hpp"
#include "fsmx/tomita.hpp"
#include "fsmx/training.hpp"
#include "helpers.hpp"

using namespace fsmx;
using fsmx::test::W;

namespace {

const Alphabet kBin = Alphabet::binary();

Labeler of(const Dfa& d) {
  return [d](const Word& w) { return d.run(w); };
}

// Every DFA over {0,1} with exactly n states and initial state 0.
void for_each_dfa(std::size_t n, const std::function<void(const Dfa&)>& f) {
  std::vector<StateId> delta(2 * n, 0);
  while (true) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      std::vector<bool> acc(n);
      for (std::size_t q = 0; q < n; ++q) acc[q] = (mask >> q) & 1;
      f(Dfa(kBin, n, 0, delta, acc));
    }
    std::size_t i = 0;
    while (i < delta.size() && ++delta[i] == n) delta[i++] = 0;
    if (i == delta.size()) return;
  }
}

double exact_risk(const Dfa& d, const FiniteSupportLm& lm, const Dfa& target) {
  double r = 0.0;
  const auto support = lm.support();
  for (const auto& sw : *support)
    if (d.run(sw.word) != target.run(sw.word)) r += sw.prob;
  return r;
}

LabeledSample draw(const ReferenceLm& lm, const Labeler& target, std::size_t m, std::uint64_t seed,
                   double noise = 0.0) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(noise);
  LabeledSample s{lm.alphabet(), {}, {}};
  for (std::size_t i = 0; i < m; ++i) {
    Word w = lm.sample(rng);
    const bool label = target(w) != flip(rng);
    s.items.push_back({std::move(w), label});
  }
  return s;
}

Pfa unary_half() {
  Eigen::VectorXd init(1), fin(1);
  init << 1.0;
  fin << 0.5;
  Eigen::MatrixXd t(1, 1);
  t << 0.5;
  return Pfa(Alphabet({"a"}), init, {t}, fin, true);
}

}  // namespace

TEST_CASE("srm_objective examples") {
  LabeledSample neg{kBin, {}, {}};
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) neg.items.push_back({uniform_word(rng, 2, 6), false});
  const Dfa reject = Dfa::trivial(kBin, false), accept = Dfa::trivial(kBin, true);
  CHECK(srm_objective(reject, neg, 1.0) == doctest::Approx(std::sqrt(0.02)));
  CHECK(srm_objective(reject, neg, 1.0) == doctest::Approx(0.1414).epsilon(1e-4));
  CHECK(srm_objective(accept, neg, 0.0) == 1.0);
  CHECK(srm_objective(tomita_dfa(2), neg, 0.0) == empirical_risk(tomita_dfa(2), neg));
  CHECK(srm_penalty(2, 3, 50, 2.0) == doctest::Approx(2.0 * std::sqrt(2.0 * 3 * (std::log(3.0) + 1) / 50)));
}

TEST_CASE("learn_srm examples") {
  const Dfa t1 = tomita_dfa(1);
  DatasetSpec spec;
  spec.strategy = Strategy::UniformUpsampled;
  spec.max_len = 10;
  spec.size = 500;
  spec.seed = 2;
  const LabeledSample s1 = gen_dataset(kBin, of(t1), spec, &t1);
  LearnerConfig cfg;
  cfg.size_cap = 4;
  const SrmResult r = learn_srm(s1, cfg);
  CHECK(equivalent(r.dfa, t1));
  CHECK(r.empirical_risk == 0.0);
  CHECK(r.trace.size() == 4);

  LabeledSample neg{kBin, {{W({0}), false}, {W({1, 1}), false}}, {}};
  const SrmResult n = learn_srm(neg, cfg);
  CHECK(n.dfa.size() == 1);
  CHECK_FALSE(n.dfa.accepting(0));

  cfg.size_cap = 0;
  CHECK_THROWS_AS(learn_srm(neg, cfg), InvalidInput);
}

TEST_CASE("property: exhaustive srm returns an objective minimizer") {
  const FiniteSupportLm lm = FiniteSupportLm::uniform(kBin, 5);
  for (int g : {2, 3, 5}) {
    const Dfa t = tomita_dfa(g);
    const LabeledSample s = draw(lm, of(t), 120, static_cast<std::uint64_t>(g), 0.05);
    LearnerConfig cfg;
    cfg.size_cap = 3;
    cfg.C = 0.3;
    const SrmResult r = learn_srm(s, cfg);
    CHECK(r.objective == doctest::Approx(srm_objective(r.dfa, s, cfg.C)));
    double best_risk = 1.0;
    for (std::size_t n = 1; n <= 3; ++n)
      for_each_dfa(n, [&](const Dfa& d) {
        const double risk = empirical_risk(d, s);
        best_risk = std::min(best_risk, risk);
        // Every n-state table is a candidate of size n in the search.
        CHECK(risk + srm_penalty(2, n, s.size(), cfg.C) >= r.objective - 1e-12);
      });
    CHECK(r.empirical_risk <= best_risk + srm_penalty(2, 3, s.size(), cfg.C) + 1e-12);
  }
}

TEST_CASE("sample_size_bound") {
  const double inner = 20.0 * (std::log(10.0) + 1.0) + std::log(20.0);
  const std::size_t m = sample_size_bound(0.1, 0.05, 2, 1.0, 1.0);
  const auto holds = [&](double mm) { return 2.0 * std::sqrt(inner / mm) <= 0.1; };
  CHECK(holds(static_cast<double>(m)));
  CHECK_FALSE(holds(static_cast<double>(m - 1)));

  const double ratio = static_cast<double>(sample_size_bound(0.05, 0.05, 2, 1.0, 1.0)) / static_cast<double>(m);
  CHECK(ratio > 8.0);
  CHECK(ratio < 10.0);
  // δ → 1 drops the confidence term.
  const double no_delta = 20.0 * (std::log(10.0) + 1.0);
  const std::size_t m1 = sample_size_bound(0.1, 1.0 - 1e-12, 2, 1.0, 1.0);
  CHECK(m1 == static_cast<std::size_t>(std::ceil(400.0 * no_delta - 1e-6)));
}

TEST_CASE("generalization_bound") {
  CHECK(generalization_bound(100, 1, 0.05, 2, 1.0) == doctest::Approx(std::sqrt((2.0 + std::log(20.0)) / 100)));
  CHECK(generalization_bound(200, 3, 0.05, 2, 1.0) ==
        doctest::Approx(generalization_bound(100, 3, 0.05, 2, 1.0) / std::sqrt(2.0)));
  CHECK(generalization_bound(10000, 5, 0.05, 2, 1.0) ==
        doctest::Approx(std::sqrt((10.0 * (std::log(5.0) + 1) + std::log(20.0)) / 10000)));
  for (std::size_t n = 1; n <= 8; ++n)
    CHECK(generalization_bound(500, n, 0.05, 2, 1.0, true) ==
          doctest::Approx(std::sqrt((2.0 * n * (std::log(n) + 1) + std::log(1.0 / (0.05 * std::ldexp(1.0, -static_cast<int>(n))))) / 500)));
  double budget = 0.0;
  for (int n = 1; n <= 60; ++n) budget += 0.05 * std::ldexp(1.0, -n);
  CHECK(budget <= 0.05);
}

TEST_CASE("most_probable_strings examples") {
  Eigen::VectorXd one(1);
  one << 1.0;
  const DpfaLm stop(Pfa(kBin, one, {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1)}, one, true));
  const auto top = most_probable_strings(stop, 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0].word.empty());
  CHECK_THROWS_AS(most_probable_strings(stop, 2), InvalidInput);

  const DpfaLm unary(unary_half());
  const auto u = most_probable_strings(unary, 3);
  REQUIRE(u.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(u[i].word == Word(i, 0));
    CHECK(u[i].prob == doctest::Approx(std::ldexp(1.0, -static_cast<int>(i) - 1)));
  }
  const auto skip = most_probable_strings(unary, 2, {Word{}, Word(2, 0)});
  CHECK(skip[0].word == Word(1, 0));
  CHECK(skip[1].word == Word(3, 0));
}

TEST_CASE("property: most probable strings match exhaustive enumeration") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    const DpfaLm lm(random_dpfa(rng, 1 + i % 4, kBin, 0.3));
    std::vector<double> all;
    Word w;
    do all.push_back(lm.prob(w));
    while (next_word(w, 2, 12));
    std::sort(all.rbegin(), all.rend());
    const auto top = most_probable_strings(lm, 10);
    REQUIRE(top.size() == 10);
    for (std::size_t j = 0; j < 10; ++j) {
      CHECK(top[j].prob == doctest::Approx(all[j]).epsilon(1e-12));
      CHECK(top[j].prob == doctest::Approx(lm.prob(top[j].word)).epsilon(1e-12));
      if (j > 0) CHECK(top[j].prob <= top[j - 1].prob);
    }
  }
}

TEST_CASE("learn_mps examples") {
  const Dfa t1 = tomita_dfa(1);
  const FiniteSupportLm small = FiniteSupportLm::uniform(kBin, 2);
  const MpsResult full = learn_mps(small, of(t1), 7);
  CHECK(full.covered_mass == doctest::Approx(1.0));
  CHECK(true_risk(full.dfa, small, of(t1)) == 0.0);

  const MpsResult none = learn_mps(small, of(t1), 0);
  CHECK(none.dfa.size() == 1);
  CHECK(none.covered_mass == 0.0);

  // Each symbol 1/4, stop 1/2: P(|w| ≥ t) = 2^{-t}, so c = ln 2.
  Eigen::VectorXd init(1), fin(1);
  init << 1.0;
  fin << 0.5;
  const Eigen::MatrixXd q = Eigen::MatrixXd::Constant(1, 1, 0.25);
  const DpfaLm geo(Pfa(kBin, init, {q, q}, fin, true));
  const double eps = 0.01;
  const auto t = static_cast<std::size_t>(std::ceil(std::log(1.0 / eps) / std::log(2.0)));
  const std::size_t n = words_up_to(2, t - 1);
  const MpsResult r = learn_mps(geo, of(tomita_dfa(4)), n);
  CHECK(r.covered_mass >= 1.0 - eps);
}

TEST_CASE("property: mps risk is bounded by uncovered mass") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    std::map<Word, double> weights;
    for (int j = 0; j < 40; ++j) weights[uniform_word(rng, 2, 7)] += 1.0 + static_cast<double>(rng() % 5);
    const FiniteSupportLm lm(kBin, weights);
    const Dfa target = tomita_dfa(1 + i % kTomitaCount);
    const MpsResult r = learn_mps(lm, of(target), 1 + static_cast<std::size_t>(i) % weights.size());
    CHECK(true_risk(r.dfa, lm, of(target)) <= 1.0 - r.covered_mass + 1e-12);
    CHECK(true_risk(r.dfa, lm, of(target)) == doctest::Approx(exact_risk(r.dfa, lm, target)));
  }
}

TEST_CASE("rpni") {
  const Dfa t2 = tomita_dfa(2);
  LabeledSample chr{kBin, {}, {}};
  Word w;
  do chr.items.push_back({w, t2.run(w)});
  while (next_word(w, 2, 6));
  CHECK(equivalent(rpni(chr), t2));

  const Dfa eps = rpni(LabeledSample{kBin, {{Word{}, true}}, {}});
  CHECK(eps.run({}));
  const Dfa empty = rpni(LabeledSample{kBin, {}, {}});
  CHECK(empty.size() == 1);
  CHECK_FALSE(empty.accepting(0));
  CHECK_THROWS_AS(rpni(LabeledSample{kBin, {{W({1}), true}, {W({1}), false}}, {}}), InvalidInput);
}

TEST_CASE("property: rpni is consistent with its sample") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Dfa target = fsmx::test::random_dfa(rng, 1 + i % 6);
    LabeledSample s{kBin, {}, {}};
    for (int j = 0; j < 5 + i % 40; ++j) {
      Word x = uniform_word(rng, 2, 8);
      s.items.push_back({x, target.run(x)});
    }
    const Dfa d = rpni(s);
    CHECK(empirical_risk(d, s) == 0.0);
    CHECK(minimize(d).size() == d.size());
  }
}

TEST_CASE("estimate_zeta") {
  const FiniteSupportLm lm = FiniteSupportLm::uniform(kBin, 4);
  for (double e : {0.01, 0.1, 0.5}) CHECK(estimate_zeta(lm, of(tomita_dfa(1)), e) <= 2);

  // Parity of 1s, checked against direct enumeration of sizes 1 and 2.
  const Dfa parity(kBin, 2, 0, {0, 1, 1, 0}, {true, false});
  double best[2] = {1.0, 1.0};
  for (std::size_t n = 1; n <= 2; ++n)
    for_each_dfa(n, [&](const Dfa& d) { best[n - 1] = std::min(best[n - 1], exact_risk(d, lm, parity)); });
  CHECK(best[0] == doctest::Approx(15.0 / 31));
  CHECK(best[1] == 0.0);
  const auto byn = best_risk_by_size(lm, of(parity), 2);
  CHECK(byn[0] == doctest::Approx(best[0]));
  CHECK(byn[1] == doctest::Approx(best[1]));
  for (double e : {0.1, 0.4, 0.48, 0.49, 0.9}) CHECK(estimate_zeta(lm, of(parity), e) == (best[0] < e ? 1u : 2u));

  CHECK(estimate_zeta(lm, of(tomita_dfa(5)), 1.0) == 1);
  CHECK_THROWS_AS(estimate_zeta(lm, of(parity), 0.1, 5), GuardExceeded);
}

TEST_CASE("test_oracle") {
  const FiniteSupportLm lm = FiniteSupportLm::uniform(kBin, 5);
  const Dfa t5 = tomita_dfa(5);
  CHECK(test_oracle(t5, lm, of(t5), 0.0, true));
  CHECK(test_oracle(t5, lm, of(t5), 0.0, false));
  Dfa flipped(kBin, t5.size(), t5.initial(), t5.delta(), [&] {
    auto a = t5.accepting_states();
    a.flip();
    return a;
  }());
  CHECK_FALSE(test_oracle(flipped, lm, of(t5), 0.99, true));
  CHECK_FALSE(test_oracle(flipped, lm, of(t5), 0.99, false));

  const DpfaLm infinite(unary_half());
  CHECK_THROWS_AS(test_oracle(Dfa::trivial(Alphabet({"a"}), true), infinite, [](const Word&) { return true; }, 0.1, true),
                  InvalidInput);
}

TEST_CASE("srm meets the test oracle at the sample-size bound") {
  const FiniteSupportLm lm = FiniteSupportLm::uniform(kBin, 6);
  const Dfa t5 = tomita_dfa(5);
  LearnerConfig cfg;
  cfg.epsilon = 0.1;
  cfg.delta = 0.05;
  cfg.size_cap = 4;
  const std::size_t m = sample_size_bound(cfg.epsilon, cfg.delta, 2, cfg.C, 1.0);
  int passed = 0;
  const int trials = 200;
  for (int i = 0; i < trials; ++i) {
    const LabeledSample s = draw(lm, of(t5), m, 1000 + static_cast<std::uint64_t>(i));
    passed += test_oracle(learn_srm(s, cfg).dfa, lm, of(t5), cfg.epsilon, true);
  }
  CHECK(passed >= static_cast<int>((1.0 - cfg.delta) * trials));
}

TEST_CASE("calibration and reports") {
  const auto a = calibrate_c({0.25, 1.0}, {1, 2}, 100, 6, 0.0, 2, 7);
  const auto b = calibrate_c({0.25, 1.0}, {1, 2}, 100, 6, 0.0, 2, 7);
  CHECK(a.C == b.C);
  CHECK(a.success == b.success);
  CHECK((a.C == 0.25 || a.C == 1.0));
  CHECK(a.success.size() == 2);

  LearnerReport r;
  r.method = "srm";
  r.m = 10;
  r.dfa = tomita_dfa(1);
  r.empirical_risk = 0.0;
  const Json j = to_json(r);
  for (const char* key : {"method", "config", "m", "returned_dfa", "L_S", "bound_values", "seed"}) CHECK(j.contains(key));

  LearnerConfig bad;
  bad.delta = 1.0;
  CHECK_THROWS_AS(check_config(bad), InvalidInput);
  CHECK(exhaustive_size_limit(2) == 4);
}
