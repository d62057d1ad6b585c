#include <random>

#include <benchmark/benchmark.h>

#include "fsmx/distances.hpp"
#include "fsmx/extraction.hpp"
#include "fsmx/oracle_learning.hpp"
#include "fsmx/reference_lm.hpp"
#include "fsmx/sat.hpp"
#include "fsmx/tomita.hpp"
#include "fsmx/training.hpp"

using namespace fsmx;

namespace {

const Alphabet kBin = Alphabet::binary();

Dfa random_dfa(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<StateId> delta(2 * n);
  std::vector<bool> acc(n);
  for (auto& t : delta) t = rng() % n;
  for (std::size_t q = 0; q < n; ++q) acc[q] = rng() % 2;
  return Dfa(kBin, n, 0, delta, acc);
}

void BM_Minimize(benchmark::State& st) {
  const Dfa d = random_dfa(static_cast<std::size_t>(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(minimize(d));
}
BENCHMARK(BM_Minimize)->Arg(8)->Arg(64)->Arg(512);

void BM_Equivalence(benchmark::State& st) {
  const Dfa a = random_dfa(static_cast<std::size_t>(st.range(0)), 2);
  const Dfa b = minimize(a);
  for (auto _ : st) benchmark::DoNotOptimize(equivalent(a, b));
}
BENCHMARK(BM_Equivalence)->Arg(8)->Arg(64)->Arg(512);

void BM_RnnStep(benchmark::State& st, CellKind kind) {
  RnnModel m(kind, Activation::Tanh, static_cast<std::size_t>(st.range(0)), kBin, Head::Recognizer);
  randomize(m, 0.3, 3);
  HiddenState h = m.initial_state();
  Symbol s = 0;
  for (auto _ : st) {
    h = m.step(h, s);
    s ^= 1;
    benchmark::DoNotOptimize(h.h.data());
  }
}
BENCHMARK_CAPTURE(BM_RnnStep, first_order, CellKind::FirstOrder)->Arg(20)->Arg(100);
BENCHMARK_CAPTURE(BM_RnnStep, lstm, CellKind::Lstm)->Arg(20)->Arg(100);
BENCHMARK_CAPTURE(BM_RnnStep, gru, CellKind::Gru)->Arg(20)->Arg(100);

void BM_Gradient(benchmark::State& st) {
  const Dfa t4 = tomita_dfa(4);
  DatasetSpec spec;
  spec.size = 100;
  const LabeledSample data = gen_dataset(kBin, [&](const Word& w) { return t4.run(w); }, spec, &t4);
  RnnModel m(CellKind::Lstm, Activation::Tanh, 20, kBin, Head::Recognizer);
  randomize(m, 0.3, 4);
  Eigen::VectorXd g;
  for (auto _ : st) benchmark::DoNotOptimize(loss_and_gradient(m, data, &g));
}
BENCHMARK(BM_Gradient)->Unit(benchmark::kMillisecond);

void BM_Extract(benchmark::State& st) {
  const RnnOracle oracle(embed_dfa(tomita_dfa(7)));
  ExtractionConfig c;
  c.method = static_cast<Method>(st.range(0));
  c.clusters = 5;
  for (auto _ : st) benchmark::DoNotOptimize(extract(oracle, c));
  st.SetLabel(to_string(c.method));
}
BENCHMARK(BM_Extract)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_DecideSat(benchmark::State& st) {
  std::mt19937_64 rng(5);
  const SatFormula f = random_formula(rng, static_cast<std::size_t>(st.range(0)), 8);
  for (auto _ : st) benchmark::DoNotOptimize(decide_sat(f, Rational(1, 8)));
}
BENCHMARK(BM_DecideSat)->Arg(4)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_MostProbable(benchmark::State& st) {
  std::mt19937_64 rng(6);
  const DpfaLm lm(random_dpfa(rng, 4, kBin, 0.3));
  for (auto _ : st) benchmark::DoNotOptimize(most_probable_strings(lm, static_cast<std::size_t>(st.range(0))));
}
BENCHMARK(BM_MostProbable)->Arg(63)->Arg(511);

}  // namespace

BENCHMARK_MAIN();
