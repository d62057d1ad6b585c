#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fsmx/bench.hpp"
#include "fsmx/error.hpp"
#include "fsmx/oracle.hpp"
#include "fsmx/tomita.hpp"

using namespace fsmx;

namespace {

const Alphabet kBin = Alphabet::binary();

ExperimentRecord rec(int g, const std::string& cell, Method m, std::size_t run, bool success, double ms) {
  ExperimentRecord r;
  r.grammar = g;
  r.cell = cell;
  r.dim = 20;
  r.method = m;
  r.run = run;
  r.success = success;
  r.runtime_ms = ms;
  r.size = success ? tomita_dfa(g).size() : 1;
  return r;
}

// Five runs of every method for one (cell, grammar); success counts and
// runtimes per method in [q, c, l] order.
std::vector<ExperimentRecord> group(int g, const std::string& cell, std::array<int, 3> wins,
                                    std::array<double, 3> ms) {
  std::vector<ExperimentRecord> out;
  for (std::size_t run = 0; run < 5; ++run)
    for (int m = 0; m < 3; ++m)
      out.push_back(rec(g, cell, static_cast<Method>(m), run, static_cast<int>(run) < wins[m], ms[m]));
  return out;
}

ExperimentSpec tiny_spec() {
  ExperimentSpec s;
  s.grammars = {1};
  s.cells = {parse_cell_class("gru")};
  s.dims = {6};
  s.runs = 2;
  s.train.epochs = 3;
  s.train.max_restarts = 0;
  s.test_size = 100;
  s.gen_samples = 200;
  s.extraction.max_membership_queries = 20000;
  return s;
}

}  // namespace

TEST_CASE("tomita fixtures") {
  const Dfa t1 = tomita_dfa(1);
  for (const char* w : {"", "1", "11"}) CHECK(t1.run(kBin.parse(w)));
  CHECK_FALSE(t1.run(kBin.parse("0")));
  CHECK(tomita_dfa(5).run(kBin.parse("0011")));
  CHECK_FALSE(tomita_dfa(5).run(kBin.parse("01")));
  CHECK(tomita_dfa(3).size() == 5);
  CHECK(tomita_dfa(7).size() == 5);
  CHECK_THROWS_AS(tomita_dfa(0), InvalidInput);
  CHECK(grammar_setup(1).support == 22);
  CHECK(grammar_setup(1).train_size == 800);
  CHECK(grammar_setup(3).support == 25);
  CHECK(grammar_setup(3).train_size == 1500);
  CHECK_THROWS_AS(grammar_setup(9), InvalidInput);
}

TEST_CASE("success_rate") {
  const auto all = group(1, "gru", {5, 4, 0}, {1, 1, 1});
  std::vector<ExperimentRecord> q, c, l;
  for (const auto& r : all) (r.method == Method::Quantization ? q : r.method == Method::Clustering ? c : l).push_back(r);
  CHECK(success_rate(q) == 100.0);
  CHECK(success_rate(c) == 80.0);
  CHECK(success_rate(l) == 0.0);
  CHECK_THROWS_AS(success_rate({}), InvalidInput);
}

TEST_CASE("gen_accuracy") {
  const Dfa t1 = tomita_dfa(1);
  const DfaOracle oracle(t1);
  CHECK(gen_accuracy(t1, oracle, 10, 500, 1) == 1.0);
  CHECK(gen_accuracy(t1, oracle, 22, 500, 1) == 1.0);

  // 11 of the 2047 words of length ≤ 10 are in 1*.
  const Dfa reject = Dfa::trivial(kBin, false);
  const double acc = gen_accuracy(reject, oracle, 10, 100000, 2);
  CHECK(acc == doctest::Approx(1.0 - 11.0 / 2047).epsilon(2e-3));
  CHECK(gen_accuracy(reject, oracle, 22, 100000, 2) > acc);
  CHECK(gen_accuracy(reject, oracle, 10, 300, 9) == gen_accuracy(reject, oracle, 10, 300, 9));
}

TEST_CASE("aggregation and orderings") {
  std::vector<ExperimentRecord> records;
  for (auto g : {1, 4}) {
    auto a = group(g, "lstm", {2, 4, 5}, {30, 20, 10});
    records.insert(records.end(), a.begin(), a.end());
  }
  const auto rows = aggregate(records);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].grammar == 1);
  CHECK(rows[0].success == std::array<double, 3>{40, 80, 100});
  CHECK(rows[0].runtime_ms == std::array<double, 3>{30, 20, 10});
  for (const auto& r : rows)
    for (double s : r.success) CHECK(std::fmod(s * 5 / 100, 1.0) == 0.0);
  const auto ok = check_orderings(rows);
  CHECK(ok.runtime_violations == 0);
  CHECK(ok.success_violations == 0);
  CHECK(ok.passed());

  auto bad = group(7, "gru", {5, 3, 4}, {5, 20, 30});
  records.insert(records.end(), bad.begin(), bad.end());
  const auto rep = check_orderings(aggregate(records));
  CHECK(rep.runtime_violations == 1);
  CHECK(rep.success_violations == 1);
  CHECK(rep.passed());
  CHECK(rep.details.size() == 2);

  // Aborted quantization: missing entry, counted as slowest and 0 %.
  auto ab = group(4, "tanh-o1", {0, 5, 5}, {0, 20, 10});
  for (auto& r : ab)
    if (r.method == Method::Quantization) r.aborted = true;
  const auto arows = aggregate(ab);
  CHECK(std::isnan(arows[0].runtime_ms[0]));
  CHECK(std::isnan(arows[0].success[0]));
  CHECK(check_orderings(arows).runtime_violations == 0);
  CHECK(check_orderings(arows).success_violations == 0);
}

TEST_CASE("csv and tsv layout") {
  const auto records = group(1, "lstm", {5, 5, 5}, {3, 2, 1});
  std::ostringstream csv;
  write_records_csv(csv, records);
  const std::string text = csv.str();
  CHECK(text.substr(0, text.find('\n')) ==
        "grammar,cell,dim,method,run,runtime_ms,success,gen_acc_small,gen_acc_large,size,converged");
  CHECK(std::count(text.begin(), text.end(), '\n') == 16);

  std::ostringstream agg;
  write_aggregate_csv(agg, aggregate(records), false);
  CHECK(agg.str() == "table,cell,dim,G1\nruntime_ms,lstm,20,\"[0,0,0]\"\nsuccess,lstm,20,\"[100,100,100]\"\n");

  std::ostringstream tsv;
  write_table_tsv(tsv, aggregate(records), "success");
  CHECK(tsv.str() == "cell\tdim\tgrammar\tquantization\tclustering\tlstar\nlstm\t20\t1\t100\t100\t100\n");
  CHECK_THROWS_AS(write_table_tsv(tsv, {}, "size"), InvalidInput);
}

TEST_CASE("spec presets") {
  const auto desk = desk_spec();
  CHECK(desk.grammars == std::vector<int>{1, 4, 7});
  CHECK(desk.dims == std::vector<std::size_t>{20});
  CHECK(desk.runs == 5);
  CHECK(desk.cells.size() == 6);
  CHECK(paper_spec().dims == std::vector<std::size_t>{50, 100, 150});
  ExperimentSpec bad = desk;
  bad.runs = 0;
  CHECK_THROWS_AS(check_spec(bad), InvalidInput);
  CHECK_THROWS_AS(parse_cell_class("elman"), InvalidInput);
}

TEST_CASE("empty spec gives no records") {
  ExperimentSpec s = tiny_spec();
  s.grammars.clear();
  CHECK(run_benchmark(s, 1).empty());
}

TEST_CASE("small benchmark run") {
  const ExperimentSpec s = tiny_spec();
  const auto a = run_benchmark(s, 1);
  REQUIRE(a.size() == 6);
  for (const auto& r : a) {
    if (r.success) CHECK(r.size == tomita_dfa(r.grammar).size());
    CHECK_FALSE(r.aborted);
    CHECK(r.gen_acc_small >= 0.0);
    CHECK(r.gen_acc_small <= 1.0);
  }
  // Thread count never changes results.
  const auto b = run_benchmark(s, 2);
  std::ostringstream x, y;
  write_records_csv(x, a, false);
  write_records_csv(y, b, false);
  CHECK(x.str() == y.str());
}

TEST_CASE("guard-aborted extraction is recorded, not thrown") {
  ExperimentSpec s = tiny_spec();
  s.runs = 1;
  s.extraction.cell_cap = 1;
  const auto records = run_benchmark(s, 1);
  REQUIRE(records.size() == 3);
  CHECK(records[0].method == Method::Quantization);
  CHECK(records[0].aborted);
  CHECK_FALSE(records[0].success);
  CHECK(std::isnan(records[0].gen_acc_small));
  CHECK_FALSE(records[2].aborted);
  const auto rows = aggregate(records);
  CHECK(std::isnan(rows[0].runtime_ms[0]));
  std::ostringstream csv;
  write_records_csv(csv, records, false);
  CHECK(csv.str().find(",-,-,-,") != std::string::npos);
}
