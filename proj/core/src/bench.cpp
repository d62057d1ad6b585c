#include "fsmx/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "fsmx/error.hpp"
#include "fsmx/tomita.hpp"

namespace fsmx {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0;
  for (auto p : parts) h = splitmix(h ^ p);
  return h;
}

std::string fixed(double x, int digits) {
  if (std::isnan(x)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string percent(double x) {
  if (std::isnan(x)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::size_t method_slot(Method m) {
  switch (m) {
    case Method::Quantization: return 0;
    case Method::Clustering: return 1;
    case Method::Lstar: return 2;
  }
  return 0;
}

struct Job {
  int grammar;
  std::size_t cell;
  std::size_t dim;
  std::size_t run;
};

std::vector<ExperimentRecord> run_job(const ExperimentSpec& spec, const Job& job) {
  const GrammarSetup setup = grammar_setup(job.grammar);
  const CellClass& cell = spec.cells[job.cell];
  const Dfa target = tomita_dfa(job.grammar);
  const Alphabet sigma = Alphabet::binary();
  const Labeler label = [&target](const Word& w) { return target.run(w); };
  const auto g = static_cast<std::uint64_t>(job.grammar);

  // Half prefix-quota, half uniform with the minority upsampled; the same
  // data for every cell class of a run.
  DatasetSpec quota;
  quota.strategy = Strategy::PrefixQuota;
  quota.max_len = setup.support;
  quota.size = setup.train_size - setup.train_size / 2;
  quota.seed = mix({spec.seed, g, job.run, 1});
  DatasetSpec upsampled = quota;
  upsampled.strategy = Strategy::UniformUpsampled;
  upsampled.size = setup.train_size / 2;
  upsampled.seed = mix({spec.seed, g, job.run, 2});
  LabeledSample data = gen_dataset(sigma, label, quota, &target);
  for (auto& it : gen_dataset(sigma, label, upsampled, &target).items) data.items.push_back(std::move(it));
  DatasetSpec test_spec;
  test_spec.strategy = Strategy::Uniform;
  test_spec.max_len = setup.support;
  test_spec.size = spec.test_size;
  test_spec.seed = mix({spec.seed, g, job.run, 3});
  const LabeledSample test = gen_dataset(sigma, label, test_spec, &target);

  const std::uint64_t key = mix({spec.seed, g, job.cell, job.dim, job.run});
  RnnModel init(cell.kind, cell.activation, job.dim, sigma, Head::Recognizer);
  randomize(init, spec.train.init_std, mix({key, 4}));
  TrainConfig tc = spec.train;
  tc.seed = mix({key, 5});
  const TrainedModel trained = train(init, data, test, tc);
  const RnnOracle oracle(trained.model);

  std::vector<ExperimentRecord> out;
  for (Method m : spec.methods) {
    ExperimentRecord rec{job.grammar, cell.label, job.dim, m, job.run};
    rec.gate_passed = trained.gate_passed;
    rec.train_accuracy = trained.train_accuracy;
    rec.test_accuracy = trained.test_accuracy;
    ExtractionConfig ec = spec.extraction;
    ec.method = m;
    ec.seed = mix({key, 6, method_slot(m)});
    if (ec.max_depth == 0) ec.max_depth = setup.support;
    const auto start = std::chrono::steady_clock::now();
    try {
      const ExtractionResult r = extract(oracle, ec);
      rec.runtime_ms = r.runtime_ms;
      rec.success = equivalent(r.dfa, target);
      rec.size = r.dfa.size();
      rec.converged = r.converged;
      const std::uint64_t gs = mix({key, 7, method_slot(m)});
      rec.gen_acc_small = gen_accuracy(r.dfa, oracle, setup.support, spec.gen_samples, gs);
      rec.gen_acc_large =
          gen_accuracy(r.dfa, oracle, setup.support * spec.large_support_factor, spec.gen_samples, gs + 1);
    } catch (const GuardExceeded&) {
      rec.aborted = true;
      rec.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      rec.gen_acc_small = rec.gen_acc_large = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

std::vector<CellClass> cell_classes() {
  return {{CellKind::FirstOrder, Activation::Sigmoid, "sigmoid-o1"},
          {CellKind::FirstOrder, Activation::Tanh, "tanh-o1"},
          {CellKind::SecondOrder, Activation::Sigmoid, "sigmoid-o2"},
          {CellKind::SecondOrder, Activation::Tanh, "tanh-o2"},
          {CellKind::Lstm, Activation::Tanh, "lstm"},
          {CellKind::Gru, Activation::Tanh, "gru"}};
}

CellClass parse_cell_class(std::string_view label) {
  for (auto& c : cell_classes())
    if (c.label == label) return c;
  throw InvalidInput("unknown cell class '" + std::string(label) + "'");
}

GrammarSetup grammar_setup(int grammar) {
  switch (grammar) {
    case 1: return {1, 22, 800};
    case 2: return {2, 22, 800};
    case 3: return {3, 25, 1500};
    case 4: return {4, 22, 950};
    case 5: return {5, 25, 1200};
    case 6: return {6, 30, 1200};
    case 7: return {7, 35, 1750};
    default: throw InvalidInput("Tomita grammar id must be in 1..7, got " + std::to_string(grammar));
  }
}

void check_spec(const ExperimentSpec& spec) {
  if (spec.runs == 0) throw InvalidInput("runs must be at least 1");
  for (int g : spec.grammars) grammar_setup(g);
  for (auto d : spec.dims)
    if (d == 0) throw InvalidInput("hidden size must be positive");
  if (spec.gen_samples == 0) throw InvalidInput("generalization sample size must be positive");
  if (spec.large_support_factor < 2) throw InvalidInput("the large support must exceed the extraction support");
  std::set<Method> seen(spec.methods.begin(), spec.methods.end());
  if (seen.size() != spec.methods.size()) throw InvalidInput("methods must be distinct");
}

ExperimentSpec desk_spec() {
  ExperimentSpec s;
  s.grammars = {1, 4, 7};
  s.cells = cell_classes();
  s.dims = {20};
  s.extraction.max_depth = 0;
  s.extraction.clusters = 15;
  s.extraction.budget = 2000;
  s.extraction.max_membership_queries = 100000;
  s.train.epochs = 50;
  s.train.early_stop = false;
  s.train.train_gate = 0.99;
  s.train.test_gate = 0.99;
  s.train.max_restarts = 2;
  return s;
}

ExperimentSpec paper_spec() {
  ExperimentSpec s = desk_spec();
  s.dims = {50, 100, 150};
  return s;
}

double gen_accuracy(const Dfa& dfa, const StateMachineOracle& oracle, std::size_t support, std::size_t samples,
                    std::uint64_t seed) {
  if (samples == 0) throw InvalidInput("sample size must be positive");
  if (dfa.alphabet().size() != oracle.num_symbols()) throw ShapeMismatch("automaton and oracle alphabets differ");
  std::mt19937_64 rng(seed);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Word w = uniform_word(rng, oracle.num_symbols(), support);
    agree += dfa.run(w) == oracle.membership(w);
  }
  return static_cast<double>(agree) / static_cast<double>(samples);
}

std::size_t default_threads() {
  if (const char* env = std::getenv("FSMX_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ExperimentRecord> run_benchmark(const ExperimentSpec& spec, std::size_t threads, const Progress& progress) {
  check_spec(spec);
  std::vector<Job> jobs;
  for (int g : spec.grammars)
    for (std::size_t c = 0; c < spec.cells.size(); ++c)
      for (std::size_t d : spec.dims)
        for (std::size_t r = 0; r < spec.runs; ++r) jobs.push_back({g, c, d, r});
  if (jobs.empty() || spec.methods.empty()) return {};

  std::vector<std::vector<ExperimentRecord>> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex report;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        results[i] = run_job(spec, jobs[i]);
        if (progress) {
          std::lock_guard lock(report);
          for (const auto& rec : results[i]) progress(rec);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min(threads == 0 ? default_threads() : threads, jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<ExperimentRecord> out;
  for (auto& rs : results)
    for (auto& rec : rs) out.push_back(std::move(rec));
  return out;
}

double success_rate(const std::vector<ExperimentRecord>& group) {
  if (group.empty()) throw InvalidInput("success rate of an empty group");
  const auto hits = std::count_if(group.begin(), group.end(), [](const ExperimentRecord& r) { return r.success; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(group.size());
}

std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records) {
  // Rows grouped by (cell, dim) with grammars inside;
  // both in order of first appearance.
  std::vector<std::pair<std::string, std::size_t>> classes;
  std::vector<int> grammars;
  std::map<std::tuple<std::string, std::size_t, int>, std::array<std::vector<const ExperimentRecord*>, 3>> groups;
  for (const auto& r : records) {
    const std::pair<std::string, std::size_t> cd{r.cell, r.dim};
    if (std::find(classes.begin(), classes.end(), cd) == classes.end()) classes.push_back(cd);
    if (std::find(grammars.begin(), grammars.end(), r.grammar) == grammars.end()) grammars.push_back(r.grammar);
    groups[{r.cell, r.dim, r.grammar}][method_slot(r.method)].push_back(&r);
  }
  std::vector<std::tuple<std::string, std::size_t, int>> order;
  for (const auto& [cell, dim] : classes)
    for (int g : grammars)
      if (groups.count({cell, dim, g})) order.emplace_back(cell, dim, g);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<AggregateRow> rows;
  for (const auto& key : order) {
    AggregateRow row{std::get<0>(key), std::get<1>(key), std::get<2>(key), {nan, nan, nan}, {nan, nan, nan}};
    const auto& slots = groups.at(key);
    for (std::size_t m = 0; m < 3; ++m) {
      const auto& rs = slots[m];
      if (rs.empty()) continue;
      if (std::any_of(rs.begin(), rs.end(), [](const ExperimentRecord* r) { return r->aborted; })) continue;
      double total = 0.0;
      std::vector<ExperimentRecord> copy;
      for (const auto* r : rs) {
        total += r->runtime_ms;
        copy.push_back(*r);
      }
      row.runtime_ms[m] = total / static_cast<double>(rs.size());
      row.success[m] = success_rate(copy);
    }
    rows.push_back(row);
  }
  return rows;
}

OrderingReport check_orderings(const std::vector<AggregateRow>& rows) {
  OrderingReport rep;
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    const std::string where = row.cell + " d=" + std::to_string(row.dim) + " G" + std::to_string(row.grammar);
    const auto& t = row.runtime_ms;
    const auto& s = row.success;
    if (std::isnan(t[1]) || std::isnan(t[2])) {
      rep.details.push_back(where + ": clustering or lstar missing");
      ++rep.runtime_violations;
      ++rep.success_violations;
      continue;
    }
    const double tq = std::isnan(t[0]) ? inf : t[0];
    const double sq = std::isnan(s[0]) ? 0.0 : s[0];
    if (!(t[2] <= t[1] && t[1] <= tq)) {
      ++rep.runtime_violations;
      rep.details.push_back(where + ": runtime [" + fixed(t[0], 3) + "," + fixed(t[1], 3) + "," + fixed(t[2], 3) +
                            "] ms");
    }
    if (!(s[2] >= s[1] && s[1] >= sq)) {
      ++rep.success_violations;
      rep.details.push_back(where + ": success [" + percent(s[0]) + "," + percent(s[1]) + "," + percent(s[2]) + "]");
    }
  }
  return rep;
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records, bool with_timing) {
  out << "grammar,cell,dim,method,run,runtime_ms,success,gen_acc_small,gen_acc_large,size,converged\n";
  for (const auto& r : records) {
    out << r.grammar << ',' << r.cell << ',' << r.dim << ',' << to_string(r.method) << ',' << r.run << ','
        << (with_timing ? fixed(r.runtime_ms, 3) : "0") << ',' << (r.success ? 1 : 0) << ','
        << fixed(r.gen_acc_small, 4) << ',' << fixed(r.gen_acc_large, 4) << ','
        << (r.aborted ? std::string("-") : std::to_string(r.size)) << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows, bool with_timing) {
  std::vector<int> grammars;
  for (const auto& r : rows)
    if (std::find(grammars.begin(), grammars.end(), r.grammar) == grammars.end()) grammars.push_back(r.grammar);
  out << "table,cell,dim";
  for (int g : grammars) out << ",G" << g;
  out << '\n';
  for (const std::string table : {"runtime_ms", "success"}) {
    for (std::size_t i = 0; i < rows.size();) {
      const auto& head = rows[i];
      out << table << ',' << head.cell << ',' << head.dim;
      std::map<int, const AggregateRow*> by_grammar;
      for (; i < rows.size() && rows[i].cell == head.cell && rows[i].dim == head.dim; ++i)
        by_grammar[rows[i].grammar] = &rows[i];
      for (int g : grammars) {
        out << ',';
        auto it = by_grammar.find(g);
        if (it == by_grammar.end()) continue;
        const auto& v = table == "success" ? it->second->success : it->second->runtime_ms;
        out << "\"[";
        for (std::size_t m = 0; m < 3; ++m) {
          if (m) out << ',';
          if (table == "success")
            out << percent(v[m]);
          else
            out << (with_timing || std::isnan(v[m]) ? fixed(v[m], 3) : "0");
        }
        out << "]\"";
      }
      out << '\n';
    }
  }
}

void write_table_tsv(std::ostream& out, const std::vector<AggregateRow>& rows, const std::string& table,
                     bool with_timing) {
  if (table != "runtime" && table != "success") throw InvalidInput("table must be runtime or success");
  out << "cell\tdim\tgrammar\tquantization\tclustering\tlstar\n";
  for (const auto& r : rows) {
    out << r.cell << '\t' << r.dim << '\t' << r.grammar;
    for (std::size_t m = 0; m < 3; ++m) {
      out << '\t';
      if (table == "success")
        out << percent(r.success[m]);
      else
        out << (with_timing || std::isnan(r.runtime_ms[m]) ? fixed(r.runtime_ms[m], 3) : "0");
    }
    out << '\n';
  }
}

}  // namespace fsmx
