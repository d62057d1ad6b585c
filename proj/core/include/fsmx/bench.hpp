#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fsmx/extraction.hpp"
#include "fsmx/oracle.hpp"
#include "fsmx/rnn.hpp"
#include "fsmx/training.hpp"

namespace fsmx {

struct CellClass {
  CellKind kind;
  Activation activation;
  std::string label;
};

// sigmoid-o1, tanh-o1, sigmoid-o2, tanh-o2, lstm, gru.
std::vector<CellClass> cell_classes();
CellClass parse_cell_class(std::string_view label);

// Support length and training set size per Tomita grammar.
struct GrammarSetup {
  int grammar;
  std::size_t support;
  std::size_t train_size;
};
GrammarSetup grammar_setup(int grammar);

struct ExperimentSpec {
  std::vector<int> grammars;
  std::vector<CellClass> cells;
  std::vector<std::size_t> dims;
  std::vector<Method> methods{Method::Quantization, Method::Clustering, Method::Lstar};
  std::size_t runs = 5;
  // Shared by all methods; `method` is overwritten, max_depth 0 means the
  // grammar's support length.
  ExtractionConfig extraction;
  TrainConfig train;
  std::size_t test_size = 500;
  std::size_t gen_samples = 2000;
  std::size_t large_support_factor = 2;
  std::uint64_t seed = 42;
};

// Throws InvalidInput on runs == 0, unknown grammars or zero dims.
void check_spec(const ExperimentSpec& spec);

// Grammars 1/4/7, all six cell classes at d = 20, five runs.
ExperimentSpec desk_spec();
// As desk_spec with d ∈ {50, 100, 150}.
ExperimentSpec paper_spec();

struct ExperimentRecord {
  int grammar;
  std::string cell;
  std::size_t dim;
  Method method;
  std::size_t run;
  double runtime_ms = 0.0;
  bool success = false;
  double gen_acc_small = 0.0;
  double gen_acc_large = 0.0;
  std::size_t size = 0;
  bool converged = false;
  bool aborted = false;  // extraction hit a guard; no automaton
  bool gate_passed = false;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

// Fraction of words from Σ^{≤support} (uniform) on which dfa and oracle agree.
double gen_accuracy(const Dfa& dfa, const StateMachineOracle& oracle, std::size_t support, std::size_t samples,
                    std::uint64_t seed);

// FSMX_THREADS when set and positive, else the hardware concurrency.
std::size_t default_threads();

using Progress = std::function<void(const ExperimentRecord&)>;

// One trained network per (grammar, cell, dim, run), extracted with every
// method. Records come back in spec order whatever the thread count.
std::vector<ExperimentRecord> run_benchmark(const ExperimentSpec& spec, std::size_t threads = 0,
                                            const Progress& progress = {});

// Percentage of successful records. Throws InvalidInput on an empty group.
double success_rate(const std::vector<ExperimentRecord>& group);

// One table cell: per method in [quantization, clustering, lstar] order.
// An aborted method shows as missing (NaN).
struct AggregateRow {
  std::string cell;
  std::size_t dim;
  int grammar;
  std::array<double, 3> runtime_ms;
  std::array<double, 3> success;
};

std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records);

struct OrderingReport {
  std::size_t runtime_violations = 0;
  std::size_t success_violations = 0;
  std::vector<std::string> details;
  bool passed() const { return runtime_violations <= 1 && success_violations <= 1; }
};

// runtime: lstar ≤ clustering ≤ quantization; success: the reverse. A
// missing quantization entry counts as slowest and as 0 %.
OrderingReport check_orderings(const std::vector<AggregateRow>& rows);

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records, bool with_timing = true);
// Table layout: table,cell,dim,G<g>... with "[q,c,l]" entries.
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows, bool with_timing = true);
// Long form for plotting; `table` is "runtime" or "success".
void write_table_tsv(std::ostream& out, const std::vector<AggregateRow>& rows, const std::string& table,
                     bool with_timing = true);

}  // namespace fsmx
