#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fsmx/dfa.hpp"
#include "fsmx/rnn.hpp"
#include "fsmx/sample.hpp"

namespace fsmx {

using Labeler = std::function<bool(const Word&)>;

enum class Strategy { Uniform, UniformUpsampled, PrefixQuota };

std::string to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

struct DatasetSpec {
  Strategy strategy = Strategy::Uniform;
  std::size_t max_len = 10;
  std::size_t size = 100;
  double positive_ratio = 0.5;  // upsampled: target share of the minority class
  std::size_t quota = 3;        // prefix-quota: prefixes per state
  std::uint64_t seed = 42;
};

// prefix-quota needs the canonical automaton. Upsampling uses it, when given,
// to draw minority words uniformly from their class; without it the minority
// is searched by sampling, and InvalidInput is thrown when none is found.
LabeledSample gen_dataset(const Alphabet& alphabet, const Labeler& labeler, const DatasetSpec& spec,
                          const Dfa* dfa = nullptr);

// Prefixes used by the prefix-quota strategy: for every reachable state, the
// first `quota` words in length-lex order that reach it (length ≤ max_len).
std::vector<Word> quota_prefixes(const Dfa& dfa, std::size_t quota, std::size_t max_len);

struct TrainConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  std::uint64_t seed = 42;
  double train_gate = 0.99;
  double test_gate = 0.85;
  std::size_t max_restarts = 3;
  double init_std = 0.1;
  bool early_stop = true;  // stop an attempt as soon as both gates pass
};

struct EpochMetrics {
  double loss;
  double train_accuracy;
};

struct TrainedModel {
  RnnModel model;
  std::vector<EpochMetrics> history;  // of the returned attempt
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::size_t restarts = 0;
  bool gate_passed = false;
};

// Mean binary cross-entropy over full BPTT, Adam updates. The first attempt
// starts from `init`; each restart draws a fresh Gaussian initialization.
// Failing the gates is reported through `gate_passed`, never thrown.
TrainedModel train(const RnnModel& init, const LabeledSample& data, const LabeledSample& test,
                   const TrainConfig& cfg);

double accuracy(const RnnModel& model, const LabeledSample& data);

// Mean loss over the sample; fills `grad` (same order and length as
// model.flatten()) when non-null.
double loss_and_gradient(const RnnModel& model, const LabeledSample& data, Eigen::VectorXd* grad);

// Max relative error |a − n| / max(|a| + |n|, 1e-6) between analytic and
// central-difference gradients over `probes` random parameters (all of them
// when the model is smaller).
double grad_check(const RnnModel& model, const LabeledSample& data, std::size_t probes = 100,
                  std::uint64_t seed = 42, double h = 1e-5);

}  // namespace fsmx
