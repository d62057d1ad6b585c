#include "fsmx/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <set>

#include "fsmx/error.hpp"

namespace fsmx {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Uniform: return "uniform";
    case Strategy::UniformUpsampled: return "uniform-upsampled";
    case Strategy::PrefixQuota: return "prefix-quota";
  }
  return "?";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "uniform") return Strategy::Uniform;
  if (text == "uniform-upsampled" || text == "upsampled") return Strategy::UniformUpsampled;
  if (text == "prefix-quota" || text == "quota") return Strategy::PrefixQuota;
  throw InvalidInput("unknown sampling strategy '" + std::string(text) + "'");
}

namespace {

constexpr std::size_t kEnumerationCap = std::size_t{1} << 22;

Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

LabeledSample draw_uniform(const Alphabet& alphabet, const Labeler& labeler, std::size_t max_len,
                           std::size_t size, std::mt19937_64& rng) {
  LabeledSample out{alphabet, {}, {}};
  out.items.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    Word w = uniform_word(rng, alphabet.size(), max_len);
    const bool label = labeler(w);
    out.items.push_back({std::move(w), label});
  }
  return out;
}

// Uniform draw from {w ∈ Σ^{≤max_len} : dfa(w) = label}, by counting the
// words of each length that end in the class from every state.
std::optional<Word> uniform_in_class(const Dfa& dfa, bool label, std::size_t max_len, std::mt19937_64& rng) {
  const std::size_t k = dfa.num_symbols();
  // count[l][q]: words of length l leading from q into the class
  std::vector<std::vector<long double>> count(max_len + 1, std::vector<long double>(dfa.size(), 0.0L));
  for (StateId q = 0; q < dfa.size(); ++q) count[0][q] = dfa.accepting(q) == label ? 1.0L : 0.0L;
  for (std::size_t l = 1; l <= max_len; ++l)
    for (StateId q = 0; q < dfa.size(); ++q)
      for (Symbol s = 0; s < k; ++s) count[l][q] += count[l - 1][dfa.next(q, s)];
  long double total = 0.0L;
  for (std::size_t l = 0; l <= max_len; ++l) total += count[l][dfa.initial()];
  if (total <= 0.0L) return std::nullopt;
  std::uniform_real_distribution<long double> unit(0.0L, 1.0L);
  long double u = unit(rng) * total;
  std::size_t len = max_len;
  for (std::size_t l = 0; l <= max_len; ++l) {
    if (u < count[l][dfa.initial()]) {
      len = l;
      break;
    }
    u -= count[l][dfa.initial()];
  }
  Word w;
  StateId q = dfa.initial();
  for (std::size_t rest = len; rest > 0; --rest) {
    long double v = unit(rng) * count[rest][q];
    Symbol pick = 0;
    for (Symbol s = 0; s < k; ++s) {
      const long double c = count[rest - 1][dfa.next(q, s)];
      if (c > 0.0L) pick = s;
      if (v < c) break;
      v -= c;
    }
    w.push_back(pick);
    q = dfa.next(q, pick);
  }
  return w;
}

// Distinct words of class `label`: drawn uniformly from the class when the
// automaton is known, otherwise by rejection sampling and then exhaustive
// length-lex enumeration when the support is small enough.
std::vector<Word> find_class(const Alphabet& alphabet, const Labeler& labeler, std::size_t max_len,
                             bool label, std::size_t want, std::mt19937_64& rng, const Dfa* dfa) {
  std::set<Word> found;
  if (dfa != nullptr) {
    for (std::size_t i = 0; i < want; ++i)
      if (auto w = uniform_in_class(*dfa, label, max_len, rng)) found.insert(std::move(*w));
    return {found.begin(), found.end()};
  }
  const std::size_t attempts = 200 * std::max<std::size_t>(want, 1);
  for (std::size_t i = 0; i < attempts && found.size() < want; ++i) {
    Word w = uniform_word(rng, alphabet.size(), max_len);
    if (labeler(w) == label) found.insert(std::move(w));
  }
  if (found.empty() && words_up_to(alphabet.size(), max_len) <= kEnumerationCap) {
    Word w;
    do {
      if (labeler(w) == label) found.insert(w);
    } while (next_word(w, alphabet.size(), max_len));
  }
  return {found.begin(), found.end()};
}

LabeledSample upsampled(const Alphabet& alphabet, const Labeler& labeler, const DatasetSpec& spec,
                        std::mt19937_64& rng, const Dfa* dfa) {
  LabeledSample base = draw_uniform(alphabet, labeler, spec.max_len, spec.size, rng);
  if (spec.size == 1) return base;
  const std::size_t pos = base.positives();
  const std::size_t neg = base.size() - pos;
  const bool minority = pos <= neg;  // label of the minority class
  const std::size_t minority_target = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(spec.positive_ratio * static_cast<double>(spec.size))), 1,
      spec.size - 1);
  if ((minority ? pos : neg) >= minority_target) return base;

  std::vector<Word> pool;
  std::vector<Word> majority;
  for (const auto& item : base.items) (item.label == minority ? pool : majority).push_back(item.word);
  if (pool.empty()) pool = find_class(alphabet, labeler, spec.max_len, minority, minority_target, rng, dfa);
  if (pool.empty())
    throw InvalidInput("cannot reach the requested class ratio: no minority-class word found in the support");

  LabeledSample out{alphabet, {}, {}};
  const std::size_t majority_count = spec.size - minority_target;
  for (std::size_t i = 0; i < majority_count && i < majority.size(); ++i)
    out.items.push_back({majority[i], !minority});
  // Every distinct minority item once, then duplicates drawn with replacement.
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (std::size_t i = 0; out.items.size() < spec.size; ++i)
    out.items.push_back({i < pool.size() ? pool[i] : pool[pick(rng)], minority});
  std::shuffle(out.items.begin(), out.items.end(), rng);
  return out;
}

LabeledSample prefix_quota(const Alphabet& alphabet, const Labeler& labeler, const DatasetSpec& spec,
                           const Dfa& dfa, std::mt19937_64& rng) {
  const std::vector<Word> prefixes = quota_prefixes(dfa, spec.quota, spec.max_len);
  LabeledSample out{alphabet, {}, {}};
  const std::size_t n = prefixes.size();
  std::uniform_int_distribution<std::size_t> suffix_len(0, 2 * dfa.size());
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t count = spec.size / n + (p < spec.size % n ? 1 : 0);
    std::size_t want[2] = {count - (count + 1) / 2, (count + 1) / 2};  // [neg, pos]
    const std::size_t cap = 50 * count;
    std::size_t attempts = 0;
    while (want[0] + want[1] > 0) {
      Word w = concat(prefixes[p], uniform_word_of_length(rng, alphabet.size(), suffix_len(rng)));
      const bool label = labeler(w);
      // Past the cap, prefixes into single-class regions take what they get.
      if (want[label] == 0 && attempts++ < cap) continue;
      std::size_t& slot = want[label] > 0 ? want[label] : want[!label];
      --slot;
      out.items.push_back({std::move(w), label});
    }
  }
  return out;
}

}  // namespace

std::vector<Word> quota_prefixes(const Dfa& dfa, std::size_t quota, std::size_t max_len) {
  std::vector<std::vector<Word>> per_state(dfa.size());
  std::size_t remaining = 0;
  // Only reachable states can ever be filled.
  const auto reachable = nerode_prefixes(dfa);
  remaining = reachable.size() * quota;
  Word w;
  while (remaining > 0) {
    auto& bucket = per_state[dfa.walk(w)];
    if (bucket.size() < quota) {
      bucket.push_back(w);
      --remaining;
    }
    if (!next_word(w, dfa.num_symbols(), max_len)) break;
  }
  std::vector<Word> out;
  for (const auto& [q, access] : reachable)
    for (const auto& p : per_state[q]) out.push_back(p);
  return out;
}

LabeledSample gen_dataset(const Alphabet& alphabet, const Labeler& labeler, const DatasetSpec& spec,
                          const Dfa* dfa) {
  if (spec.size == 0) throw InvalidInput("dataset size must be >= 1");
  if (spec.max_len == 0) throw InvalidInput("maximum length must be >= 1");
  if (!(spec.positive_ratio > 0.0 && spec.positive_ratio < 1.0))
    throw InvalidInput("class ratio must lie in (0, 1)");
  std::mt19937_64 rng(spec.seed);
  LabeledSample out{alphabet, {}, {}};
  switch (spec.strategy) {
    case Strategy::Uniform:
      out = draw_uniform(alphabet, labeler, spec.max_len, spec.size, rng);
      break;
    case Strategy::UniformUpsampled:
      out = upsampled(alphabet, labeler, spec, rng, dfa);
      break;
    case Strategy::PrefixQuota:
      if (dfa == nullptr) throw InvalidInput("prefix-quota sampling needs the target automaton");
      if (!(dfa->alphabet() == alphabet)) throw InvalidInput("automaton alphabet differs from dataset alphabet");
      if (spec.quota == 0) throw InvalidInput("prefix quota must be >= 1");
      out = prefix_quota(alphabet, labeler, spec, *dfa, rng);
      break;
  }
  out.meta = {to_string(spec.strategy), spec.max_len, spec.seed};
  return out;
}

namespace {

double activation_grad(Activation act, double out) {
  switch (act) {
    case Activation::Sigmoid: return out * (1.0 - out);
    case Activation::Tanh: return 1.0 - out * out;
    case Activation::Relu: return out > 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

VectorXd act_grad(Activation act, const VectorXd& out) {
  return out.unaryExpr([act](double v) { return activation_grad(act, v); });
}

VectorXd sig(const VectorXd& x) {
  return x.unaryExpr([](double v) { return sigmoid(v); });
}

VectorXd dsig(const VectorXd& s) { return s.cwiseProduct((1.0 - s.array()).matrix()); }

VectorXd dtanh(const VectorXd& t) { return (1.0 - t.array().square()).matrix(); }

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// Accumulates d(loss)/dθ for one labeled word into `g` (parameter order of
// the model) and returns the loss.
double backprop(const RnnModel& m, const Word& w, bool label, std::vector<MatrixXd>& g) {
  const auto& P = m.params();
  const std::size_t T = w.size();
  const auto d = static_cast<Eigen::Index>(m.dim());
  const std::size_t np = P.size();
  const Activation act = m.activation();

  // Forward pass with everything the backward pass needs.
  std::vector<VectorXd> hs{m.initial_state().h};
  std::vector<VectorXd> cs, tcs, gi, gf, go, gg, gz, gr;
  if (m.kind() == CellKind::Lstm) cs.push_back(m.initial_state().c);
  hs.reserve(T + 1);
  for (std::size_t t = 0; t < T; ++t) {
    const auto s = static_cast<Eigen::Index>(w[t]);
    const VectorXd& h = hs.back();
    switch (m.kind()) {
      case CellKind::FirstOrder:
      case CellKind::SecondOrder:
        hs.push_back(m.step({h, {}}, w[t]).h);
        break;
      case CellKind::Lstm: {
        const auto b = P[0].value.col(s);
        gi.push_back(sig(P[1].value * b + P[2].value * h));
        gf.push_back(sig(P[3].value * b + P[4].value * h));
        go.push_back(sig(P[5].value * b + P[6].value * h));
        gg.push_back((P[7].value * b + P[8].value * h).array().tanh().matrix());
        cs.push_back(gf.back().cwiseProduct(cs.back()) + gi.back().cwiseProduct(gg.back()));
        tcs.push_back(cs.back().array().tanh().matrix());
        hs.push_back(go.back().cwiseProduct(tcs.back()));
        break;
      }
      case CellKind::Gru: {
        const auto b = P[0].value.col(s);
        gz.push_back(sig(P[1].value * b + P[2].value * h));
        gr.push_back(sig(P[3].value * b + P[4].value * h));
        gg.push_back((P[5].value * h.cwiseProduct(gr.back()) + b).array().tanh().matrix());
        hs.push_back((1.0 - gz.back().array()).matrix().cwiseProduct(gg.back()) + gz.back().cwiseProduct(h));
        break;
      }
    }
  }

  const double y = (P[np - 2].value * hs.back() + P[np - 1].value.col(0))(0);
  const double target = label ? 1.0 : 0.0;
  const double loss = softplus(y) - target * y;
  const double dy = sigmoid(y) - target;
  g[np - 2].row(0) += dy * hs.back().transpose();
  g[np - 1](0, 0) += dy;
  VectorXd dh = P[np - 2].value.row(0).transpose() * dy;
  VectorXd dc = VectorXd::Zero(d);

  for (std::size_t t = T; t-- > 0;) {
    const auto s = static_cast<Eigen::Index>(w[t]);
    const VectorXd& hp = hs[t];
    switch (m.kind()) {
      case CellKind::FirstOrder: {
        VectorXd da = dh.cwiseProduct(act_grad(act, hs[t + 1]));
        g[1] += da * hp.transpose();
        g[0].col(s) += da;
        g[2].col(0) += da;
        dh = P[1].value.transpose() * da;
        break;
      }
      case CellKind::SecondOrder: {
        VectorXd da = dh.cwiseProduct(act_grad(act, hs[t + 1]));
        g[0].middleCols(s * d, d) += da * hp.transpose();
        dh = P[0].value.middleCols(s * d, d).transpose() * da;
        break;
      }
      case CellKind::Lstm: {
        const auto b = P[0].value.col(s);
        VectorXd dout = dh.cwiseProduct(tcs[t]);
        dc += dh.cwiseProduct(go[t]).cwiseProduct(dtanh(tcs[t]));
        VectorXd dai = dc.cwiseProduct(gg[t]).cwiseProduct(dsig(gi[t]));
        VectorXd daf = dc.cwiseProduct(cs[t]).cwiseProduct(dsig(gf[t]));
        VectorXd dao = dout.cwiseProduct(dsig(go[t]));
        VectorXd dag = dc.cwiseProduct(gi[t]).cwiseProduct(dtanh(gg[t]));
        dc = dc.cwiseProduct(gf[t]);
        g[1] += dai * b.transpose();
        g[2] += dai * hp.transpose();
        g[3] += daf * b.transpose();
        g[4] += daf * hp.transpose();
        g[5] += dao * b.transpose();
        g[6] += dao * hp.transpose();
        g[7] += dag * b.transpose();
        g[8] += dag * hp.transpose();
        g[0].col(s) += P[1].value.transpose() * dai + P[3].value.transpose() * daf +
                       P[5].value.transpose() * dao + P[7].value.transpose() * dag;
        dh = P[2].value.transpose() * dai + P[4].value.transpose() * daf + P[6].value.transpose() * dao +
             P[8].value.transpose() * dag;
        break;
      }
      case CellKind::Gru: {
        const auto b = P[0].value.col(s);
        const VectorXd& z = gz[t];
        const VectorXd& r = gr[t];
        VectorXd dz = dh.cwiseProduct(hp - gg[t]);
        VectorXd dag = dh.cwiseProduct((1.0 - z.array()).matrix()).cwiseProduct(dtanh(gg[t]));
        VectorXd dh_prev = dh.cwiseProduct(z);
        VectorXd u = hp.cwiseProduct(r);
        g[5] += dag * u.transpose();
        VectorXd du = P[5].value.transpose() * dag;
        VectorXd dar = du.cwiseProduct(hp).cwiseProduct(dsig(r));
        dh_prev += du.cwiseProduct(r);
        VectorXd daz = dz.cwiseProduct(dsig(z));
        g[1] += daz * b.transpose();
        g[2] += daz * hp.transpose();
        g[3] += dar * b.transpose();
        g[4] += dar * hp.transpose();
        g[0].col(s) += dag + P[1].value.transpose() * daz + P[3].value.transpose() * dar;
        dh = dh_prev + P[2].value.transpose() * daz + P[4].value.transpose() * dar;
        break;
      }
    }
  }

  // h0 (and c0) sit right before the head parameters.
  if (m.kind() == CellKind::Lstm) {
    g[np - 4].col(0) += dh;
    g[np - 3].col(0) += dc;
  } else {
    g[np - 3].col(0) += dh;
  }
  return loss;
}

std::vector<MatrixXd> zero_like(const RnnModel& m) {
  std::vector<MatrixXd> g;
  for (const auto& p : m.params()) g.push_back(MatrixXd::Zero(p.value.rows(), p.value.cols()));
  return g;
}

struct Adam {
  std::vector<MatrixXd> m, v;
  std::size_t t = 0;
};

void adam_update(RnnModel& model, const std::vector<MatrixXd>& g, Adam& st, const TrainConfig& cfg) {
  ++st.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
  auto& P = model.params();
  for (std::size_t i = 0; i < P.size(); ++i) {
    st.m[i] = cfg.beta1 * st.m[i] + (1.0 - cfg.beta1) * g[i];
    st.v[i] = cfg.beta2 * st.v[i] + (1.0 - cfg.beta2) * g[i].cwiseProduct(g[i]);
    P[i].value.array() -= cfg.learning_rate * (st.m[i].array() / c1) /
                          ((st.v[i].array() / c2).sqrt() + cfg.adam_eps);
  }
}

}  // namespace

double accuracy(const RnnModel& model, const LabeledSample& data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& item : data.items) hits += recognizer_classify(model, item.word).accept == item.label;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

double loss_and_gradient(const RnnModel& model, const LabeledSample& data, Eigen::VectorXd* grad) {
  if (model.head() != Head::Recognizer) throw InvalidInput("training needs a recognizer head");
  if (data.empty()) return 0.0;
  auto g = zero_like(model);
  double loss = 0.0;
  for (const auto& item : data.items) loss += backprop(model, item.word, item.label, g);
  const double inv = 1.0 / static_cast<double>(data.size());
  if (grad != nullptr) {
    grad->resize(static_cast<Eigen::Index>(model.parameter_count()));
    Eigen::Index at = 0;
    for (const auto& gi : g) {
      grad->segment(at, gi.size()) = gi.reshaped() * inv;
      at += gi.size();
    }
  }
  return loss * inv;
}

TrainedModel train(const RnnModel& init, const LabeledSample& data, const LabeledSample& test,
                   const TrainConfig& cfg) {
  if (init.head() != Head::Recognizer) throw InvalidInput("training needs a recognizer head");
  if (data.empty()) throw InvalidInput("training data is empty");
  if (!(cfg.learning_rate > 0.0) || cfg.batch_size == 0) throw InvalidInput("invalid optimizer settings");

  TrainedModel best{init, {}, 0.0, 0.0, 0, false};
  double best_score = -1.0;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t attempt = 0; attempt <= cfg.max_restarts; ++attempt) {
    RnnModel model = init;
    if (attempt > 0) randomize(model, cfg.init_std, rng());
    Adam st{zero_like(model), zero_like(model), 0};
    std::vector<EpochMetrics> history;
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    double train_acc = accuracy(model, data);
    double test_acc = -1.0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      double loss = 0.0;
      for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
        const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
        auto g = zero_like(model);
        for (std::size_t i = start; i < stop; ++i) {
          const auto& item = data.items[order[i]];
          loss += backprop(model, item.word, item.label, g);
        }
        const double inv = 1.0 / static_cast<double>(stop - start);
        for (auto& gi : g) gi *= inv;
        adam_update(model, g, st, cfg);
      }
      train_acc = accuracy(model, data);
      history.push_back({loss / static_cast<double>(data.size()), train_acc});
      test_acc = -1.0;
      if (cfg.early_stop && train_acc >= cfg.train_gate) {
        test_acc = test.empty() ? 1.0 : accuracy(model, test);
        if (test_acc >= cfg.test_gate) break;
      }
    }
    if (test_acc < 0.0) test_acc = test.empty() ? 1.0 : accuracy(model, test);
    const bool passed = train_acc >= cfg.train_gate && test_acc >= cfg.test_gate;
    const double score = (passed ? 2.0 : 0.0) + train_acc;
    if (score > best_score) {
      best_score = score;
      best = TrainedModel{model, std::move(history), train_acc, test_acc, attempt, passed};
    }
    if (passed) break;
  }
  return best;
}

double grad_check(const RnnModel& model, const LabeledSample& data, std::size_t probes, std::uint64_t seed,
                  double h) {
  VectorXd analytic;
  loss_and_gradient(model, data, &analytic);
  const VectorXd theta = model.flatten();
  const auto n = static_cast<std::size_t>(theta.size());
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (probes < n) {
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(probes);
  }
  RnnModel probe = model;
  double worst = 0.0;
  for (std::size_t i : idx) {
    VectorXd t = theta;
    const auto k = static_cast<Eigen::Index>(i);
    t(k) = theta(k) + h;
    probe.assign(t);
    const double up = loss_and_gradient(probe, data, nullptr);
    t(k) = theta(k) - h;
    probe.assign(t);
    const double down = loss_and_gradient(probe, data, nullptr);
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic(k);
    worst = std::max(worst, std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-6));
  }
  return worst;
}

}  // namespace fsmx
