#include "fsmx/reference_lm.hpp"

#include <algorithm>
#include <queue>

#include "fsmx/error.hpp"

namespace fsmx {

namespace {

bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

void not_enough(std::size_t count, std::size_t found) {
  throw InvalidInput("requested " + std::to_string(count) + " words but the distribution has only " +
                     std::to_string(found) + " of positive probability outside the history");
}

}  // namespace

FiniteSupportLm::FiniteSupportLm(Alphabet alphabet, std::map<Word, double> weights) : alphabet_(std::move(alphabet)) {
  double total = 0.0;
  for (const auto& [w, p] : weights) {
    alphabet_.check(w);
    if (!(p >= 0.0)) throw InvalidInput("word weights must be nonnegative");
    total += p;
  }
  if (!(total > 0.0)) throw InvalidInput("distribution has no mass");
  for (const auto& [w, p] : weights)
    if (p > 0.0) {
      probs_.emplace(w, p / total);
      ranked_.push_back({w, p / total});
    }
  std::sort(ranked_.begin(), ranked_.end(), [](const ScoredWord& a, const ScoredWord& b) {
    return a.prob != b.prob ? a.prob > b.prob : shortlex_less(a.word, b.word);
  });
  double acc = 0.0;
  for (const auto& sw : ranked_) cumulative_.push_back(acc += sw.prob);
}

FiniteSupportLm FiniteSupportLm::empirical(Alphabet alphabet, const std::vector<Word>& words) {
  std::map<Word, double> counts;
  for (const auto& w : words) counts[w] += 1.0;
  return FiniteSupportLm(std::move(alphabet), std::move(counts));
}

FiniteSupportLm FiniteSupportLm::uniform(Alphabet alphabet, std::size_t max_len) {
  std::map<Word, double> weights;
  Word w;
  do weights.emplace(w, 1.0);
  while (next_word(w, alphabet.size(), max_len));
  return FiniteSupportLm(std::move(alphabet), std::move(weights));
}

Word FiniteSupportLm::sample(std::mt19937_64& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, cumulative_.back())(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), ranked_.size() - 1);
  return ranked_[i].word;
}

double FiniteSupportLm::prob(const Word& w) const {
  const auto it = probs_.find(w);
  return it == probs_.end() ? 0.0 : it->second;
}

std::vector<ScoredWord> FiniteSupportLm::most_probable(const std::set<Word>& history, std::size_t count) const {
  std::vector<ScoredWord> out;
  for (const auto& sw : ranked_) {
    if (out.size() == count) break;
    if (!history.count(sw.word)) out.push_back(sw);
  }
  if (out.size() < count) not_enough(count, out.size());
  return out;
}

std::optional<std::vector<ScoredWord>> FiniteSupportLm::support() const { return ranked_; }

DpfaLm::DpfaLm(Pfa pfa) : pfa_(std::move(pfa)) {
  if (auto v = validate(pfa_)) throw InvalidInput("reference PFA is invalid: " + v->message);
  const auto n = static_cast<Eigen::Index>(pfa_.dim());
  const auto& init = pfa_.initial();
  if ((init.array() > 0.0).count() != 1) throw InvalidInput("DPFA needs a single initial state");
  moves_.resize(pfa_.dim());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index q = 0; q < n; ++q) {
    for (Symbol s = 0; s < pfa_.alphabet().size(); ++s) {
      const auto row = pfa_.transition(s).row(q);
      if ((row.array() > 0.0).count() > 1)
        throw InvalidInput("PFA is not deterministic at state " + std::to_string(q));
      for (Eigen::Index j = 0; j < n; ++j)
        if (row(j) > 0.0) moves_[static_cast<std::size_t>(q)].emplace_back(s, static_cast<std::size_t>(j), row(j));
    }
    if (pfa_.final_weights()(q) > 0.0)
      moves_[static_cast<std::size_t>(q)].emplace_back(pfa_.alphabet().size(), 0, pfa_.final_weights()(q));
  }
  for (const auto& A : pfa_.wfa().transitions()) M += A;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(n, n) - M);
  if (!lu.isInvertible()) throw InvalidInput("DPFA is not consistent: I - M is singular");
  suffix_mass_ = lu.solve(pfa_.final_weights());
}

Word DpfaLm::sample(std::mt19937_64& rng) const {
  std::size_t q = 0;
  pfa_.initial().maxCoeff(&q);
  Word w;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (true) {
    const auto& mv = moves_[q];
    double total = 0.0;
    for (const auto& m : mv) total += std::get<2>(m);
    double u = unit(rng) * total;
    std::size_t pick = mv.size() - 1;
    for (std::size_t i = 0; i < mv.size(); ++i) {
      u -= std::get<2>(mv[i]);
      if (u < 0.0) {
        pick = i;
        break;
      }
    }
    const auto [sym, target, weight] = mv[pick];
    (void)weight;
    if (sym == pfa_.alphabet().size()) return w;
    w.push_back(sym);
    q = target;
  }
}

double DpfaLm::prefix_mass(const Word& prefix) const {
  return pfa_.wfa().forward(prefix).dot(suffix_mass_);
}

std::vector<ScoredWord> DpfaLm::most_probable(const std::set<Word>& history, std::size_t count) const {
  struct Entry {
    double value;
    bool complete;
    Word word;
    std::size_t state;
    double reach;  // probability of reading `word` from the start
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.complete != b.complete) return !a.complete;  // complete words first
    return shortlex_less(b.word, a.word);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);
  std::size_t q0 = 0;
  pfa_.initial().maxCoeff(&q0);
  queue.push({suffix_mass_(static_cast<Eigen::Index>(q0)), false, Word{}, q0, 1.0});
  std::vector<ScoredWord> out;
  while (out.size() < count && !queue.empty()) {
    Entry e = queue.top();
    queue.pop();
    if (e.complete) {
      if (!history.count(e.word)) out.push_back({e.word, e.value});
      continue;
    }
    const double stop = e.reach * pfa_.final_weights()(static_cast<Eigen::Index>(e.state));
    if (stop > 0.0) queue.push({stop, true, e.word, e.state, e.reach});
    for (const auto& [sym, target, weight] : moves_[e.state]) {
      if (sym == pfa_.alphabet().size()) continue;
      const double reach = e.reach * weight;
      const double mass = reach * suffix_mass_(static_cast<Eigen::Index>(target));
      if (!(mass > 0.0)) continue;
      Word w = e.word;
      w.push_back(sym);
      queue.push({mass, false, std::move(w), target, reach});
    }
  }
  if (out.size() < count) not_enough(count, out.size());
  return out;
}

Pfa random_dpfa(std::mt19937_64& rng, std::size_t n, const Alphabet& alphabet, double min_stop) {
  if (n == 0) throw InvalidInput("DPFA needs at least one state");
  if (!(min_stop > 0.0 && min_stop <= 1.0)) throw InvalidInput("min_stop must lie in (0, 1]");
  const auto N = static_cast<Eigen::Index>(n);
  const std::size_t k = alphabet.size();
  std::uniform_int_distribution<std::size_t> target(0, n - 1);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::vector<Eigen::MatrixXd> trans(k, Eigen::MatrixXd::Zero(N, N));
  Eigen::VectorXd fin(N);
  for (Eigen::Index q = 0; q < N; ++q) {
    std::vector<double> w(k + 1);
    double total = 0.0;
    for (auto& x : w) total += (x = unit(rng));
    for (auto& x : w) x /= total;
    fin(q) = min_stop + (1.0 - min_stop) * w[k];
    for (Symbol s = 0; s < k; ++s)
      trans[s](q, static_cast<Eigen::Index>(target(rng))) = (1.0 - min_stop) * w[s];
  }
  Eigen::VectorXd init = Eigen::VectorXd::Zero(N);
  init(0) = 1.0;
  return Pfa(alphabet, std::move(init), std::move(trans), std::move(fin), true);
}

}  // namespace fsmx
