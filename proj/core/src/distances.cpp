#include "fsmx/distances.hpp"

#include <cmath>
#include <fstream>

#include "fsmx/error.hpp"
#include "fsmx/rnn_io.hpp"

namespace fsmx {

using Eigen::VectorXd;

double WeightedLanguage::weight(const Word& w) const {
  alphabet().check(w);
  VectorXd v = start();
  for (Symbol s : w) v = extend(v, s);
  return finish(v);
}

VectorXd WfaLanguage::extend(const VectorXd& prefix, Symbol s) const {
  return (prefix.transpose() * wfa_.transition(s)).transpose();
}

RnnLmLanguage::RnnLmLanguage(RnnModel model) : model_(std::move(model)) {
  if (model_.head() != Head::Lm) throw InvalidInput("weighted language needs a language-model head");
}

HiddenState RnnLmLanguage::unpack(const VectorXd& v) const {
  const auto d = static_cast<Eigen::Index>(model_.dim());
  HiddenState st{v.head(d), VectorXd()};
  if (model_.kind() == CellKind::Lstm) st.c = v.segment(d, d);
  return st;
}

VectorXd RnnLmLanguage::pack(const HiddenState& st, double p) const {
  VectorXd v(st.h.size() + st.c.size() + 1);
  v << st.h, st.c, p;
  return v;
}

VectorXd RnnLmLanguage::start() const {
  return pack(model_.step(model_.initial_state(), model_.end_marker()), 1.0);
}

VectorXd RnnLmLanguage::extend(const VectorXd& prefix, Symbol s) const {
  const HiddenState st = unpack(prefix);
  const double p = prefix(prefix.size() - 1) * softmax2(model_.logits(st))(static_cast<Eigen::Index>(s));
  return pack(model_.step(st, s), p);
}

double RnnLmLanguage::finish(const VectorXd& prefix) const {
  const HiddenState st = unpack(prefix);
  return prefix(prefix.size() - 1) *
         softmax2(model_.logits(st))(static_cast<Eigen::Index>(model_.end_marker()));
}

RelabeledLanguage::RelabeledLanguage(std::shared_ptr<const WeightedLanguage> base, Alphabet alphabet,
                                     std::vector<Symbol> map)
    : base_(std::move(base)), alphabet_(std::move(alphabet)), map_(std::move(map)) {
  if (map_.size() != alphabet_.size()) throw ShapeMismatch("symbol map must cover the whole alphabet");
  for (Symbol s : map_)
    if (s >= base_->alphabet().size()) throw InvalidInput("symbol map targets a symbol outside the base alphabet");
}

RnnModel trivial_rnnlm(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidInput("epsilon must lie in (0, 1/2)");
  RnnModel m(CellKind::FirstOrder, Activation::Relu, 2, Alphabet::binary(), Head::Lm);
  const double bias = std::log2((1.0 - 2.0 * eps) / (4.0 * eps));
  m.param("Ob") << bias, bias, 0.0;
  return m;
}

Rational trivial_weight_exact(const Rational& eps, std::size_t length) {
  return 2 * eps * pow(Rational(1, 2) - eps, static_cast<unsigned>(length));
}

Rational c_epsilon(std::size_t n, std::size_t k, const Rational& eps, const Rational& s) {
  const Rational kk = static_cast<long>(k);
  return 2 * (eps * s / kk) * pow(Rational(1, 2) - eps, static_cast<unsigned>(n)) * (1 - 4 * eps) / (2 * eps);
}

Rational default_slack(std::size_t k) { return Rational(static_cast<long>(k)) - Rational(1, 2); }

namespace {

void check_reduction_args(const SatFormula& f, const Rational& eps, const Rational& s) {
  if (!(eps > 0 && eps < Rational(1, 4))) throw InvalidInput("epsilon must lie in (0, 1/4)");
  const Rational k = static_cast<long>(f.num_clauses());
  if (!(s >= k - 1 && s < k)) throw InvalidInput("slack s must lie in [k-1, k)");
}

bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

void check_support(std::size_t k, std::size_t max_len) {
  if (k == 0) throw InvalidInput("empty alphabet");
  double total = 1.0;
  for (std::size_t i = 0; i < max_len; ++i) {
    total *= static_cast<double>(k);
    if (total > kEnumerationGuard) break;
  }
  if (total > kEnumerationGuard || max_len > 100000)
    throw GuardExceeded("|Sigma|^" + std::to_string(max_len) + " exceeds the enumeration guard of 1e7");
}

// Depth-first walk over Σ^{≤max_len} carrying a prefix summary per level.
// visit(word, state) returns whether to descend below `word`.
template <class State, class Extend, class Visit>
void sweep(std::size_t k, std::size_t max_len, State root, Extend extend, Visit visit) {
  std::vector<State> stack{std::move(root)};
  Word w;
  bool descend = visit(w, stack.back());
  while (true) {
    if (descend && w.size() < max_len) {
      w.push_back(0);
      stack.push_back(extend(stack.back(), 0));
    } else {
      while (!w.empty() && w.back() + 1 == k) {
        w.pop_back();
        stack.pop_back();
      }
      if (w.empty()) return;
      stack.pop_back();
      ++w.back();
      stack.push_back(extend(stack.back(), w.back()));
    }
    descend = visit(w, stack.back());
  }
}

using PairState = std::pair<VectorXd, VectorXd>;

std::size_t common_alphabet(const WeightedLanguage& a, const WeightedLanguage& b) {
  if (a.alphabet().size() != b.alphabet().size())
    throw ShapeMismatch("models are defined over alphabets of different sizes");
  return a.alphabet().size();
}

template <class Visit>
void sweep_pair(const WeightedLanguage& a, const WeightedLanguage& b, std::size_t max_len, Visit visit) {
  const std::size_t k = common_alphabet(a, b);
  check_support(k, max_len);
  sweep(
      k, max_len, PairState{a.start(), b.start()},
      [&](const PairState& st, Symbol s) { return PairState{a.extend(st.first, s), b.extend(st.second, s)}; },
      [&](const Word& w, const PairState& st) { return visit(w, a.finish(st.first), b.finish(st.second)); });
}

}  // namespace

ReductionBundle make_bundle(const SatFormula& f, const Rational& eps, std::optional<Rational> s) {
  const Rational slack = s.value_or(default_slack(f.num_clauses()));
  check_reduction_args(f, eps, slack);
  ExactPfa exact = sat_to_pfa_exact(f, eps);
  Pfa pfa = to_pfa(exact);
  return ReductionBundle{f,           eps, slack, c_epsilon(f.num_vars(), f.num_clauses(), eps, slack),
                         std::move(exact), std::move(pfa), trivial_rnnlm(to_double(eps))};
}

Json bundle_meta(const ReductionBundle& b) {
  Json clauses = Json::array();
  for (const auto& c : b.formula.clauses()) {
    Json row = Json::array();
    for (const auto& l : c) row.push_back(l.positive ? static_cast<long>(l.atom) : -static_cast<long>(l.atom));
    clauses.push_back(std::move(row));
  }
  return Json{{"n", b.formula.num_vars()},
              {"k", b.formula.num_clauses()},
              {"clauses", std::move(clauses)},
              {"epsilon", format_double(to_double(b.epsilon))},
              {"s", format_double(to_double(b.s))},
              {"c_eps", format_double(to_double(b.c_eps))},
              {"epsilon_exact", to_string(b.epsilon)},
              {"s_exact", to_string(b.s)},
              {"c_eps_exact", to_string(b.c_eps)},
              {"pfa_states", b.pfa.dim()}};
}

void write_bundle(const std::filesystem::path& dir, const ReductionBundle& b) {
  std::filesystem::create_directories(dir);
  write_json_file(dir / "pfa.json", to_json(b.pfa));
  write_json_file(dir / "rnn.json", to_json(b.rnnlm));
  write_json_file(dir / "meta.json", bundle_meta(b));
}

SatDecision decide_sat(const SatFormula& f, const Rational& eps, std::optional<Rational> s) {
  const Rational slack = s.value_or(default_slack(f.num_clauses()));
  check_reduction_args(f, eps, slack);
  const ExactPfa pfa = sat_to_pfa_exact(f, eps);
  const Rational r = trivial_weight_exact(eps, f.num_vars());

  using Sparse = std::map<std::size_t, Rational>;
  Sparse root;
  for (std::size_t i = 0; i < pfa.dim; ++i)
    if (pfa.initial[i] != 0) root[i] = pfa.initial[i];

  SatDecision out{false, Rational(-1), c_epsilon(f.num_vars(), f.num_clauses(), eps, slack), Word{}};
  sweep(
      2, f.num_vars(), std::move(root),
      [&](const Sparse& v, Symbol sym) {
        Sparse next;
        for (const auto& [ij, x] : pfa.trans[sym])
          if (auto it = v.find(ij.first); it != v.end()) next[ij.second] += it->second * x;
        return next;
      },
      [&](const Word& w, const Sparse& v) {
        if (w.size() < f.num_vars()) return true;
        Rational a = 0;
        for (const auto& [i, x] : v) a += x * pfa.final_weights[i];
        const Rational gap = abs(r - a);
        if (gap > out.d_inf) {  // DFS at fixed length visits words in lex order
          out.d_inf = gap;
          out.witness = w;
        }
        return false;
      });
  out.satisfiable = out.d_inf > out.c_eps;
  return out;
}

SupDistance dist_inf_finite(const WeightedLanguage& a, const WeightedLanguage& b, std::size_t max_len) {
  SupDistance best{-1.0, Word{}};
  sweep_pair(a, b, max_len, [&](const Word& w, double x, double y) {
    const double gap = std::abs(x - y);
    if (gap > best.value || (gap == best.value && shortlex_less(w, best.witness))) best = SupDistance{gap, w};
    return true;
  });
  return best;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

EnumerationResult tchebychev_enumerate(const WeightedLanguage& a, const WeightedLanguage& b, double c,
                                       std::size_t cap) {
  if (!(c > 0.0)) throw InvalidInput("threshold c must be positive");
  const std::size_t k = common_alphabet(a, b);
  EnumerationResult r{Verdict::Inconclusive, std::nullopt, 0, 0.0, 0.0};
  Word w;
  do {
    if (r.strings_enumerated >= cap) return r;
    const double x = a.weight(w);
    const double y = b.weight(w);
    ++r.strings_enumerated;
    r.mass_a += x;
    r.mass_b += y;
    if (std::abs(x - y) > c) {
      r.verdict = Verdict::Yes;
      r.witness = w;
      return r;
    }
    if (r.mass_a >= 1.0 - c && r.mass_b >= 1.0 - c) {
      r.verdict = Verdict::No;
      return r;
    }
  } while (next_word(w, k, std::numeric_limits<std::size_t>::max()));
  return r;
}

std::optional<Word> eq_finite(const WeightedLanguage& a, const WeightedLanguage& b, std::size_t m) {
  std::optional<Word> best;
  sweep_pair(a, b, m, [&](const Word& w, double x, double y) {
    if (best && w.size() >= best->size()) return false;
    if (std::abs(x - y) > kEqualityTolerance) {
      best = w;
      return false;
    }
    return true;
  });
  return best;
}

std::optional<Word> eq_finite(const StateMachineOracle& a, const StateMachineOracle& b, std::size_t m) {
  if (a.num_symbols() != b.num_symbols())
    throw ShapeMismatch("recognizers are defined over alphabets of different sizes");
  check_support(a.num_symbols(), m);
  std::optional<Word> best;
  sweep(
      a.num_symbols(), m, PairState{a.initial(), b.initial()},
      [&](const PairState& st, Symbol s) { return PairState{a.step(st.first, s), b.step(st.second, s)}; },
      [&](const Word& w, const PairState& st) {
        if (best && w.size() >= best->size()) return false;
        if (a.classify(st.first) != b.classify(st.second)) {
          best = w;
          return false;
        }
        return true;
      });
  return best;
}

std::optional<Word> cut_intersection_finite(const WeightedLanguage& a, double lambda_a, const WeightedLanguage& b,
                                            double lambda_b, std::size_t m) {
  std::optional<Word> best;
  sweep_pair(a, b, m, [&](const Word& w, double x, double y) {
    if (best && w.size() >= best->size()) return false;
    if (x > lambda_a && y > lambda_b) {
      best = w;
      return false;
    }
    return true;
  });
  return best;
}

}  // namespace fsmx
