#include "fsmx/sat.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

#include "fsmx/error.hpp"

namespace fsmx {

SatFormula::SatFormula(std::size_t num_vars, std::vector<Clause> clauses)
    : n_(num_vars), clauses_(std::move(clauses)) {
  if (n_ == 0) throw InvalidInput("formula needs at least one variable");
  if (clauses_.empty()) throw InvalidInput("formula needs at least one clause");
  for (auto& c : clauses_) {
    for (const auto& l : c)
      if (l.atom == 0 || l.atom > n_)
        throw InvalidInput("literal refers to atom " + std::to_string(l.atom) + " outside 1.." +
                           std::to_string(n_));
    std::stable_sort(c.begin(), c.end(), [](const Literal& a, const Literal& b) { return a.atom < b.atom; });
  }
}

std::size_t SatFormula::satisfied_count(const Word& bits) const {
  std::size_t count = 0;
  for (const auto& c : clauses_) {
    bool sat = false;
    for (const auto& l : c)
      if (l.atom <= bits.size() && (bits[l.atom - 1] == 1) == l.positive) sat = true;
    count += sat ? 1 : 0;
  }
  return count;
}

SatFormula read_dimacs(std::istream& in) {
  std::size_t n = 0, k = 0;
  bool header = false;
  std::vector<Clause> clauses;
  std::vector<long> pending;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first == "c" || first[0] == 'c' || first == "%") continue;
    if (first == "p") {
      std::string fmt;
      if (!(ls >> fmt >> n >> k) || fmt != "cnf") throw InvalidInput("malformed DIMACS header: " + line);
      header = true;
      continue;
    }
    if (!header) throw InvalidInput("DIMACS clause before the 'p cnf' header");
    std::istringstream all(line);
    long lit = 0;
    while (all >> lit) {
      if (lit != 0) {
        pending.push_back(lit);
        continue;
      }
      if (pending.size() != 3)
        throw InvalidInput("only 3-CNF is supported; found a clause with " + std::to_string(pending.size()) +
                           " literals");
      Clause c;
      for (std::size_t i = 0; i < 3; ++i)
        c[i] = Literal{static_cast<std::size_t>(std::labs(pending[i])), pending[i] > 0};
      clauses.push_back(c);
      pending.clear();
    }
    if (!all.eof()) throw InvalidInput("non-numeric token in DIMACS clause line: " + line);
  }
  if (!header) throw InvalidInput("missing 'p cnf' header");
  if (!pending.empty()) throw InvalidInput("last DIMACS clause is not terminated by 0");
  if (clauses.size() != k)
    throw InvalidInput("header announces " + std::to_string(k) + " clauses, found " +
                       std::to_string(clauses.size()));
  return SatFormula(n, std::move(clauses));
}

std::string to_dimacs(const SatFormula& f) {
  std::ostringstream out;
  out << "p cnf " << f.num_vars() << ' ' << f.num_clauses() << '\n';
  for (const auto& c : f.clauses()) {
    for (const auto& l : c) out << (l.positive ? "" : "-") << l.atom << ' ';
    out << "0\n";
  }
  return out.str();
}

bool brute_force_sat(const SatFormula& f) {
  Word bits(f.num_vars(), 0);
  const std::uint64_t total = std::uint64_t{1} << f.num_vars();
  for (std::uint64_t a = 0; a < total; ++a) {
    for (std::size_t j = 0; j < f.num_vars(); ++j) bits[j] = (a >> j) & 1;
    if (f.satisfied_by(bits)) return true;
  }
  return false;
}

SatFormula random_formula(std::mt19937_64& rng, std::size_t num_vars, std::size_t num_clauses) {
  std::uniform_int_distribution<std::size_t> atom(1, num_vars);
  std::bernoulli_distribution sign(0.5);
  std::vector<Clause> clauses(num_clauses);
  for (auto& c : clauses)
    for (auto& l : c) l = Literal{atom(rng), sign(rng)};
  return SatFormula(num_vars, std::move(clauses));
}

namespace {

// Does reading `bit` as x_atom satisfy some literal of the clause?
bool hits(const Clause& c, std::size_t atom, Symbol bit) {
  for (const auto& l : c)
    if (l.atom == atom && (bit == 1) == l.positive) return true;
  return false;
}

}  // namespace

ExactPfa sat_to_pfa_exact(const SatFormula& f, const Rational& eps) {
  if (!(eps > 0 && eps < Rational(1, 2))) throw InvalidInput("epsilon must lie in (0, 1/2)");
  const std::size_t n = f.num_vars();
  const std::size_t k = f.num_clauses();
  const std::size_t dim = 1 + 2 * k * n;
  auto idx = [n](std::size_t i, std::size_t j, bool t) { return 1 + 2 * (i * n + j - 1) + (t ? 0 : 1); };

  ExactPfa p{Alphabet::binary(), dim, std::vector<Rational>(dim, 0), std::vector<Rational>(dim, 2 * eps),
             std::vector<std::map<std::pair<std::size_t, std::size_t>, Rational>>(2)};
  p.initial[0] = 1;
  const Rational half_minus = Rational(1, 2) - eps;
  const Rational entry = Rational(1, 2 * static_cast<long>(k)) - eps / static_cast<long>(k);

  for (Symbol b = 0; b < 2; ++b) {
    auto& T = p.trans[b];
    for (std::size_t i = 0; i < k; ++i) {
      const Clause& c = f.clauses()[i];
      T[{0, idx(i, 1, hits(c, 1, b))}] += entry;
      for (std::size_t j = 1; j < n; ++j) {
        T[{idx(i, j, true), idx(i, j + 1, true)}] += half_minus;
        T[{idx(i, j, false), idx(i, j + 1, hits(c, j + 1, b))}] += half_minus;
      }
      T[{idx(i, n, true), idx(i, n, false)}] += eps;
      T[{idx(i, n, false), idx(i, n, false)}] += half_minus;
    }
  }
  for (std::size_t i = 0; i < k; ++i) p.final_weights[idx(i, n, true)] = 1 - 2 * eps;
  return p;
}

Pfa to_pfa(const ExactPfa& exact) {
  const auto n = static_cast<Eigen::Index>(exact.dim);
  Eigen::VectorXd alpha(n), fin(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    alpha(i) = to_double(exact.initial[static_cast<std::size_t>(i)]);
    fin(i) = to_double(exact.final_weights[static_cast<std::size_t>(i)]);
  }
  std::vector<Eigen::MatrixXd> mats;
  for (const auto& T : exact.trans) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [ij, v] : T)
      m(static_cast<Eigen::Index>(ij.first), static_cast<Eigen::Index>(ij.second)) = to_double(v);
    mats.push_back(std::move(m));
  }
  return Pfa(exact.alphabet, std::move(alpha), std::move(mats), std::move(fin));
}

Pfa sat_to_pfa(const SatFormula& f, const Rational& eps) { return to_pfa(sat_to_pfa_exact(f, eps)); }

Rational exact_weight(const ExactPfa& pfa, const Word& w) {
  pfa.alphabet.check(w);
  std::map<std::size_t, Rational> v;
  for (std::size_t i = 0; i < pfa.dim; ++i)
    if (pfa.initial[i] != 0) v[i] = pfa.initial[i];
  for (Symbol s : w) {
    std::map<std::size_t, Rational> next;
    for (const auto& [ij, x] : pfa.trans[s])
      if (auto it = v.find(ij.first); it != v.end()) next[ij.second] += it->second * x;
    v = std::move(next);
  }
  Rational total = 0;
  for (const auto& [i, x] : v) total += x * pfa.final_weights[i];
  return total;
}

Rational closed_form_exact(const SatFormula& f, const Rational& eps, const Word& w) {
  if (!(eps > 0 && eps < Rational(1, 2))) throw InvalidInput("epsilon must lie in (0, 1/2)");
  Alphabet::binary().check(w);
  const std::size_t n = f.num_vars();
  const Rational k = static_cast<long>(f.num_clauses());
  const Rational base = 2 * pow(Rational(1, 2) - eps, static_cast<unsigned>(w.size())) * eps;
  if (w.size() < n) return base;
  const Rational N = static_cast<long>(f.satisfied_count(Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n))));
  const Rational ratio = w.size() == n ? Rational((1 - 2 * eps) / (2 * eps)) : Rational((2 * eps) / (1 - 2 * eps));
  return base * ((N / k) * ratio + (k - N) / k);
}

double closed_form(const SatFormula& f, double eps, const Word& w) {
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidInput("epsilon must lie in (0, 1/2)");
  Alphabet::binary().check(w);
  const std::size_t n = f.num_vars();
  const double k = static_cast<double>(f.num_clauses());
  const double base = 2.0 * std::pow(0.5 - eps, static_cast<double>(w.size())) * eps;
  if (w.size() < n) return base;
  const double N =
      static_cast<double>(f.satisfied_count(Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n))));
  const double ratio = w.size() == n ? (1.0 - 2.0 * eps) / (2.0 * eps) : (2.0 * eps) / (1.0 - 2.0 * eps);
  return base * ((N / k) * ratio + (k - N) / k);
}

}  // namespace fsmx
