#pragma once

#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "fsmx/dfa.hpp"
#include "fsmx/wfa.hpp"

namespace fsmx::test {

inline Dfa random_dfa(std::mt19937_64& rng, std::size_t n, std::size_t k = 2) {
  std::uniform_int_distribution<StateId> st(0, n - 1);
  std::vector<StateId> delta(n * k);
  for (auto& q : delta) q = st(rng);
  std::vector<bool> acc(n);
  for (std::size_t i = 0; i < n; ++i) acc[i] = (rng() & 1) != 0;
  std::vector<std::string> names;
  for (std::size_t s = 0; s < k; ++s) names.push_back(std::string(1, static_cast<char>('0' + s)));
  return Dfa(Alphabet(names), n, 0, std::move(delta), std::move(acc));
}

// Number of Nerode classes among reachable states, by the pairwise
// distinguishability table (independent of fsmx::minimize).
inline std::size_t nerode_class_count(const Dfa& d) {
  const std::size_t n = d.size(), k = d.num_symbols();
  std::vector<bool> reach(n, false);
  std::vector<StateId> stack{d.initial()};
  reach[d.initial()] = true;
  while (!stack.empty()) {
    const StateId q = stack.back();
    stack.pop_back();
    for (Symbol s = 0; s < k; ++s)
      if (!reach[d.next(q, s)]) {
        reach[d.next(q, s)] = true;
        stack.push_back(d.next(q, s));
      }
  }
  std::vector<std::vector<bool>> dist(n, std::vector<bool>(n, false));
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) dist[p][q] = d.accepting(p) != d.accepting(q);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        if (!dist[p][q])
          for (Symbol s = 0; s < k; ++s)
            if (dist[d.next(p, s)][d.next(q, s)]) {
              dist[p][q] = true;
              changed = true;
              break;
            }
  }
  std::size_t classes = 0;
  std::vector<bool> done(n, false);
  for (std::size_t p = 0; p < n; ++p) {
    if (!reach[p] || done[p]) continue;
    ++classes;
    for (std::size_t q = p; q < n; ++q)
      if (reach[q] && !dist[p][q]) done[q] = true;
  }
  return classes;
}

// Random PFA: each state spreads its mass over all (symbol, target) edges
// plus stopping.
inline Pfa random_pfa(std::mt19937_64& rng, std::size_t n, std::size_t k = 2, double min_stop = 0.05) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto N = static_cast<Eigen::Index>(n);
  std::vector<Eigen::MatrixXd> T(k, Eigen::MatrixXd::Zero(N, N));
  Eigen::VectorXd fin(N), init(N);
  for (Eigen::Index q = 0; q < N; ++q) {
    double total = 0.0;
    std::vector<double> w(k * n + 1);
    for (auto& x : w) total += (x = u(rng));
    for (auto& x : w) x /= total;
    fin(q) = min_stop + (1.0 - min_stop) * w.back();
    for (std::size_t s = 0; s < k; ++s)
      for (Eigen::Index j = 0; j < N; ++j) T[s](q, j) = (1.0 - min_stop) * w[s * n + static_cast<std::size_t>(j)];
    init(q) = u(rng);
  }
  init /= init.sum();
  std::vector<std::string> names;
  for (std::size_t s = 0; s < k; ++s) names.push_back(std::string(1, static_cast<char>('a' + s)));
  return Pfa(Alphabet(names), init, T, fin);
}

inline Word W(std::initializer_list<int> bits) {
  Word w;
  for (int b : bits) w.push_back(static_cast<Symbol>(b));
  return w;
}

}  // namespace fsmx::test
