#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fsmx/alphabet.hpp"
#include "fsmx/rational.hpp"
#include "fsmx/wfa.hpp"

namespace fsmx {

struct Literal {
  std::size_t atom;  // 1-based
  bool positive;

  friend bool operator==(const Literal&, const Literal&) = default;
};

using Clause = std::array<Literal, 3>;

// 3-CNF over atoms 1..n. Literals inside each clause are kept sorted by atom.
class SatFormula {
 public:
  SatFormula(std::size_t num_vars, std::vector<Clause> clauses);

  std::size_t num_vars() const noexcept { return n_; }
  std::size_t num_clauses() const noexcept { return clauses_.size(); }
  const std::vector<Clause>& clauses() const noexcept { return clauses_; }

  // Clauses satisfied by x_j = bits[j-1] for j ≤ min(n, |bits|); atoms past
  // the end of `bits` satisfy nothing.
  std::size_t satisfied_count(const Word& bits) const;
  bool satisfied_by(const Word& bits) const { return satisfied_count(bits) == num_clauses(); }

  friend bool operator==(const SatFormula&, const SatFormula&) = default;

 private:
  std::size_t n_;
  std::vector<Clause> clauses_;
};

// DIMACS CNF restricted to clauses of exactly three literals.
SatFormula read_dimacs(std::istream& in);
std::string to_dimacs(const SatFormula& f);

// Exhaustive search over all 2^n assignments.
bool brute_force_sat(const SatFormula& f);

SatFormula random_formula(std::mt19937_64& rng, std::size_t num_vars, std::size_t num_clauses);

// Exact sparse PFA over rationals.
struct ExactPfa {
  Alphabet alphabet;
  std::size_t dim = 0;
  std::vector<Rational> initial;
  std::vector<Rational> final_weights;
  // trans[σ][(i, j)]
  std::vector<std::map<std::pair<std::size_t, std::size_t>, Rational>> trans;
};

// State numbering: q0 is 0; q_{ij}^T / q_{ij}^F (clause i in [0,k), prefix
// length j in [1,n]) are 1 + 2(i·n + j − 1) and the next index. A T state
// means the first j bits already satisfy clause i. Requires 0 < ε < 1/2.
ExactPfa sat_to_pfa_exact(const SatFormula& f, const Rational& eps);
Pfa to_pfa(const ExactPfa& exact);
Pfa sat_to_pfa(const SatFormula& f, const Rational& eps);

Rational exact_weight(const ExactPfa& pfa, const Word& w);

// The three-case closed form of the language of sat_to_pfa(f, ε).
Rational closed_form_exact(const SatFormula& f, const Rational& eps, const Word& w);
double closed_form(const SatFormula& f, double eps, const Word& w);

}  // namespace fsmx
