#pragma once

// Dense two-phase simplex over exact rationals with Bland's rule.
// Intended for the small programs produced by the m(A) optimizer.

#include "torsion/modular.hpp"

#include <vector>

namespace torsion::lp {

enum class Sense { LessEq, Equal, GreaterEq };

struct Constraint {
  std::vector<Rational> coeffs;
  Sense sense = Sense::LessEq;
  Rational rhs = 0;
};

/// maximize objective . x  subject to constraints, x >= 0.
struct Problem {
  std::size_t num_vars = 0;
  std::vector<Rational> objective;
  std::vector<Constraint> constraints;

  void add(std::vector<Rational> coeffs, Sense sense, Rational rhs);
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  Rational value = 0;
  std::vector<Rational> x;
};

Solution maximize(const Problem& problem);

}  // namespace torsion::lp
