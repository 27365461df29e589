#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "torsion/lp.hpp"

#include <optional>
#include <random>

using namespace torsion;
using namespace torsion::lp;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

// Best vertex of a 2-variable problem with x, y >= 0 by intersecting every
// pair of boundary lines.
std::optional<Rational> brute_force_2d(const Problem& p) {
  std::vector<std::array<Rational, 3>> lines;  // a x + b y = c
  for (const auto& c : p.constraints) lines.push_back({c.coeffs[0], c.coeffs[1], c.rhs});
  lines.push_back({1, 0, 0});
  lines.push_back({0, 1, 0});
  std::optional<Rational> best;
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto& [a1, b1, c1] = lines[i];
      const auto& [a2, b2, c2] = lines[j];
      const Rational det = a1 * b2 - a2 * b1;
      if (det == 0) continue;
      const Rational x = (c1 * b2 - c2 * b1) / det, y = (a1 * c2 - a2 * c1) / det;
      if (x < 0 || y < 0) continue;
      bool feasible = true;
      for (const auto& c : p.constraints) {
        const Rational lhs = c.coeffs[0] * x + c.coeffs[1] * y;
        if (c.sense == Sense::LessEq && lhs > c.rhs) feasible = false;
        if (c.sense == Sense::GreaterEq && lhs < c.rhs) feasible = false;
        if (c.sense == Sense::Equal && lhs != c.rhs) feasible = false;
      }
      if (!feasible) continue;
      const Rational v = p.objective[0] * x + p.objective[1] * y;
      if (!best || v > *best) best = v;
    }
  return best;
}

}  // namespace

TEST_CASE("textbook program") {
  Problem p{2, {1, 1}, {}};
  p.add({1, 2}, Sense::LessEq, 4);
  p.add({3, 1}, Sense::LessEq, 6);
  const Solution s = maximize(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.value == q(14, 5));
  CHECK(s.x[0] == q(8, 5));
  CHECK(s.x[1] == q(6, 5));
}

TEST_CASE("equality and >= rows") {
  Problem p{3, {1, 2, 3}, {}};
  p.add({1, 1, 1}, Sense::Equal, 1);
  p.add({0, 0, 1}, Sense::LessEq, q(1, 2));
  p.add({1, 0, 0}, Sense::GreaterEq, q(1, 4));
  const Solution s = maximize(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.value == q(1, 4) + q(2, 4) + q(3, 2));
}

TEST_CASE("negative right-hand side is normalized") {
  Problem p{1, {-1}, {}};
  p.add({-1}, Sense::LessEq, -3);  // x >= 3
  const Solution s = maximize(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.x[0] == 3);
}

TEST_CASE("infeasible and unbounded") {
  Problem a{1, {1}, {}};
  a.add({1}, Sense::LessEq, 1);
  a.add({1}, Sense::GreaterEq, 2);
  CHECK(maximize(a).status == Status::Infeasible);

  Problem b{2, {1, 0}, {}};
  b.add({1, -1}, Sense::LessEq, 1);
  CHECK(maximize(b).status == Status::Unbounded);
}

TEST_CASE("redundant equalities") {
  Problem p{2, {1, 1}, {}};
  p.add({1, 1}, Sense::Equal, 2);
  p.add({2, 2}, Sense::Equal, 4);
  p.add({1, 0}, Sense::LessEq, 1);
  const Solution s = maximize(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.value == 2);
}

TEST_CASE("degenerate vertex does not cycle") {
  // Classic Beale-style degeneracy; Bland's rule terminates.
  Problem p{4, {q(3, 4), -150, q(1, 50), -6}, {}};
  p.add({q(1, 4), -60, q(-1, 25), 9}, Sense::LessEq, 0);
  p.add({q(1, 2), -90, q(-1, 50), 3}, Sense::LessEq, 0);
  p.add({0, 0, 1, 0}, Sense::LessEq, 1);
  const Solution s = maximize(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.value == q(1, 20));
}

TEST_CASE("width errors") {
  Problem p{2, {1}, {}};
  CHECK_THROWS_AS(maximize(p), InvalidArgument);
  Problem r{2, {1, 1}, {}};
  CHECK_THROWS_AS(r.add({1}, Sense::LessEq, 1), InvalidArgument);
}

TEST_CASE("random 2-variable programs against vertex enumeration") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coef(-4, 6), rhs(0, 10), sense(0, 5);
  int optimal = 0;
  for (int trial = 0; trial < 400; ++trial) {
    Problem p{2, {coef(rng), coef(rng)}, {}};
    const int rows = 1 + trial % 4;
    for (int i = 0; i < rows; ++i) {
      const int s = sense(rng);
      p.add({coef(rng), coef(rng)}, s == 0 ? Sense::GreaterEq : (s == 1 ? Sense::Equal : Sense::LessEq), rhs(rng));
    }
    // Box keeps every feasible problem bounded.
    p.add({1, 0}, Sense::LessEq, 20);
    p.add({0, 1}, Sense::LessEq, 20);
    const Solution s = maximize(p);
    const auto brute = brute_force_2d(p);
    CAPTURE(trial);
    if (!brute) {
      CHECK(s.status == Status::Infeasible);
    } else {
      REQUIRE(s.status == Status::Optimal);
      CHECK(s.value == *brute);
      ++optimal;
    }
  }
  CHECK(optimal > 100);
}
