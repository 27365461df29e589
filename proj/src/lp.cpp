#include "torsion/lp.hpp"

#include <optional>

namespace torsion::lp {

void Problem::add(std::vector<Rational> coeffs, Sense sense, Rational rhs) {
  if (coeffs.size() != num_vars) throw InvalidArgument("lp: constraint width does not match num_vars");
  constraints.push_back({std::move(coeffs), sense, std::move(rhs)});
}

namespace {

struct Tableau {
  // rows[i] has `cols` coefficients followed by the right-hand side.
  std::vector<std::vector<Rational>> rows;
  std::vector<std::size_t> basis;
  std::size_t cols = 0;

  void pivot(std::size_t r, std::size_t c) {
    const Rational p = rows[r][c];
    for (auto& v : rows[r]) v /= p;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      const Rational f = rows[i][c];
      for (std::size_t j = 0; j <= cols; ++j) {
        if (rows[r][j] != 0) rows[i][j] -= f * rows[r][j];
      }
    }
    basis[r] = c;
  }

  // Reduced costs of `cost` for the current basis (maximization).
  std::vector<Rational> reduced(const std::vector<Rational>& cost, const std::vector<bool>& allowed) const {
    std::vector<Rational> red(cols, 0);
    for (std::size_t j = 0; j < cols; ++j) {
      if (!allowed[j]) continue;
      Rational z = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) z += cost[basis[i]] * rows[i][j];
      red[j] = cost[j] - z;
    }
    return red;
  }

  // Runs Bland-rule iterations; returns false when unbounded.
  bool optimize(const std::vector<Rational>& cost, const std::vector<bool>& allowed) {
    for (;;) {
      const std::vector<Rational> red = reduced(cost, allowed);
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < cols; ++j) {
        if (allowed[j] && red[j] > 0) {
          enter = j;
          break;
        }
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][*enter] <= 0) continue;
        const Rational ratio = rows[i][cols] / rows[i][*enter];
        if (!leave || ratio < best || (ratio == best && basis[i] < basis[*leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
    }
  }
};

}  // namespace

Solution maximize(const Problem& problem) {
  if (problem.objective.size() != problem.num_vars) {
    throw InvalidArgument("lp: objective width does not match num_vars");
  }
  const std::size_t n = problem.num_vars;
  const std::size_t m = problem.constraints.size();

  // Column layout: structural | slack/surplus | artificial.
  std::size_t extra = 0;
  std::size_t artificial = 0;
  std::vector<Constraint> rows = problem.constraints;
  for (auto& c : rows) {
    if (c.rhs < 0) {
      for (auto& v : c.coeffs) v = -v;
      c.rhs = -c.rhs;
      if (c.sense == Sense::LessEq) c.sense = Sense::GreaterEq;
      else if (c.sense == Sense::GreaterEq) c.sense = Sense::LessEq;
    }
    if (c.sense != Sense::Equal) ++extra;
    if (c.sense != Sense::LessEq) ++artificial;
  }

  Tableau t;
  t.cols = n + extra + artificial;
  t.rows.assign(m, std::vector<Rational>(t.cols + 1, 0));
  t.basis.assign(m, 0);
  std::size_t next_extra = n;
  std::size_t next_art = n + extra;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.rows[i][j] = rows[i].coeffs[j];
    t.rows[i][t.cols] = rows[i].rhs;
    switch (rows[i].sense) {
      case Sense::LessEq:
        t.rows[i][next_extra] = 1;
        t.basis[i] = next_extra++;
        break;
      case Sense::GreaterEq:
        t.rows[i][next_extra++] = -1;
        t.rows[i][next_art] = 1;
        t.basis[i] = next_art++;
        break;
      case Sense::Equal:
        t.rows[i][next_art] = 1;
        t.basis[i] = next_art++;
        break;
    }
  }

  std::vector<bool> all(t.cols, true);
  if (artificial > 0) {
    std::vector<Rational> phase1(t.cols, 0);
    for (std::size_t j = n + extra; j < t.cols; ++j) phase1[j] = -1;
    t.optimize(phase1, all);
    Rational residual = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis[i] >= n + extra) residual += t.rows[i][t.cols];
    }
    if (residual != 0) return {Status::Infeasible, 0, {}};
    // Drive degenerate artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < t.rows.size();) {
      if (t.basis[i] < n + extra) {
        ++i;
        continue;
      }
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < n + extra; ++j) {
        if (t.rows[i][j] != 0) {
          col = j;
          break;
        }
      }
      if (col) {
        t.pivot(i, *col);
        ++i;
      } else {
        t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(i));
        t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
  }

  std::vector<bool> allowed(t.cols, false);
  for (std::size_t j = 0; j < n + extra; ++j) allowed[j] = true;
  std::vector<Rational> cost(t.cols, 0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = problem.objective[j];
  if (!t.optimize(cost, allowed)) return {Status::Unbounded, 0, {}};

  Solution sol;
  sol.status = Status::Optimal;
  sol.x.assign(n, 0);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.basis[i] < n) sol.x[t.basis[i]] = t.rows[i][t.cols];
  }
  for (std::size_t j = 0; j < n; ++j) sol.value += problem.objective[j] * sol.x[j];
  return sol;
}

}  // namespace torsion::lp
