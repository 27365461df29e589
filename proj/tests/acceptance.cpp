// Acceptance suite: one PASS/FAIL line per criterion, plus a short detail.
#include "torsion/verify.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace torsion;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<Verdict()>& body) {
  const auto start = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (limit_seconds > 0 && secs >= limit_seconds) {
    v.ok = false;
    v.detail += " (over the " + std::to_string(limit_seconds) + " s limit)";
  }
  if (!v.ok) ++failures;
  std::printf("%s criterion %d: %s [%.2f s] %s\n", v.ok ? "PASS" : "FAIL", id, title, secs, v.detail.c_str());
  std::fflush(stdout);
}

Rational q(long p, long d) { return make_rational(p, d); }

std::string first_bad(const CheckReport& r) {
  if (auto f = r.first_failure()) return r.name + " failed at " + f->params.dump() + " -> " + f->values.dump();
  return "";
}

std::vector<std::vector<FactorKind>> kind_pairs() {
  const FactorKind kinds[] = {FactorKind::NonCM, FactorKind::CMSplit, FactorKind::CMNonsplit};
  std::vector<std::vector<FactorKind>> out;
  for (FactorKind a : kinds)
    for (FactorKind b : kinds) out.push_back({a, b});
  return out;
}

}  // namespace

int main() {
  criterion(1, "alpha closed forms for m = 1..6", 1.0, [] {
    Verdict v;
    for (int m = 1; m <= 6; ++m) {
      const Rational nc = alpha(make_variety(std::vector<int>(m, 1), {})).value;
      const Rational cm = alpha(make_variety({}, std::vector<int>(m, 1))).value;
      if (nc != q(2 * m, 1 + 3 * m) || cm != q(2 * m, 1 + m)) {
        v = {false, "m = " + std::to_string(m) + ": " + to_string(nc) + ", " + to_string(cm)};
        return v;
      }
    }
    v.detail = "12 exact matches";
    return v;
  });

  criterion(2, "mixed specs take the CM value", 0, [] {
    int cases = 0;
    for (int n = 2; n <= 6; ++n)
      for (int r = 1; r < n; ++r) {
        const Rational a = alpha(make_variety(std::vector<int>(n - r, 1), std::vector<int>(r, 1))).value;
        if (a != q(2 * r, 1 + r) || !(a > q(2 * n, 1 + r + 3 * (n - r)))) {
          return Verdict{false, "r = " + std::to_string(r) + ", n = " + std::to_string(n) + ": " + to_string(a)};
        }
        ++cases;
      }
    return Verdict{true, std::to_string(cases) + " pairs (r, n)"};
  });

  criterion(3, "m_invariant = alpha over <= 4 classes, multiplicity <= 3", 120.0, [] {
    const CheckReport r = check_alpha_eq_m({4, 3, 6});
    return Verdict{r.passed(), std::to_string(r.cells.size()) + " specs, " +
                                   r.measured_constants["grid_equalities"].dump() + " grid equalities " +
                                   first_bad(r)};
  });

  criterion(4, "G_{m,n} SL_2 = Gamma_m exhaustively", 0, [] {
    std::size_t cells = 0;
    for (std::uint64_t ell : {2, 3, 5}) {
      for (int level = 1; level <= 3; ++level) {
        if (factor_group_order(FactorKind::NonCM, Modulus(ell, level)) > 10'000'000) continue;
        const CheckReport r = check_gammamn(ell, level);
        cells += r.cells.size();
        if (!r.passed()) return Verdict{false, first_bad(r)};
      }
    }
    return Verdict{true, std::to_string(cells) + " cells, zero failures"};
  });

  criterion(5, "formula degrees equal the enumeration oracle", 0, [] {
    const CheckReport r = check_degree_oracle({2, 3}, 2, 2);
    const bool ok = r.passed() && r.count(CellStatus::Skipped) == 0;
    return Verdict{ok, std::to_string(r.count(CellStatus::Pass)) + " cells, " +
                           std::to_string(r.count(CellStatus::Fail)) + " mismatches, " +
                           std::to_string(r.count(CellStatus::Skipped)) + " skipped " + first_bad(r)};
  });

  criterion(6, "property mu with index defect 1", 0, [] {
    std::size_t cells = 0, skipped_outside = 0;
    for (FactorKind kind : {FactorKind::NonCM, FactorKind::CMSplit, FactorKind::CMNonsplit})
      for (std::uint64_t ell : {2, 3, 5})
        for (int level = 1; level <= 3; ++level) {
          const CheckReport r = check_property_mu(kind, ell, level);
          if (r.count(CellStatus::Fail) > 0) return Verdict{false, first_bad(r)};
          for (const auto& c : r.cells) {
            if (c.status != CellStatus::Skipped) {
              ++cells;
              continue;
            }
            // Only the m = 0 cells of the largest group may be over budget.
            if (c.params["shape"][0] != 0) return Verdict{false, "skipped " + c.params.dump()};
            ++skipped_outside;
          }
          if (r.measured_constants["max_index_defect"] != "1") return Verdict{false, "defect " + r.name};
        }
    return Verdict{true, std::to_string(cells) + " cells; " + std::to_string(skipped_outside) +
                             " over-budget cells with m = 0"};
  });

  criterion(7, "degree lower bounds", 0, [] {
    const CheckReport r = check_degree_lower_bounds({2, 3}, 2);
    return Verdict{r.passed(), std::to_string(r.cells.size()) + " cells " + first_bad(r)};
  });

  criterion(8, "parallelogram ratio bounded by a level-independent C", 0, [] {
    std::string constants;
    for (std::uint64_t ell : {2, 3, 5}) {
      for (const auto& kinds : kind_pairs()) {
        ParallelogramOptions opts;
        opts.levels = {1, 2, 3};
        opts.spot_level = 24;
        opts.oracle_level = 1;
        const CheckReport r = check_parallelogram(kinds, ell, opts);
        if (!r.passed()) return Verdict{false, first_bad(r)};
        if (kinds[0] == kinds[1]) {
          constants += " l=" + std::to_string(ell) + "/" + std::string(to_string(kinds[0])) + "^2:C=" +
                       r.measured_constants["C"].get<std::string>();
        }
      }
    }
    return Verdict{true, "27 (l, kinds) grids;" + constants};
  });

  criterion(9, "achieved ratio converges to alpha at l = 3, t = 12", 10.0, [] {
    Verdict v;
    const std::pair<const char*, VarietySpec> specs[] = {
        {"1 CM", make_variety({}, {1})}, {"1 non-CM", make_variety({1}, {})}, {"2 non-CM", make_variety({1, 1}, {})}};
    for (const auto& [name, spec] : specs) {
      const CheckReport r = check_alpha_convergence(spec, 3, 12, 0.05);
      char buf[96];
      std::snprintf(buf, sizeof buf, " %s gap=%.4f", name, r.measured_constants["final_gap"].get<double>());
      v.detail += buf;
      if (!r.passed()) {
        v.ok = false;
        v.detail += " " + first_bad(r);
      }
    }
    return v;
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
