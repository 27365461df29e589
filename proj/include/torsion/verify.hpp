#pragma once

/**
 * @file verify.hpp
 * @brief Exhaustive and formula-path checks tying the combinatorial layer to
 *        the Galois model. Each check returns a CheckReport with one cell per
 *        grid point; failing cells carry the offending parameters and values,
 *        so re-running the check on those parameters reproduces them.
 */

#include "torsion/enumerate.hpp"
#include "torsion/invariants.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace torsion {

enum class CellStatus { Pass, Fail, Skipped };

std::string_view to_string(CellStatus status);

struct CheckCell {
  nlohmann::json params;
  CellStatus status = CellStatus::Pass;
  nlohmann::json values = nlohmann::json::object();
};

struct CheckReport {
  std::string name;
  nlohmann::json grid = nlohmann::json::object();
  std::vector<CheckCell> cells;
  nlohmann::json measured_constants = nlohmann::json::object();

  void add(nlohmann::json params, bool ok, nlohmann::json values = nlohmann::json::object());
  void skip(nlohmann::json params, std::string reason);
  /// True when no cell failed and at least one cell ran.
  bool passed() const;
  std::size_t count(CellStatus status) const;
  std::optional<CheckCell> first_failure() const;
  nlohmann::json to_json(bool include_cells = true) const;
};

/// G_{m,n} * SL_2 == {M : det M = 1 mod l^m} at level N, for all m <= n <= N,
/// by explicit set computation.
CheckReport check_gammamn(std::uint64_t ell, int level, std::uint64_t budget = kDefaultBudget);

/// The multiplier image of every shape's fixer is exactly U_m, m the lower
/// exponent of the (stabilized, for CM) shape; index defect 1.
CheckReport check_property_mu(FactorKind kind, std::uint64_t ell, int level,
                              std::uint64_t budget = kDefaultBudget);

/// Formula-path degrees against the enumeration oracle on every aligned shape
/// assignment, for all kind tuples with up to max_factors factors.
CheckReport check_degree_oracle(const std::vector<std::uint64_t>& ells, int max_level, std::size_t max_factors,
                                std::uint64_t budget = kDefaultBudget);

/// log_l(degree) >= 2(m+n) - 3 (NonCM) and >= (m+n) - 2 (CM) for single factors.
CheckReport check_degree_lower_bounds(const std::vector<std::uint64_t>& ells, int max_level,
                                      std::uint64_t budget = kDefaultBudget);

/// R(N) = degree(H) * l^(sum m_i - max m_i) / prod degree(H_i) on the
/// parallelogram of shapes.
Rational parallelogram_ratio(const ProductModel& model, const std::vector<SubgroupShape>& shapes);

struct ParallelogramOptions {
  std::vector<int> levels{1, 2, 3};
  /// Extra large level checked on a sparse exponent grid; 0 disables.
  int spot_level = 0;
  /// Level at which every assignment is recomputed with the oracle; 0 disables.
  int oracle_level = 0;
  std::uint64_t budget = kDefaultBudget;
};

/// Records min/max R and C = max(max R, 1/min R) per level; passes when C is
/// the same at every level and the spot level stays inside [1/C, C].
CheckReport check_parallelogram(const std::vector<FactorKind>& kinds, std::uint64_t ell,
                                const ParallelogramOptions& options = {});

/// achieved_ratio along worst_case_profile for t = 1..t_max; passes when the
/// last gap to alpha is below tolerance and the gaps never grow.
CheckReport check_alpha_convergence(const VarietySpec& spec, std::uint64_t ell, int t_max,
                                    double tolerance = 0.05);

struct SpecUniverse {
  int max_classes = 3;
  int max_multiplicity = 2;
  /// Grid-oracle box; 0 skips the grid.
  int grid_bound = 6;
};

/// Every labelled sequence of (kind, multiplicity) classes in the universe.
std::vector<VarietySpec> enumerate_universe(const SpecUniverse& universe);

/// m_invariant == alpha exactly, greedy == exhaustive, grid <= m_invariant
/// with equality when the integral ray fits the grid box.
CheckReport check_alpha_eq_m(const SpecUniverse& universe);

nlohmann::json to_json(const ExponentProfile& profile);
std::string decimal(const Rational& r);

}  // namespace torsion
