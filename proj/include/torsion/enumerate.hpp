#pragma once

// Brute-force oracles for the Galois model. Nothing here uses the closed-form
// orders of galois.hpp except to refuse work above the enumeration budget.

#include "torsion/galois.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace torsion {

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

/// All elements of the factor group as matrices over Z/l^N.
std::vector<Mat2> enumerate_factor_group(FactorKind kind, const Modulus& mod,
                                         std::uint64_t budget = kDefaultBudget);

/// l^(N-m) e1 and l^(N-n) e2.
std::vector<Vec2> standard_generators(const Modulus& mod, const SubgroupShape& shape);

bool fixes_all(const Mat2& g, std::span<const Vec2> points, const Modulus& mod);

/// Largest k with image == U_k, or -1 when the set is not a filtration step.
int filtration_exponent(const std::vector<std::uint64_t>& image, const Modulus& mod);

/// Fixer of the standard shape-(m,n) subgroup, with explicit per-class
/// multiplier counts. Enumerates the whole factor group when it fits the
/// budget, otherwise the candidates with g e1 = e1 mod l^m.
MultiplierFibers enumerate_fixer_fibers(FactorKind kind, const Modulus& mod, const SubgroupShape& shape,
                                        std::uint64_t budget = kDefaultBudget);

struct OracleDegree {
  BigInt group_order;
  BigInt fixer_order;
  BigInt degree;
};

/// Exhaustively walks the glued group {(g_i) : det g_i all equal} and counts
/// tuples fixing every generator of every factor. Generators may be arbitrary
/// points of (Z/l^N)^2; an empty list imposes nothing.
OracleDegree enumerate_degree_oracle(const ProductModel& model,
                                     const std::vector<std::vector<Vec2>>& generators,
                                     std::uint64_t budget = kDefaultBudget);

}  // namespace torsion
