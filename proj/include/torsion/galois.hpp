#pragma once

/**
 * @file galois.hpp
 * @brief Idealized mod-l^N Galois image of a product of elliptic curves.
 *
 * Each isogeny class contributes a factor group inside GL_2(Z/l^N):
 *
 *   NonCM       the full GL_2
 *   CMSplit     the diagonal torus {diag(a, d)}
 *   CMNonsplit  the units of the unramified quadratic ring acting on {1, T}
 *
 * The product image is the fiber product over equal multipliers, where the
 * multiplier is the determinant in every case (det of a diagonal matrix is
 * a*d, det of the regular representation is the norm). A subgroup of shape
 * (m, n) is generated by l^(N-m) e1 and l^(N-n) e2 in the factor's basis;
 * its pointwise fixer G_{m,n} models Gal(K(A[l^N]) / K(H)).
 *
 * Everything in this header is closed-form ("formula path") and works at
 * any level; enumerate.hpp holds the brute-force oracles.
 */

#include "torsion/modular.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace torsion {

enum class FactorKind { NonCM, CMSplit, CMNonsplit };

std::string_view to_string(FactorKind kind);
/// Accepts "noncm", "cmsplit", "cmnonsplit" (case-insensitive).
FactorKind parse_factor_kind(std::string_view text);

struct FactorModel {
  FactorKind kind = FactorKind::NonCM;
  int multiplicity = 1;
  std::string label;
};

/// H = Z/l^lower x Z/l^upper in the factor's distinguished basis.
struct SubgroupShape {
  int lower = 0;
  int upper = 0;

  bool operator==(const SubgroupShape&) const = default;
};

/// Throws unless 0 <= lower <= upper <= level.
void validate_shape(const SubgroupShape& shape, int level);

struct ProductModel {
  std::vector<FactorModel> factors;
  Modulus modulus;
};

/// Distribution of the multiplier over a fixer subgroup. The image is
/// U_k = 1 + l^k Z/l^N (U_0 = all units), and counts are per element of it.
struct MultiplierFibers {
  int coset_exponent = 0;
  BigInt fixer_order;
  BigInt image_size;
  bool uniform = true;
  /// Explicit per-class counts; filled only by enumeration.
  std::map<std::uint64_t, BigInt> per_class_counts;

  /// Count of fixer elements with multiplier lambda.
  BigInt count(std::uint64_t lambda, const Modulus& mod) const;
};

struct DegreeReport {
  BigInt degree;
  std::vector<BigInt> per_factor_degrees;
  int cyclotomic_exponent = 0;
  /// degree = l^ell_valuation * unit_part with l not dividing unit_part.
  int ell_valuation = 0;
  BigInt unit_part;
  BigInt group_order;
  BigInt fixer_order;

  Rational log_ell_degree() const { return Rational(ell_valuation); }
  /// ell_valuation + log_l(unit_part), floating point; for reporting only.
  double log_ell(std::uint64_t ell) const;
};

/// |U_k| inside (Z/l^N)^x.
BigInt unit_filtration_size(const Modulus& mod, int k);
/// Whether lambda lies in U_k.
bool in_unit_filtration(std::uint64_t lambda, const Modulus& mod, int k);

BigInt factor_group_order(FactorKind kind, const Modulus& mod);
BigInt fixer_order(FactorKind kind, const Modulus& mod, const SubgroupShape& shape);
MultiplierFibers fixer_multiplier_fibers(FactorKind kind, const Modulus& mod,
                                         const SubgroupShape& shape);

/// Raised by stabilize_subgroup for non-CM factors.
class NotApplicable : public Error {
 public:
  using Error::Error;
};

/// Smallest Galois-stable standard shape containing `shape`: unchanged for
/// CMSplit, (n, n) for CMNonsplit.
SubgroupShape stabilize_subgroup(FactorKind kind, const SubgroupShape& shape);

/// Sum over lambda of the product of per-factor fiber counts. Uses the
/// explicit maps when every factor carries one, the coset structure otherwise.
BigInt convolve_fibers(const std::vector<MultiplierFibers>& fibers, const Modulus& mod);

BigInt product_group_order(const ProductModel& model);
DegreeReport product_degree(const ProductModel& model, const std::vector<SubgroupShape>& shapes);

/// Sum of (m_i + n_i) * mult_i.
Rational log_torsion_size(const std::vector<SubgroupShape>& shapes,
                          const std::vector<int>& multiplicities);

/// ell-valuation of a positive integer, and the cofactor.
std::pair<int, BigInt> split_ell_part(const BigInt& value, std::uint64_t ell);

}  // namespace torsion
