#pragma once

/**
 * @file invariants.hpp
 * @brief Exact alpha(A) and m(A) for a product of pairwise non-isogenous
 *        elliptic curves with multiplicities.
 *
 * alpha(A) = max over nonempty subsets I of 2 * sum_{i in I} n_i / dim MT(I),
 * with dim MT(I) = 1 + 3 #(non-CM in I) + #(CM in I).
 *
 * m(A) is the supremum of
 *
 *        sum (c_i + c_{i+n}) u_i + sum (b_i + b_{i+m}) v_i
 *   ---------------------------------------------------------------
 *   c_n + sum c_i + 2 sum c_{i+n} + sum b_{i+m} + b_m - min(c_n, b_m)
 *
 * over the ordered cone c_1 <= ... <= c_n, c_i <= c_{i+n} (non-CM, mult u_i),
 * b_1 <= ... <= b_m, b_i <= b_{i+m} (CM, mult v_i), and over every
 * renumbering of the classes within each kind. The min term is dropped
 * when either kind is absent.
 */

#include "torsion/galois.hpp"

#include <optional>
#include <string>
#include <vector>

namespace torsion {

enum class CurveType { CM, NonCM };

struct CurveClass {
  std::string label;
  CurveType type = CurveType::NonCM;
  int multiplicity = 1;
  /// CM only: whether the torus is split at the working prime. Only the
  /// Galois-facing computations look at this.
  bool split = true;
};

struct VarietySpec {
  std::vector<CurveClass> classes;

  /// Throws on an empty spec, duplicate labels or multiplicity < 1.
  void validate() const;
  const CurveClass& find(const std::string& label) const;
  std::size_t count(CurveType type) const;
};

/// Labels N1.. for non-CM and C1.. for CM classes.
VarietySpec make_variety(const std::vector<int>& noncm_multiplicities,
                         const std::vector<int>& cm_multiplicities);

int mt_dimension(const VarietySpec& spec, const std::vector<std::string>& subset);

struct SubsetWitness {
  std::vector<std::string> subset;
  Rational value;
};

/// Exhaustive for up to 20 classes, greedy accelerator beyond.
SubsetWitness alpha(const VarietySpec& spec);
SubsetWitness alpha_exhaustive(const VarietySpec& spec);
/// Best subset among "top-k non-CM by multiplicity plus top-j CM".
SubsetWitness alpha_greedy(const VarietySpec& spec);

/// Exponents in position order; noncm_labels[i] owns (c[i], c[i+n]),
/// cm_labels[i] owns (b[i], b[i+m]).
struct ExponentProfile {
  std::vector<std::string> noncm_labels;
  std::vector<std::string> cm_labels;
  std::vector<Rational> c;
  std::vector<Rational> b;

  Rational beta() const;
  bool is_ordered() const;
  bool is_zero() const;
  bool is_integral() const;
};

enum class BetaRegime {
  Degenerate,  ///< one kind absent, beta = 0
  FromC,       ///< c_n <= b_m, beta = c_n
  FromB,       ///< b_m <= c_n, beta = b_m
};

std::string_view to_string(BetaRegime regime);

struct RatioWitness {
  Rational value;
  ExponentProfile profile;
  BetaRegime active_case = BetaRegime::Degenerate;
};

struct FunctionalValue {
  Rational numerator;
  Rational denominator;
};

FunctionalValue m_functional(const VarietySpec& spec, const ExponentProfile& profile);

/// Exact LP optimum; the witness ray is normalized to denominator 1.
RatioWitness m_invariant(const VarietySpec& spec);
/// Max over integer profiles in [0, bound]; at most 12 exponents.
RatioWitness m_invariant_grid(const VarietySpec& spec, int bound);

/// Primitive integer multiple of m_invariant's ray, times t.
ExponentProfile worst_case_profile(const VarietySpec& spec, int t);

struct AchievedRatio {
  Rational log_torsion;
  DegreeReport degree;
  /// log|H| / v_l(degree); absent when the degree is prime to l.
  std::optional<Rational> exponent_ratio;
  /// log|H| / (v_l(degree) + log_l(unit part)).
  double ratio = 0.0;
  int level = 0;
};

/// Evaluates an integral profile against the Galois model at level
/// N = max exponent, CM classes mapped to CMSplit / CMNonsplit by `split`.
AchievedRatio achieved_ratio(const VarietySpec& spec, const ExponentProfile& profile, std::uint64_t ell);

}  // namespace torsion
