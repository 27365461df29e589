#include "torsion/galois.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace torsion {

std::string_view to_string(FactorKind kind) {
  switch (kind) {
    case FactorKind::NonCM: return "noncm";
    case FactorKind::CMSplit: return "cmsplit";
    case FactorKind::CMNonsplit: return "cmnonsplit";
  }
  return "?";
}

FactorKind parse_factor_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "noncm") return FactorKind::NonCM;
  if (lower == "cmsplit") return FactorKind::CMSplit;
  if (lower == "cmnonsplit") return FactorKind::CMNonsplit;
  throw InvalidArgument("unknown factor kind '" + std::string(text) + "'");
}

void validate_shape(const SubgroupShape& shape, int level) {
  if (shape.lower < 0 || shape.lower > shape.upper) {
    throw InvalidArgument("shape (" + std::to_string(shape.lower) + "," + std::to_string(shape.upper) +
                          ") must satisfy 0 <= m <= n");
  }
  if (shape.upper > level) {
    throw InvalidArgument("shape (" + std::to_string(shape.lower) + "," + std::to_string(shape.upper) +
                          ") exceeds level " + std::to_string(level));
  }
}

BigInt unit_filtration_size(const Modulus& mod, int k) {
  if (k == 0) return mod.unit_count();
  return big_pow(mod.ell(), static_cast<unsigned long>(mod.level() - k));
}

bool in_unit_filtration(std::uint64_t lambda, const Modulus& mod, int k) {
  if (!mod.is_unit(lambda)) return false;
  return k == 0 || mod.congruent(lambda, 1, k);
}

BigInt MultiplierFibers::count(std::uint64_t lambda, const Modulus& mod) const {
  if (!per_class_counts.empty()) {
    auto it = per_class_counts.find(lambda);
    return it == per_class_counts.end() ? BigInt(0) : it->second;
  }
  if (!in_unit_filtration(lambda, mod, coset_exponent)) return 0;
  return fixer_order / image_size;
}

double DegreeReport::log_ell(std::uint64_t ell) const {
  return ell_valuation + std::log(unit_part.get_d()) / std::log(static_cast<double>(ell));
}

namespace {

BigInt ell_pow(const Modulus& mod, long e) {
  return big_pow(mod.ell(), static_cast<unsigned long>(e));
}

// Largest k with U_k equal to the given filtration step; only differs from
// the input at l = 2, where U_0 = U_1.
int canonical_exponent(const Modulus& mod, int k) {
  return (mod.ell() == 2 && k == 0) ? 1 : k;
}

}  // namespace

BigInt factor_group_order(FactorKind kind, const Modulus& mod) {
  const long N = mod.level();
  const BigInt l(static_cast<unsigned long>(mod.ell()));
  switch (kind) {
    case FactorKind::NonCM:
      return ell_pow(mod, 4 * N - 4) * (l * l - 1) * (l * l - l);
    case FactorKind::CMSplit: {
      const BigInt phi = mod.unit_count();
      return phi * phi;
    }
    case FactorKind::CMNonsplit:
      return ell_pow(mod, 2 * N - 2) * (l * l - 1);
  }
  return 0;
}

BigInt fixer_order(FactorKind kind, const Modulus& mod, const SubgroupShape& shape) {
  validate_shape(shape, mod.level());
  const long N = mod.level();
  const long m = shape.lower;
  const long n = shape.upper;
  switch (kind) {
    case FactorKind::NonCM:
      if (m >= 1) return ell_pow(mod, 4 * N - 2 * m - 2 * n);
      if (n >= 1) return mod.unit_count() * ell_pow(mod, N) * ell_pow(mod, 2 * (N - n));
      return factor_group_order(kind, mod);
    case FactorKind::CMSplit:
      return unit_filtration_size(mod, shape.lower) * unit_filtration_size(mod, shape.upper);
    case FactorKind::CMNonsplit:
      // w*1 = 1 mod l^m and w*T = T mod l^n; T is a unit, so w is in 1 + l^n W.
      if (n >= 1) return ell_pow(mod, 2 * (N - n));
      return factor_group_order(kind, mod);
  }
  return 0;
}

MultiplierFibers fixer_multiplier_fibers(FactorKind kind, const Modulus& mod,
                                         const SubgroupShape& shape) {
  MultiplierFibers out;
  out.fixer_order = fixer_order(kind, mod, shape);
  const int raw = kind == FactorKind::CMNonsplit ? shape.upper : shape.lower;
  out.coset_exponent = canonical_exponent(mod, raw);
  out.image_size = unit_filtration_size(mod, out.coset_exponent);
  out.uniform = true;
  return out;
}

SubgroupShape stabilize_subgroup(FactorKind kind, const SubgroupShape& shape) {
  if (shape.lower < 0 || shape.lower > shape.upper) {
    throw InvalidArgument("stabilize_subgroup: malformed shape");
  }
  switch (kind) {
    case FactorKind::NonCM:
      throw NotApplicable("stabilize_subgroup: the Galois-stable reduction only applies to CM factors");
    case FactorKind::CMSplit:
      return shape;
    case FactorKind::CMNonsplit:
      return {shape.upper, shape.upper};
  }
  return shape;
}

BigInt convolve_fibers(const std::vector<MultiplierFibers>& fibers, const Modulus& mod) {
  if (fibers.empty()) throw InvalidArgument("convolve_fibers: no factors");
  const bool explicit_maps = std::all_of(fibers.begin(), fibers.end(),
                                         [](const MultiplierFibers& f) { return !f.per_class_counts.empty(); });
  if (explicit_maps) {
    BigInt total = 0;
    for (const auto& [lambda, first] : fibers.front().per_class_counts) {
      BigInt term = first;
      for (std::size_t i = 1; i < fibers.size() && term != 0; ++i) term *= fibers[i].count(lambda, mod);
      total += term;
    }
    return total;
  }
  int kmax = 0;
  BigInt per_class = 1;
  for (const auto& f : fibers) {
    if (!f.uniform) throw InvalidArgument("convolve_fibers: non-uniform fibers need explicit counts");
    kmax = std::max(kmax, f.coset_exponent);
    per_class *= f.fixer_order / f.image_size;
  }
  return unit_filtration_size(mod, kmax) * per_class;
}

BigInt product_group_order(const ProductModel& model) {
  if (model.factors.empty()) throw InvalidArgument("product model has no factors");
  std::vector<MultiplierFibers> full;
  for (const auto& f : model.factors) full.push_back(fixer_multiplier_fibers(f.kind, model.modulus, {0, 0}));
  return convolve_fibers(full, model.modulus);
}

std::pair<int, BigInt> split_ell_part(const BigInt& value, std::uint64_t ell) {
  if (value <= 0) throw InvalidArgument("split_ell_part: value must be positive");
  BigInt rest = value;
  const BigInt l(static_cast<unsigned long>(ell));
  int v = 0;
  while (mpz_divisible_p(rest.get_mpz_t(), l.get_mpz_t())) {
    rest /= l;
    ++v;
  }
  return {v, rest};
}

DegreeReport product_degree(const ProductModel& model, const std::vector<SubgroupShape>& shapes) {
  if (model.factors.empty()) throw InvalidArgument("product_degree: empty factor list");
  if (shapes.size() != model.factors.size()) {
    throw InvalidArgument("product_degree: expected " + std::to_string(model.factors.size()) +
                          " shapes, got " + std::to_string(shapes.size()));
  }
  const Modulus& mod = model.modulus;
  DegreeReport report;
  std::vector<MultiplierFibers> fixers;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const FactorKind kind = model.factors[i].kind;
    fixers.push_back(fixer_multiplier_fibers(kind, mod, shapes[i]));
    report.per_factor_degrees.push_back(factor_group_order(kind, mod) / fixers.back().fixer_order);
    report.cyclotomic_exponent = std::max(report.cyclotomic_exponent, fixers.back().coset_exponent);
  }
  report.group_order = product_group_order(model);
  report.fixer_order = convolve_fibers(fixers, mod);
  if (!mpz_divisible_p(report.group_order.get_mpz_t(), report.fixer_order.get_mpz_t())) {
    throw Error("product_degree: fixer order does not divide group order");
  }
  report.degree = report.group_order / report.fixer_order;
  std::tie(report.ell_valuation, report.unit_part) = split_ell_part(report.degree, mod.ell());
  return report;
}

Rational log_torsion_size(const std::vector<SubgroupShape>& shapes, const std::vector<int>& multiplicities) {
  if (shapes.size() != multiplicities.size()) {
    throw InvalidArgument("log_torsion_size: shapes and multiplicities are misaligned");
  }
  BigInt total = 0;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (multiplicities[i] < 1) throw InvalidArgument("log_torsion_size: multiplicity must be >= 1");
    total += BigInt(shapes[i].lower + shapes[i].upper) * multiplicities[i];
  }
  return Rational(total);
}

}  // namespace torsion
