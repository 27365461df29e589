#include "torsion/enumerate.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace torsion {

namespace {

void require_budget(const BigInt& size, std::uint64_t budget, const std::string& what) {
  if (size > BigInt(static_cast<unsigned long>(budget))) {
    throw Infeasible(what + " has " + size.get_str() + " elements, above the enumeration budget of " +
                     std::to_string(budget));
  }
}

}  // namespace

std::vector<Mat2> enumerate_factor_group(FactorKind kind, const Modulus& mod, std::uint64_t budget) {
  require_budget(factor_group_order(kind, mod), budget, "factor group " + std::string(to_string(kind)));
  const std::uint64_t q = mod.value();
  std::vector<Mat2> out;
  switch (kind) {
    case FactorKind::NonCM:
      for (std::uint64_t a = 0; a < q; ++a)
        for (std::uint64_t b = 0; b < q; ++b)
          for (std::uint64_t c = 0; c < q; ++c)
            for (std::uint64_t d = 0; d < q; ++d) {
              const Mat2 g{a, b, c, d};
              if (mat2_det_invertible(g, mod).invertible) out.push_back(g);
            }
      break;
    case FactorKind::CMSplit:
      for (std::uint64_t a = 0; a < q; ++a) {
        if (!mod.is_unit(a)) continue;
        for (std::uint64_t d = 0; d < q; ++d) {
          if (mod.is_unit(d)) out.push_back({a, 0, 0, d});
        }
      }
      break;
    case FactorKind::CMNonsplit: {
      const QuadRing ring = build_quad_ring(mod);
      for (std::uint64_t x0 = 0; x0 < q; ++x0)
        for (std::uint64_t x1 = 0; x1 < q; ++x1) {
          const QuadElem w{x0, x1};
          if (ring.is_unit(w)) out.push_back(quad_unit_to_mat(w, ring));
        }
      break;
    }
  }
  return out;
}

std::vector<Vec2> standard_generators(const Modulus& mod, const SubgroupShape& shape) {
  validate_shape(shape, mod.level());
  const std::uint64_t q = mod.value();
  return {Vec2{mod.power(mod.level() - shape.lower) % q, 0},
          Vec2{0, mod.power(mod.level() - shape.upper) % q}};
}

bool fixes_all(const Mat2& g, std::span<const Vec2> points, const Modulus& mod) {
  return std::all_of(points.begin(), points.end(),
                     [&](const Vec2& p) { return mat2_apply(g, p, mod) == p; });
}

int filtration_exponent(const std::vector<std::uint64_t>& image, const Modulus& mod) {
  std::vector<std::uint64_t> sorted = image;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const std::uint64_t q = mod.value();
  for (int k = mod.level(); k >= 0; --k) {
    std::vector<std::uint64_t> step;
    for (std::uint64_t x = 0; x < q; ++x) {
      if (in_unit_filtration(x, mod, k)) step.push_back(x);
    }
    if (step == sorted) return k;
  }
  return -1;
}

MultiplierFibers enumerate_fixer_fibers(FactorKind kind, const Modulus& mod, const SubgroupShape& shape,
                                        std::uint64_t budget) {
  const std::vector<Vec2> gens = standard_generators(mod, shape);
  const std::uint64_t q = mod.value();
  std::vector<std::uint64_t> counts(q, 0);
  std::uint64_t total = 0;
  auto visit = [&](const Mat2& g) {
    if (!fixes_all(g, gens, mod)) return;
    ++counts[mat2_det_invertible(g, mod).det];
    ++total;
  };

  if (factor_group_order(kind, mod) <= BigInt(static_cast<unsigned long>(budget))) {
    for (const Mat2& g : enumerate_factor_group(kind, mod, budget)) visit(g);
  } else {
    // Candidates with first column e1 + l^m * (anything); the action test
    // above still checks both generators.
    const std::uint64_t step = mod.power(shape.lower);
    const std::uint64_t span = q / step;
    BigInt candidates = BigInt(static_cast<unsigned long>(span)) * span;
    if (kind == FactorKind::NonCM) candidates *= BigInt(static_cast<unsigned long>(q)) * q;
    if (kind == FactorKind::CMSplit) candidates = BigInt(static_cast<unsigned long>(span)) * q;
    require_budget(candidates, budget, "fixer candidate set");
    switch (kind) {
      case FactorKind::NonCM:
        for (std::uint64_t i = 0; i < span; ++i)
          for (std::uint64_t j = 0; j < span; ++j) {
            const std::uint64_t a = mod.add(1 % q, mod.mul(step, i));
            const std::uint64_t c = mod.mul(step, j);
            for (std::uint64_t b = 0; b < q; ++b)
              for (std::uint64_t d = 0; d < q; ++d) {
                const Mat2 g{a, b, c, d};
                if (mat2_det_invertible(g, mod).invertible) visit(g);
              }
          }
        break;
      case FactorKind::CMSplit:
        for (std::uint64_t i = 0; i < span; ++i) {
          const std::uint64_t a = mod.add(1 % q, mod.mul(step, i));
          if (!mod.is_unit(a)) continue;
          for (std::uint64_t d = 0; d < q; ++d) {
            if (mod.is_unit(d)) visit({a, 0, 0, d});
          }
        }
        break;
      case FactorKind::CMNonsplit: {
        const QuadRing ring = build_quad_ring(mod);
        for (std::uint64_t i = 0; i < span; ++i)
          for (std::uint64_t j = 0; j < span; ++j) {
            const QuadElem w{mod.add(1 % q, mod.mul(step, i)), mod.mul(step, j)};
            if (ring.is_unit(w)) visit(quad_unit_to_mat(w, ring));
          }
        break;
      }
    }
  }

  MultiplierFibers out;
  out.fixer_order = BigInt(static_cast<unsigned long>(total));
  std::vector<std::uint64_t> image;
  std::uint64_t first = 0;
  out.uniform = true;
  for (std::uint64_t lambda = 0; lambda < q; ++lambda) {
    if (counts[lambda] == 0) continue;
    if (image.empty()) first = counts[lambda];
    if (counts[lambda] != first) out.uniform = false;
    image.push_back(lambda);
    out.per_class_counts[lambda] = BigInt(static_cast<unsigned long>(counts[lambda]));
  }
  out.image_size = BigInt(static_cast<unsigned long>(image.size()));
  out.coset_exponent = filtration_exponent(image, mod);
  return out;
}

OracleDegree enumerate_degree_oracle(const ProductModel& model,
                                     const std::vector<std::vector<Vec2>>& generators,
                                     std::uint64_t budget) {
  if (model.factors.empty()) throw InvalidArgument("enumerate_degree_oracle: empty factor list");
  if (generators.size() != model.factors.size()) {
    throw InvalidArgument("enumerate_degree_oracle: one generator list per factor is required");
  }
  const Modulus& mod = model.modulus;
  const std::size_t r = model.factors.size();

  // Per factor: multiplier -> fix flags of the group elements with that multiplier.
  std::vector<std::map<std::uint64_t, std::vector<char>>> buckets(r);
  for (std::size_t i = 0; i < r; ++i) {
    for (const Mat2& g : enumerate_factor_group(model.factors[i].kind, mod, budget)) {
      buckets[i][mat2_det_invertible(g, mod).det].push_back(fixes_all(g, generators[i], mod) ? 1 : 0);
    }
  }

  BigInt glued = 0;
  for (const auto& [lambda, flags] : buckets[0]) {
    BigInt term(static_cast<unsigned long>(flags.size()));
    for (std::size_t i = 1; i < r; ++i) {
      auto it = buckets[i].find(lambda);
      term *= it == buckets[i].end() ? 0UL : static_cast<unsigned long>(it->second.size());
    }
    glued += term;
  }
  require_budget(glued, budget, "glued group");

  std::uint64_t visited = 0;
  std::uint64_t fixing = 0;
  std::vector<const std::vector<char>*> row(r);
  std::function<void(std::size_t, bool)> walk = [&](std::size_t i, bool all_fix) {
    if (i == r) {
      ++visited;
      if (all_fix) ++fixing;
      return;
    }
    for (char f : *row[i]) walk(i + 1, all_fix && f != 0);
  };
  for (const auto& [lambda, flags] : buckets[0]) {
    bool present = true;
    row[0] = &flags;
    for (std::size_t i = 1; i < r; ++i) {
      auto it = buckets[i].find(lambda);
      if (it == buckets[i].end()) {
        present = false;
        break;
      }
      row[i] = &it->second;
    }
    if (present) walk(0, true);
  }

  OracleDegree out;
  out.group_order = BigInt(static_cast<unsigned long>(visited));
  out.fixer_order = BigInt(static_cast<unsigned long>(fixing));
  out.degree = out.group_order / out.fixer_order;
  return out;
}

}  // namespace torsion
