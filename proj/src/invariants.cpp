#include "torsion/invariants.hpp"

#include "torsion/lp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

namespace torsion {

void VarietySpec::validate() const {
  if (classes.empty()) throw InvalidArgument("variety spec has no classes");
  std::set<std::string> seen;
  for (const auto& c : classes) {
    if (c.multiplicity < 1) throw InvalidArgument("class '" + c.label + "' has multiplicity < 1");
    if (!seen.insert(c.label).second) throw InvalidArgument("duplicate class label '" + c.label + "'");
  }
}

const CurveClass& VarietySpec::find(const std::string& label) const {
  for (const auto& c : classes) {
    if (c.label == label) return c;
  }
  throw InvalidArgument("unknown class label '" + label + "'");
}

std::size_t VarietySpec::count(CurveType type) const {
  return static_cast<std::size_t>(
      std::count_if(classes.begin(), classes.end(), [&](const CurveClass& c) { return c.type == type; }));
}

VarietySpec make_variety(const std::vector<int>& noncm_multiplicities, const std::vector<int>& cm_multiplicities) {
  VarietySpec spec;
  for (std::size_t i = 0; i < noncm_multiplicities.size(); ++i) {
    spec.classes.push_back({"N" + std::to_string(i + 1), CurveType::NonCM, noncm_multiplicities[i], true});
  }
  for (std::size_t i = 0; i < cm_multiplicities.size(); ++i) {
    spec.classes.push_back({"C" + std::to_string(i + 1), CurveType::CM, cm_multiplicities[i], true});
  }
  return spec;
}

int mt_dimension(const VarietySpec& spec, const std::vector<std::string>& subset) {
  if (subset.empty()) throw InvalidArgument("mt_dimension: empty subset");
  std::set<std::string> unique(subset.begin(), subset.end());
  int dim = 1;
  for (const auto& label : unique) dim += spec.find(label).type == CurveType::NonCM ? 3 : 1;
  return dim;
}

// ---------------------------------------------------------------------------
// alpha

namespace {

Rational subset_value(long weight, long noncm, long cm) {
  return make_rational(2 * weight, 1 + 3 * noncm + cm);
}

}  // namespace

SubsetWitness alpha_exhaustive(const VarietySpec& spec) {
  spec.validate();
  const std::size_t k = spec.classes.size();
  if (k > 20) throw InvalidArgument("alpha_exhaustive: more than 20 classes");
  SubsetWitness best;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << k); ++mask) {
    long weight = 0, noncm = 0, cm = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (!(mask >> i & 1U)) continue;
      weight += spec.classes[i].multiplicity;
      (spec.classes[i].type == CurveType::NonCM ? noncm : cm) += 1;
    }
    const Rational v = subset_value(weight, noncm, cm);
    if (best_mask == 0 || v > best.value ||
        (v == best.value && std::popcount(mask) < std::popcount(best_mask))) {
      best.value = v;
      best_mask = mask;
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (best_mask >> i & 1U) best.subset.push_back(spec.classes[i].label);
  }
  return best;
}

SubsetWitness alpha_greedy(const VarietySpec& spec) {
  spec.validate();
  std::vector<std::size_t> noncm, cm;
  for (std::size_t i = 0; i < spec.classes.size(); ++i) {
    (spec.classes[i].type == CurveType::NonCM ? noncm : cm).push_back(i);
  }
  auto by_mult = [&](std::size_t x, std::size_t y) {
    return spec.classes[x].multiplicity > spec.classes[y].multiplicity;
  };
  std::stable_sort(noncm.begin(), noncm.end(), by_mult);
  std::stable_sort(cm.begin(), cm.end(), by_mult);

  SubsetWitness best;
  std::size_t best_k = 0, best_j = 0;
  bool have = false;
  long noncm_weight = 0;
  for (std::size_t k = 0; k <= noncm.size(); ++k) {
    if (k > 0) noncm_weight += spec.classes[noncm[k - 1]].multiplicity;
    long cm_weight = 0;
    for (std::size_t j = 0; j <= cm.size(); ++j) {
      if (j > 0) cm_weight += spec.classes[cm[j - 1]].multiplicity;
      if (k == 0 && j == 0) continue;
      const Rational v = subset_value(noncm_weight + cm_weight, static_cast<long>(k), static_cast<long>(j));
      if (!have || v > best.value || (v == best.value && k + j < best_k + best_j)) {
        best.value = v;
        best_k = k;
        best_j = j;
        have = true;
      }
    }
  }
  std::vector<std::size_t> chosen(noncm.begin(), noncm.begin() + static_cast<std::ptrdiff_t>(best_k));
  chosen.insert(chosen.end(), cm.begin(), cm.begin() + static_cast<std::ptrdiff_t>(best_j));
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t i : chosen) best.subset.push_back(spec.classes[i].label);
  return best;
}

SubsetWitness alpha(const VarietySpec& spec) {
  return spec.classes.size() <= 20 ? alpha_exhaustive(spec) : alpha_greedy(spec);
}

// ---------------------------------------------------------------------------
// Exponent profiles

Rational ExponentProfile::beta() const {
  if (c.empty() || b.empty()) return 0;
  const Rational& cn = c[c.size() / 2 - 1];
  const Rational& bm = b[b.size() / 2 - 1];
  return cn < bm ? cn : bm;
}

namespace {

bool ordered_block(const std::vector<Rational>& x) {
  const std::size_t n = x.size() / 2;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] < 0 || x[i] > x[i + n]) return false;
    if (i + 1 < n && x[i] > x[i + 1]) return false;
  }
  return true;
}

}  // namespace

bool ExponentProfile::is_ordered() const { return ordered_block(c) && ordered_block(b); }

bool ExponentProfile::is_zero() const {
  auto zero = [](const Rational& v) { return v == 0; };
  return std::all_of(c.begin(), c.end(), zero) && std::all_of(b.begin(), b.end(), zero);
}

bool ExponentProfile::is_integral() const {
  auto integral = [](const Rational& v) { return v.get_den() == 1; };
  return std::all_of(c.begin(), c.end(), integral) && std::all_of(b.begin(), b.end(), integral);
}

std::string_view to_string(BetaRegime regime) {
  switch (regime) {
    case BetaRegime::Degenerate: return "degenerate";
    case BetaRegime::FromC: return "beta=c_n";
    case BetaRegime::FromB: return "beta=b_m";
  }
  return "?";
}

FunctionalValue m_functional(const VarietySpec& spec, const ExponentProfile& profile) {
  const std::size_t n = profile.noncm_labels.size();
  const std::size_t m = profile.cm_labels.size();
  if (profile.c.size() != 2 * n || profile.b.size() != 2 * m) {
    throw InvalidArgument("m_functional: profile size does not match its labels");
  }
  FunctionalValue out{0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const int u = spec.find(profile.noncm_labels[i]).multiplicity;
    out.numerator += (profile.c[i] + profile.c[i + n]) * u;
    out.denominator += profile.c[i] + 2 * profile.c[i + n];
  }
  for (std::size_t i = 0; i < m; ++i) {
    const int v = spec.find(profile.cm_labels[i]).multiplicity;
    out.numerator += (profile.b[i] + profile.b[i + m]) * v;
    out.denominator += profile.b[i + m];
  }
  if (n > 0) out.denominator += profile.c[n - 1];
  if (m > 0) out.denominator += profile.b[m - 1];
  out.denominator -= profile.beta();
  return out;
}

// ---------------------------------------------------------------------------
// m(A) by exact linear programming

namespace {

struct Arrangement {
  std::vector<int> u;
  std::vector<int> v;
};

std::vector<std::vector<int>> distinct_permutations(std::vector<int> values) {
  std::sort(values.begin(), values.end());
  std::vector<std::vector<int>> out;
  do {
    out.push_back(values);
  } while (std::next_permutation(values.begin(), values.end()));
  return out;
}

// Assigns spec labels to positions carrying the given multiplicities.
std::vector<std::string> labels_for(const VarietySpec& spec, CurveType type, const std::vector<int>& mults) {
  std::vector<bool> used(spec.classes.size(), false);
  std::vector<std::string> out;
  for (int mult : mults) {
    for (std::size_t i = 0; i < spec.classes.size(); ++i) {
      const auto& c = spec.classes[i];
      if (!used[i] && c.type == type && c.multiplicity == mult) {
        used[i] = true;
        out.push_back(c.label);
        break;
      }
    }
  }
  return out;
}

// Charnes-Cooper normalized program in one beta regime: D(x) = 1 on the cone.
lp::Problem regime_program(const Arrangement& arr, BetaRegime regime) {
  const std::size_t n = arr.u.size();
  const std::size_t m = arr.v.size();
  const std::size_t dim = 2 * n + 2 * m;
  const std::size_t b0 = 2 * n;
  lp::Problem p;
  p.num_vars = dim;
  p.objective.assign(dim, 0);
  std::vector<Rational> denom(dim, 0);
  for (std::size_t i = 0; i < n; ++i) {
    p.objective[i] = arr.u[i];
    p.objective[n + i] = arr.u[i];
    denom[i] = 1;
    denom[n + i] = 2;
  }
  for (std::size_t i = 0; i < m; ++i) {
    p.objective[b0 + i] = arr.v[i];
    p.objective[b0 + m + i] = arr.v[i];
    denom[b0 + m + i] = 1;
  }
  if (n > 0) denom[n - 1] += 1;
  if (m > 0) denom[b0 + m - 1] += 1;
  if (regime == BetaRegime::FromC) denom[n - 1] -= 1;
  if (regime == BetaRegime::FromB) denom[b0 + m - 1] -= 1;

  auto diff = [&](std::size_t lo, std::size_t hi) {
    std::vector<Rational> row(dim, 0);
    row[lo] = 1;
    row[hi] = -1;
    p.add(std::move(row), lp::Sense::LessEq, 0);
  };
  for (std::size_t i = 0; i < n; ++i) {
    diff(i, n + i);
    if (i + 1 < n) diff(i, i + 1);
  }
  for (std::size_t i = 0; i < m; ++i) {
    diff(b0 + i, b0 + m + i);
    if (i + 1 < m) diff(b0 + i, b0 + i + 1);
  }
  if (regime == BetaRegime::FromC) diff(n - 1, b0 + m - 1);
  if (regime == BetaRegime::FromB) diff(b0 + m - 1, n - 1);
  p.add(std::move(denom), lp::Sense::Equal, 1);
  return p;
}

// Among optimal points, prefer large lower exponents (balanced rays).
lp::Solution balanced_optimum(const Arrangement& arr, BetaRegime regime, const Rational& value) {
  lp::Problem p = regime_program(arr, regime);
  std::vector<Rational> lower(p.num_vars, 0);
  const std::size_t n = arr.u.size();
  const std::size_t m = arr.v.size();
  for (std::size_t i = 0; i < n; ++i) lower[i] = 1;
  for (std::size_t i = 0; i < m; ++i) lower[2 * n + i] = 1;
  p.add(p.objective, lp::Sense::Equal, value);
  p.objective = lower;
  return lp::maximize(p);
}

}  // namespace

RatioWitness m_invariant(const VarietySpec& spec) {
  spec.validate();
  std::vector<int> u, v;
  for (const auto& c : spec.classes) (c.type == CurveType::NonCM ? u : v).push_back(c.multiplicity);
  std::vector<BetaRegime> regimes;
  if (u.empty() || v.empty()) regimes = {BetaRegime::Degenerate};
  else regimes = {BetaRegime::FromC, BetaRegime::FromB};

  const auto u_perms = u.empty() ? std::vector<std::vector<int>>{{}} : distinct_permutations(u);
  const auto v_perms = v.empty() ? std::vector<std::vector<int>>{{}} : distinct_permutations(v);

  bool have = false;
  Rational best;
  Arrangement best_arr;
  BetaRegime best_regime = regimes.front();
  for (const auto& up : u_perms) {
    for (const auto& vp : v_perms) {
      const Arrangement arr{up, vp};
      for (BetaRegime regime : regimes) {
        const lp::Solution sol = lp::maximize(regime_program(arr, regime));
        if (sol.status == lp::Status::Unbounded) throw Error("m_invariant: unbounded program");
        if (sol.status != lp::Status::Optimal) continue;
        if (!have || sol.value > best) {
          have = true;
          best = sol.value;
          best_arr = arr;
          best_regime = regime;
        }
      }
    }
  }
  if (!have) throw Error("m_invariant: no feasible profile");

  const lp::Solution ray = balanced_optimum(best_arr, best_regime, best);
  const std::size_t n = best_arr.u.size();
  const std::size_t m = best_arr.v.size();
  RatioWitness out;
  out.value = best;
  out.active_case = best_regime;
  out.profile.noncm_labels = labels_for(spec, CurveType::NonCM, best_arr.u);
  out.profile.cm_labels = labels_for(spec, CurveType::CM, best_arr.v);
  out.profile.c.assign(ray.x.begin(), ray.x.begin() + static_cast<std::ptrdiff_t>(2 * n));
  out.profile.b.assign(ray.x.begin() + static_cast<std::ptrdiff_t>(2 * n),
                       ray.x.begin() + static_cast<std::ptrdiff_t>(2 * n + 2 * m));
  return out;
}

// ---------------------------------------------------------------------------
// Grid oracle: per-class exponent pairs without ordering, sorted at the end.

RatioWitness m_invariant_grid(const VarietySpec& spec, int bound) {
  spec.validate();
  if (bound < 1) throw InvalidArgument("m_invariant_grid: bound must be >= 1");
  const std::size_t k = spec.classes.size();
  if (2 * k > 12) throw InvalidArgument("m_invariant_grid: more than 12 exponents");
  const bool mixed = spec.count(CurveType::NonCM) > 0 && spec.count(CurveType::CM) > 0;

  struct State {
    std::int64_t num = 0;
    std::int64_t den = 0;  // without the max/beta terms
    std::int64_t cmax = 0;
    std::int64_t bmax = 0;
  };
  std::vector<std::pair<int, int>> current(k), best_assign(k);
  std::int64_t best_num = -1, best_den = 1;

  std::function<void(std::size_t, const State&)> walk = [&](std::size_t i, const State& s) {
    if (i == k) {
      std::int64_t den = s.den + s.cmax + s.bmax - (mixed ? std::min(s.cmax, s.bmax) : 0);
      if (den == 0) return;
      if (best_num < 0 || s.num * best_den > best_num * den) {
        best_num = s.num;
        best_den = den;
        best_assign = current;
      }
      return;
    }
    const auto& cls = spec.classes[i];
    for (int lo = 0; lo <= bound; ++lo) {
      for (int hi = lo; hi <= bound; ++hi) {
        State t = s;
        t.num += static_cast<std::int64_t>(lo + hi) * cls.multiplicity;
        if (cls.type == CurveType::NonCM) {
          t.den += lo + 2 * hi;
          t.cmax = std::max<std::int64_t>(t.cmax, lo);
        } else {
          t.den += hi;
          t.bmax = std::max<std::int64_t>(t.bmax, lo);
        }
        current[i] = {lo, hi};
        walk(i + 1, t);
      }
    }
  };
  walk(0, State{});

  std::vector<std::size_t> noncm, cm;
  for (std::size_t i = 0; i < k; ++i) (spec.classes[i].type == CurveType::NonCM ? noncm : cm).push_back(i);
  auto by_lower = [&](std::size_t x, std::size_t y) { return best_assign[x].first < best_assign[y].first; };
  std::stable_sort(noncm.begin(), noncm.end(), by_lower);
  std::stable_sort(cm.begin(), cm.end(), by_lower);

  RatioWitness out;
  out.value = make_rational(best_num, best_den);
  auto fill = [&](const std::vector<std::size_t>& idx, std::vector<std::string>& labels, std::vector<Rational>& x) {
    x.assign(2 * idx.size(), 0);
    for (std::size_t p = 0; p < idx.size(); ++p) {
      labels.push_back(spec.classes[idx[p]].label);
      x[p] = best_assign[idx[p]].first;
      x[p + idx.size()] = best_assign[idx[p]].second;
    }
  };
  fill(noncm, out.profile.noncm_labels, out.profile.c);
  fill(cm, out.profile.cm_labels, out.profile.b);
  if (!mixed) {
    out.active_case = BetaRegime::Degenerate;
  } else {
    out.active_case = out.profile.c[noncm.size() - 1] <= out.profile.b[cm.size() - 1] ? BetaRegime::FromC
                                                                                     : BetaRegime::FromB;
  }
  return out;
}

ExponentProfile worst_case_profile(const VarietySpec& spec, int t) {
  if (t < 1) throw InvalidArgument("worst_case_profile: scale must be >= 1");
  ExponentProfile ray = m_invariant(spec).profile;
  BigInt lcm = 1;
  auto visit_den = [&](const std::vector<Rational>& xs) {
    for (const auto& x : xs) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.get_den_mpz_t());
  };
  visit_den(ray.c);
  visit_den(ray.b);
  BigInt g = 0;
  auto visit_num = [&](const std::vector<Rational>& xs) {
    for (const auto& x : xs) {
      const BigInt v = BigInt(x * lcm);
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    }
  };
  visit_num(ray.c);
  visit_num(ray.b);
  if (g == 0) throw Error("worst_case_profile: zero ray");
  auto scale = [&](std::vector<Rational>& xs) {
    for (auto& x : xs) x = Rational(BigInt(x * lcm) / g * t);
  };
  scale(ray.c);
  scale(ray.b);
  return ray;
}

AchievedRatio achieved_ratio(const VarietySpec& spec, const ExponentProfile& profile, std::uint64_t ell) {
  if (!profile.is_integral()) throw InvalidArgument("achieved_ratio: profile must be integral");
  if (!profile.is_ordered()) throw InvalidArgument("achieved_ratio: profile violates the ordering constraints");
  if (profile.is_zero()) throw InvalidArgument("achieved_ratio: zero profile");
  const std::size_t n = profile.noncm_labels.size();
  const std::size_t m = profile.cm_labels.size();
  if (profile.c.size() != 2 * n || profile.b.size() != 2 * m) {
    throw InvalidArgument("achieved_ratio: profile size does not match its labels");
  }

  int level = 0;
  for (const auto& x : profile.c) level = std::max(level, static_cast<int>(x.get_num().get_si()));
  for (const auto& x : profile.b) level = std::max(level, static_cast<int>(x.get_num().get_si()));

  ProductModel model{{}, Modulus(ell, level)};
  std::vector<SubgroupShape> shapes;
  std::vector<int> mults;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cls = spec.find(profile.noncm_labels[i]);
    model.factors.push_back({FactorKind::NonCM, cls.multiplicity, cls.label});
    shapes.push_back({static_cast<int>(profile.c[i].get_num().get_si()),
                      static_cast<int>(profile.c[i + n].get_num().get_si())});
    mults.push_back(cls.multiplicity);
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto& cls = spec.find(profile.cm_labels[i]);
    model.factors.push_back({cls.split ? FactorKind::CMSplit : FactorKind::CMNonsplit, cls.multiplicity, cls.label});
    shapes.push_back({static_cast<int>(profile.b[i].get_num().get_si()),
                      static_cast<int>(profile.b[i + m].get_num().get_si())});
    mults.push_back(cls.multiplicity);
  }

  AchievedRatio out;
  out.level = level;
  out.log_torsion = log_torsion_size(shapes, mults);
  out.degree = product_degree(model, shapes);
  if (out.degree.ell_valuation > 0) out.exponent_ratio = out.log_torsion / out.degree.ell_valuation;
  const double log_deg = out.degree.log_ell(ell);
  out.ratio = log_deg > 0 ? out.log_torsion.get_d() / log_deg : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace torsion
