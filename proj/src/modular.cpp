#include "torsion/modular.hpp"

#include <limits>

namespace torsion {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw InvalidArgument("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(); }
std::string to_string(const BigInt& n) { return n.get_str(); }

BigInt big_pow(std::uint64_t base, unsigned long exponent) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, exponent);
  return out;
}

Modulus::Modulus(std::uint64_t ell, int level) : ell_(ell), level_(level) {
  if (!is_prime(ell)) throw InvalidArgument("modulus base " + std::to_string(ell) + " is not prime");
  if (level < 1) throw InvalidArgument("modulus level must be >= 1");
  constexpr std::uint64_t limit = std::uint64_t{1} << 62;
  std::uint64_t v = 1;
  for (int i = 0; i < level; ++i) {
    if (v > limit / ell) {
      v = 0;
      break;
    }
    v *= ell;
  }
  value_ = v;
}

std::uint64_t Modulus::value() const {
  if (value_ == 0) {
    throw InvalidArgument(std::to_string(ell_) + "^" + std::to_string(level_) +
                          " is too large for residue arithmetic");
  }
  return value_;
}

std::uint64_t Modulus::power(int k) const {
  if (k < 0 || k > level_) throw InvalidArgument("exponent outside [0, level]");
  std::uint64_t v = 1;
  for (int i = 0; i < k; ++i) v *= ell_;
  return v;
}

BigInt Modulus::unit_count() const {
  return big_pow(ell_, static_cast<unsigned long>(level_ - 1)) * BigInt(static_cast<unsigned long>(ell_ - 1));
}

std::uint64_t Modulus::reduce(std::int64_t x) const {
  const auto m = static_cast<std::int64_t>(value());
  std::int64_t r = x % m;
  if (r < 0) r += m;
  return static_cast<std::uint64_t>(r);
}

std::uint64_t Modulus::add(std::uint64_t x, std::uint64_t y) const {
  const std::uint64_t m = value();
  std::uint64_t s = x + y;
  return s >= m ? s - m : s;
}

std::uint64_t Modulus::sub(std::uint64_t x, std::uint64_t y) const {
  const std::uint64_t m = value();
  return x >= y ? x - y : x + m - y;
}

std::uint64_t Modulus::mul(std::uint64_t x, std::uint64_t y) const {
  const unsigned __int128 p = static_cast<unsigned __int128>(x) * y;
  return static_cast<std::uint64_t>(p % value());
}

int Modulus::valuation(std::uint64_t x) const {
  x %= value();
  if (x == 0) return level_;
  int v = 0;
  while (x % ell_ == 0) {
    x /= ell_;
    ++v;
  }
  return v;
}

bool Modulus::congruent(std::uint64_t x, std::uint64_t y, int k) const {
  const std::uint64_t p = power(k);
  return x % p == y % p;
}

Mat2 make_mat2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, const Modulus& mod) {
  return {mod.reduce(a), mod.reduce(b), mod.reduce(c), mod.reduce(d)};
}

Mat2 mat2_mul(const Mat2& x, const Mat2& y, const Modulus& mod) {
  return {
      mod.add(mod.mul(x.a, y.a), mod.mul(x.b, y.c)),
      mod.add(mod.mul(x.a, y.b), mod.mul(x.b, y.d)),
      mod.add(mod.mul(x.c, y.a), mod.mul(x.d, y.c)),
      mod.add(mod.mul(x.c, y.b), mod.mul(x.d, y.d)),
  };
}

Vec2 mat2_apply(const Mat2& x, const Vec2& v, const Modulus& mod) {
  return {mod.add(mod.mul(x.a, v.x), mod.mul(x.b, v.y)),
          mod.add(mod.mul(x.c, v.x), mod.mul(x.d, v.y))};
}

DetResult mat2_det_invertible(const Mat2& x, const Modulus& mod) {
  const std::uint64_t det = mod.sub(mod.mul(x.a, x.d), mod.mul(x.b, x.c));
  return {det, mod.is_unit(det)};
}

// (x0 + x1 T)(y0 + y1 T) = x0 y0 + t x1 y1 + (x0 y1 + x1 y0 + s x1 y1) T
QuadElem QuadRing::mul(const QuadElem& x, const QuadElem& y) const {
  const Modulus& m = modulus;
  const std::uint64_t hi = m.mul(x.x1, y.x1);
  return {m.add(m.mul(x.x0, y.x0), m.mul(t, hi)),
          m.add(m.add(m.mul(x.x0, y.x1), m.mul(x.x1, y.x0)), m.mul(s, hi))};
}

std::uint64_t QuadRing::norm(const QuadElem& x) const {
  const Modulus& m = modulus;
  // det [[x0, t x1], [x1, x0 + s x1]]
  const std::uint64_t diag = m.mul(x.x0, m.add(x.x0, m.mul(s, x.x1)));
  return m.sub(diag, m.mul(t, m.mul(x.x1, x.x1)));
}

BigInt QuadRing::unit_count() const {
  const std::uint64_t l = modulus.ell();
  return big_pow(l, static_cast<unsigned long>(2 * modulus.level() - 2)) *
         BigInt(static_cast<unsigned long>(l * l - 1));
}

namespace {

bool irreducible_mod_ell(std::uint64_t ell, std::uint64_t s, std::uint64_t t) {
  for (std::uint64_t x = 0; x < ell; ++x) {
    const std::uint64_t v = (x * x + (ell - s) * x + (ell - t)) % ell;
    if (v == 0) return false;
  }
  return true;
}

std::int64_t balanced_lift(std::uint64_t r, std::uint64_t ell) {
  const auto half_up = static_cast<std::int64_t>((ell + 1) / 2);
  const auto v = static_cast<std::int64_t>(r);
  return v >= half_up ? v - static_cast<std::int64_t>(ell) : v;
}

}  // namespace

QuadRing build_quad_ring(const Modulus& mod) {
  const std::uint64_t ell = mod.ell();
  for (std::uint64_t s = 0; s < ell; ++s) {
    for (std::uint64_t t = 0; t < ell; ++t) {
      if (irreducible_mod_ell(ell, s, t)) {
        return QuadRing{mod, mod.reduce(balanced_lift(s, ell)), mod.reduce(balanced_lift(t, ell))};
      }
    }
  }
  throw Error("no irreducible quadratic found");  // unreachable for prime ell
}

Mat2 quad_unit_to_mat(const QuadElem& w, const QuadRing& ring) {
  if (!ring.is_unit(w)) throw InvalidArgument("quad_unit_to_mat: element is not a unit");
  const Modulus& m = ring.modulus;
  // columns: w*1 = (x0, x1), w*T = (t x1, x0 + s x1)
  return {w.x0, m.mul(ring.t, w.x1), w.x1, m.add(w.x0, m.mul(ring.s, w.x1))};
}

}  // namespace torsion
