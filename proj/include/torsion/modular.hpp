#pragma once

/**
 * @file modular.hpp
 * @brief Exact arithmetic over Z/l^N: residues, 2x2 matrices, and the
 *        unramified quadratic ring used for the nonsplit Cartan model.
 *
 * Residues are kept as least nonnegative representatives and every
 * operation reduces eagerly, so equality is structural.
 */

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace torsion {

using BigInt = mpz_class;
using Rational = mpq_class;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Raised when an exhaustive computation would exceed its enumeration budget.
class Infeasible : public Error {
 public:
  using Error::Error;
};

bool is_prime(std::uint64_t n);

/// Reduced rational p/q; throws on q == 0.
Rational make_rational(const BigInt& num, const BigInt& den);
/// "p/q", or "p" when q == 1.
std::string to_string(const Rational& r);
std::string to_string(const BigInt& n);
BigInt big_pow(std::uint64_t base, unsigned long exponent);

/// A prime power l^N. The residue operations need l^N < 2^62; group orders
/// and other formula-path quantities work at any level.
class Modulus {
 public:
  Modulus(std::uint64_t ell, int level);

  std::uint64_t ell() const { return ell_; }
  int level() const { return level_; }

  bool representable() const { return value_ != 0; }
  /// l^N as a machine integer; throws if it does not fit.
  std::uint64_t value() const;
  BigInt value_big() const { return big_pow(ell_, static_cast<unsigned long>(level_)); }
  /// l^k for 0 <= k <= N.
  std::uint64_t power(int k) const;
  /// |(Z/l^N)^x| = l^(N-1)(l-1).
  BigInt unit_count() const;

  std::uint64_t reduce(std::int64_t x) const;
  std::uint64_t add(std::uint64_t x, std::uint64_t y) const;
  std::uint64_t sub(std::uint64_t x, std::uint64_t y) const;
  std::uint64_t mul(std::uint64_t x, std::uint64_t y) const;
  bool is_unit(std::uint64_t x) const { return x % ell_ != 0; }
  /// v_l(x) capped at N, so v(0) = N.
  int valuation(std::uint64_t x) const;
  /// x == y mod l^k.
  bool congruent(std::uint64_t x, std::uint64_t y, int k) const;

  bool operator==(const Modulus& other) const {
    return ell_ == other.ell_ && level_ == other.level_;
  }

 private:
  std::uint64_t ell_;
  int level_;
  std::uint64_t value_ = 0;
};

struct Vec2 {
  std::uint64_t x = 0;
  std::uint64_t y = 0;
  bool operator==(const Vec2&) const = default;
};

/// Row-major [[a, b], [c, d]].
struct Mat2 {
  std::uint64_t a = 0, b = 0, c = 0, d = 0;

  static constexpr Mat2 identity() { return {1, 0, 0, 1}; }
  bool operator==(const Mat2&) const = default;
};

Mat2 make_mat2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, const Modulus& mod);
Mat2 mat2_mul(const Mat2& x, const Mat2& y, const Modulus& mod);
Vec2 mat2_apply(const Mat2& x, const Vec2& v, const Modulus& mod);

struct DetResult {
  std::uint64_t det;
  bool invertible;
};
DetResult mat2_det_invertible(const Mat2& x, const Modulus& mod);

/// Element x0 + x1*T of the quadratic ring.
struct QuadElem {
  std::uint64_t x0 = 0;
  std::uint64_t x1 = 0;
  bool operator==(const QuadElem&) const = default;
};

/// W = (Z/l^N)[T] / (T^2 - s*T - t) with the polynomial irreducible mod l.
struct QuadRing {
  Modulus modulus;
  std::uint64_t s;
  std::uint64_t t;

  QuadElem one() const { return {1, 0}; }
  QuadElem gen() const { return {0, 1}; }
  QuadElem mul(const QuadElem& x, const QuadElem& y) const;
  std::uint64_t norm(const QuadElem& x) const;
  bool is_unit(const QuadElem& x) const { return modulus.is_unit(norm(x)); }
  /// |W^x| = l^(2N-2)(l^2-1).
  BigInt unit_count() const;
};

/// Deterministic choice: the lexicographically smallest (s, t) in [0, l)^2
/// with T^2 - sT - t irreducible mod l, each coefficient lifted to its
/// balanced representative in [-floor(l/2), ceil(l/2) - 1].
QuadRing build_quad_ring(const Modulus& mod);

/// Matrix of multiplication by w in the basis {1, T}; w must be a unit.
Mat2 quad_unit_to_mat(const QuadElem& w, const QuadRing& ring);

}  // namespace torsion
