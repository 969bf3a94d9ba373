#pragma once

#include <gmpxx.h>

#include <Eigen/Core>
#include <iosfwd>
#include <string>

namespace qexch {

// Gaussian rational re + im*i over arbitrary-precision rationals.
class ExactScalar {
 public:
  ExactScalar() = default;
  ExactScalar(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  ExactScalar(int v) : re_(v) {}   // NOLINT(google-explicit-constructor)
  explicit ExactScalar(mpq_class re) : re_(std::move(re)) { re_.canonicalize(); }
  ExactScalar(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static ExactScalar rational(long num, long den);
  static ExactScalar i() { return ExactScalar(mpq_class(0), mpq_class(1)); }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

  ExactScalar conj() const { return ExactScalar(re_, -im_); }
  ExactScalar inverse() const;
  ExactScalar& operator+=(const ExactScalar& o);
  ExactScalar& operator-=(const ExactScalar& o);
  ExactScalar& operator*=(const ExactScalar& o);
  ExactScalar& operator/=(const ExactScalar& o);
  ExactScalar operator-() const { return ExactScalar(-re_, -im_); }

  friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
  friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b);
  friend ExactScalar operator/(ExactScalar a, const ExactScalar& b) { return a /= b; }
  friend bool operator==(const ExactScalar& a, const ExactScalar& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const ExactScalar& a, const ExactScalar& b) { return !(a == b); }

  // this += a*b without a temporary for the real case
  void add_product(const ExactScalar& a, const ExactScalar& b);

  // "p/q", "p/q+r/si", "r/si"
  std::string to_string() const;
  static ExactScalar parse(const std::string& text);

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

std::ostream& operator<<(std::ostream& os, const ExactScalar& s);

// total order used only for canonical sorting in reports
bool canonical_less(const ExactScalar& a, const ExactScalar& b);

}  // namespace qexch

namespace Eigen {
template <>
struct NumTraits<qexch::ExactScalar> : GenericNumTraits<qexch::ExactScalar> {
  using Real = qexch::ExactScalar;
  using NonInteger = qexch::ExactScalar;
  using Nested = qexch::ExactScalar;
  using Literal = qexch::ExactScalar;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 32,
    MulCost = 64
  };
};
}  // namespace Eigen
