#include "qexch/exact_scalar.hpp"

#include <ostream>

#include "qexch/errors.hpp"

namespace qexch {

ExactScalar ExactScalar::rational(long num, long den) {
  if (den == 0) throw DivisionByZero();
  return ExactScalar(mpq_class(num, den));
}

ExactScalar ExactScalar::inverse() const {
  if (is_zero()) throw DivisionByZero();
  if (is_real()) return ExactScalar(1 / re_);
  mpq_class norm = re_ * re_ + im_ * im_;
  return ExactScalar(re_ / norm, -im_ / norm);
}

ExactScalar& ExactScalar::operator+=(const ExactScalar& o) {
  re_ += o.re_;
  if (sgn(o.im_) != 0) im_ += o.im_;
  return *this;
}

ExactScalar& ExactScalar::operator-=(const ExactScalar& o) {
  re_ -= o.re_;
  if (sgn(o.im_) != 0) im_ -= o.im_;
  return *this;
}

ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
  if (a.is_real()) {
    if (b.is_real()) return ExactScalar(mpq_class(a.re_ * b.re_));
    return ExactScalar(a.re_ * b.re_, a.re_ * b.im_);
  }
  if (b.is_real()) return ExactScalar(a.re_ * b.re_, a.im_ * b.re_);
  return ExactScalar(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
}

ExactScalar& ExactScalar::operator*=(const ExactScalar& o) { return *this = *this * o; }

ExactScalar& ExactScalar::operator/=(const ExactScalar& o) {
  if (o.is_zero()) throw DivisionByZero();
  if (o.is_real()) {
    re_ /= o.re_;
    if (sgn(im_) != 0) im_ /= o.re_;
    return *this;
  }
  return *this *= o.inverse();
}

void ExactScalar::add_product(const ExactScalar& a, const ExactScalar& b) {
  if (a.is_real() && b.is_real()) {
    mpq_class t;
    mpq_mul(t.get_mpq_t(), a.re_.get_mpq_t(), b.re_.get_mpq_t());
    mpq_add(re_.get_mpq_t(), re_.get_mpq_t(), t.get_mpq_t());
    return;
  }
  *this += a * b;
}

std::string ExactScalar::to_string() const {
  if (is_real()) return re_.get_str();
  std::string out;
  if (sgn(re_) != 0) out = re_.get_str();
  if (sgn(im_) > 0 && !out.empty()) out += "+";
  if (im_ == 1) {
    out += "i";
  } else if (im_ == -1) {
    out += "-i";
  } else {
    out += im_.get_str() + "i";
  }
  return out;
}

namespace {

mpq_class parse_rational(const std::string& s) {
  if (s.empty() || s == "+") return mpq_class(1);
  if (s == "-") return mpq_class(-1);
  std::string t = s[0] == '+' ? s.substr(1) : s;
  mpq_class q;
  if (q.set_str(t, 10) != 0) throw StructuralError("cannot parse rational '" + s + "'");
  if (sgn(q.get_den()) == 0) throw DivisionByZero();
  q.canonicalize();
  return q;
}

}  // namespace

ExactScalar ExactScalar::parse(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s += c;
  if (s.empty()) throw StructuralError("empty scalar literal");
  if (s.back() != 'i') return ExactScalar(parse_rational(s));
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if (s[k] == '+' || s[k] == '-') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return ExactScalar(mpq_class(0), parse_rational(s));
  return ExactScalar(parse_rational(s.substr(0, split)), parse_rational(s.substr(split)));
}

std::ostream& operator<<(std::ostream& os, const ExactScalar& s) { return os << s.to_string(); }

bool canonical_less(const ExactScalar& a, const ExactScalar& b) {
  if (a.re() != b.re()) return a.re() < b.re();
  return a.im() < b.im();
}

}  // namespace qexch
