#pragma once

#include "doctest.h"
#include "qexch/suite.hpp"

namespace qexch::test {

inline Matrix random_matrix(const IndexSet& legs, Sampler& s) {
  Matrix m(legs);
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) m(r, c) = ExactScalar(s.rational().re(), s.rational().re());
  return m;
}

inline LambdaPoint point(std::initializer_list<ExactScalar> xs) {
  LambdaPoint l;
  l.coords = xs;
  return l;
}

inline bool all_pass(const std::vector<Check>& v) {
  for (const auto& c : v)
    if (c.status == Status::Fail) {
      MESSAGE(c.name << ": " << c.witness);
      return false;
    }
  return true;
}

inline bool any_fail(const std::vector<Check>& v) {
  for (const auto& c : v)
    if (c.status == Status::Fail) return true;
  return false;
}

}  // namespace qexch::test
