#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qexch/dynamics.hpp"

namespace qexch {

// One factor X_{legs}(lambda + gamma * sum_k mult_k h_{control_k}).
struct Placement {
  DynPtr mat;
  std::vector<LegId> legs;                         // target leg for each slot
  std::vector<std::pair<LegId, int>> controls;     // shift keys on legs outside `legs`
  std::vector<std::pair<int, int>> keyed;          // (slot, mult) on zero-weight own slots
  std::string label() const;
};

// Ordered product of placed factors; the empty word is the identity.
class Word {
 public:
  Word() = default;
  static Word factor(DynPtr mat, std::vector<LegId> legs);

  const std::vector<Placement>& factors() const { return factors_; }
  bool empty() const { return factors_.empty(); }
  std::size_t size() const { return factors_.size(); }

  Word& operator*=(const Word& rhs);
  friend Word operator*(Word a, const Word& b) { return a *= b; }

  // every factor additionally shifted by mult * h_{legs}
  Word shifted(const std::vector<LegId>& legs, int mult = 1) const;
  Word shifted(const IndexSet& legs, int mult = 1) const { return shifted(legs.ids(), mult); }

  std::vector<LegId> support() const;
  std::string provenance() const;

 private:
  std::vector<Placement> factors_;
};

// Dense value of the word on `target` (which supplies dims and spectral parameters).
Matrix evaluate(const Word& w, const IndexSet& target, const LambdaPoint& lambda);

struct WordMismatch {
  std::size_t row = 0;
  std::size_t col = 0;
  ExactScalar lhs;
  ExactScalar rhs;
  std::string to_string() const;
};

// Column-by-column exact comparison of two words; nullopt when equal.
std::optional<WordMismatch> compare_words(const Word& lhs, const Word& rhs, const IndexSet& target,
                                          const LambdaPoint& lambda);

// A word evaluated on fixed legs and transformed pointwise, exposed as a dynamical matrix on those legs.
DynPtr word_as_dynamical(const Word& w, const IndexSet& legs, std::string name,
                         std::function<Matrix(const Matrix&)> transform = {});

}  // namespace qexch
