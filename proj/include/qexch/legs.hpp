#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qexch/exact_scalar.hpp"

namespace qexch {

using LegId = int;

struct LegLabel {
  LegId id = 0;
  int dim = 0;
  friend bool operator==(const LegLabel& a, const LegLabel& b) {
    return a.id == b.id && a.dim == b.dim;
  }
};

// Printable name; ids >= 100 print with primes (101 -> 1', 201 -> 1'').
std::string leg_name(LegId id);

// Ordered set of legs with an optional spectral parameter per leg.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<LegLabel> labels);
  IndexSet(std::vector<LegLabel> labels, std::vector<std::optional<ExactScalar>> spectral);

  // legs first..first+count-1, all of dimension n
  static IndexSet range(LegId first, int count, int n);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::vector<LegLabel>& labels() const { return labels_; }
  const LegLabel& operator[](std::size_t k) const { return labels_[k]; }
  std::vector<LegId> ids() const;

  const std::optional<ExactScalar>& spectral(std::size_t k) const { return spectral_[k]; }
  bool has_spectral() const;
  IndexSet with_spectral(const std::vector<ExactScalar>& values) const;
  IndexSet without_spectral() const;

  bool contains(LegId id) const;
  std::size_t position(LegId id) const;  // throws LegError
  std::size_t dimension() const;         // product of leg dims

  IndexSet reversed() const;
  IndexSet head_drop() const;  // M -> M_0
  IndexSet tail_drop() const;  // M -> M^0
  IndexSet first() const;
  IndexSet last() const;
  IndexSet concat(const IndexSet& other) const;  // throws on overlap
  IndexSet subset(const std::vector<LegId>& ids) const;  // in the order given
  IndexSet before(LegId id) const;  // legs strictly before id in this order
  IndexSet after(LegId id) const;

  bool disjoint(const IndexSet& other) const;
  bool same_legs(const IndexSet& other) const;  // identical ordered labels

  std::string to_string() const;

 private:
  std::vector<LegLabel> labels_;
  std::vector<std::optional<ExactScalar>> spectral_;
};

// Row-major multi-index helpers; the first leg is the most significant digit.
class MultiIndex {
 public:
  explicit MultiIndex(const IndexSet& legs);
  std::size_t size() const { return total_; }
  std::size_t legs() const { return dims_.size(); }
  std::size_t stride(std::size_t pos) const { return strides_[pos]; }
  int dim(std::size_t pos) const { return dims_[pos]; }
  int digit(std::size_t flat, std::size_t pos) const {
    return static_cast<int>((flat / strides_[pos]) % static_cast<std::size_t>(dims_[pos]));
  }
  std::vector<int> digits(std::size_t flat) const;
  std::size_t flat(const std::vector<int>& digits) const;

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

}  // namespace qexch
