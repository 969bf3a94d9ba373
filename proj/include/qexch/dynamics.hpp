#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qexch/leg_matrix.hpp"

namespace qexch {

struct DynParams {
  int n = 2;
  ExactScalar gamma{1};
  std::map<std::string, ExactScalar> extra;
};

struct LambdaPoint {
  std::vector<ExactScalar> coords;

  // lambda + gamma * mu
  LambdaPoint shifted(const std::vector<int>& mu, const ExactScalar& gamma) const;
  std::string to_string() const;
};

using Spectral = std::vector<ExactScalar>;

// Random rational sample points; deterministic for a given seed.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed, long bound = 10000) : rng_(seed), bound_(bound) {}

  ExactScalar rational();
  // rejects points with lambda_i - lambda_j in {0, +-gamma, +-2gamma, +-3gamma}
  LambdaPoint lambda(int n, const ExactScalar& gamma);
  // pairwise distinct, and no pair summing to zero
  Spectral spectral(std::size_t count);

 private:
  long uniform(long lo, long hi);
  std::mt19937_64 rng_;
  long bound_;
};

enum class ShiftMode { SL, SC };

// Per-slot weight declarations; verified by verify_weight_tags, never trusted.
struct WeightTags {
  std::vector<int> zero_weight_slots;
  bool total_zero_weight = false;
};

// Evaluable map (lambda, spectral parameters) -> matrix on `arity` slots of dimension n.
// Slot k of the result carries leg id k.
class DynamicalMatrix {
 public:
  using EvalFn = std::function<Matrix(const LambdaPoint&, const Spectral&)>;

  DynamicalMatrix(std::string name, int arity, DynParams params, EvalFn fn, WeightTags tags = {},
                  bool lambda_dependent = true, bool spectral = false);

  const std::string& name() const { return name_; }
  int arity() const { return arity_; }
  int n() const { return params_.n; }
  const DynParams& params() const { return params_; }
  const WeightTags& tags() const { return tags_; }
  bool lambda_dependent() const { return lambda_dependent_; }
  bool spectral() const { return spectral_; }
  IndexSet slot_legs() const { return IndexSet::range(0, arity_, params_.n); }

  Matrix eval(const LambdaPoint& lambda, const Spectral& spectral = {}) const;

  bool slot_zero_weight(int slot) const;

 private:
  std::string name_;
  int arity_;
  DynParams params_;
  EvalFn fn_;
  WeightTags tags_;
  bool lambda_dependent_;
  bool spectral_;
};

using DynPtr = std::shared_ptr<const DynamicalMatrix>;

DynPtr make_dynamical(std::string name, int arity, DynParams params, DynamicalMatrix::EvalFn fn,
                      WeightTags tags = {}, bool lambda_dependent = true, bool spectral = false);
DynPtr constant_matrix(std::string name, const Matrix& m, DynParams params);

// mu(a)_i = number of digits equal to i among the selected positions of a
std::vector<int> weight_vector(const MultiIndex& mi, std::size_t flat, const std::vector<std::size_t>& positions,
                               int n, int multiplier = 1);

struct ShiftKey {
  enum class Kind { Coordinate, Slot } kind = Kind::Slot;
  int index = 0;  // coordinate i or slot position
  int multiplier = 1;
  std::optional<ShiftMode> mode;
};

// Entry (a,b) evaluated at lambda + gamma * (sum of keyed shifts at that entry).
Matrix shift_eval(const DynamicalMatrix& x, const LambdaPoint& base, const Spectral& spectral,
                  const std::vector<ShiftKey>& shifts);

// SL: entry (a,b) at lambda + sign*gamma*mu(a_S); SC: at lambda - sign*gamma*mu(b_S).
DynPtr sl_sc(const DynPtr& x, const std::vector<int>& slots, ShiftMode mode, int sign);

// Pointwise transforms.
DynPtr dyn_inverse(const DynPtr& x);
DynPtr dyn_partial_transpose(const DynPtr& x, const std::vector<int>& slots);
DynPtr dyn_exchange_roles(const DynPtr& x);  // X^pi on two slots
DynPtr dyn_left_swap(const DynPtr& x);       // P_12 X_12 (check matrix)
DynPtr dyn_map(const DynPtr& x, std::string name, std::function<Matrix(const Matrix&)> f);
// same map with new name and weight declarations
DynPtr retag(const DynPtr& x, std::string name, WeightTags tags);

// Random map with affine entries c + sum_i c_i lambda_i; entries linking different weights vanish when
// total_zero_weight is set.
DynPtr random_dynamical(Sampler& sampler, int n, int arity, const ExactScalar& gamma, bool total_zero_weight,
                        std::string name = "X");

struct WeightCheck {
  bool pass = true;
  std::string witness;
};

WeightCheck check_slot_zero_weight(const Matrix& m, int slot);
WeightCheck check_total_zero_weight(const Matrix& m, const std::vector<int>& slots);
WeightCheck verify_weight_tags(const DynamicalMatrix& x, Sampler& sampler, int samples);

}  // namespace qexch
