#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qexch/dynamics.hpp"

namespace qexch {

using ShiftVec = std::vector<int>;
// Normal-ordered coefficients c_mu(lambda) of S_mu at one sample point; zero coefficients are dropped.
using ShiftExpansion = std::map<ShiftVec, ExactScalar>;

void accumulate(ShiftExpansion& e, const ShiftVec& mu, const ExactScalar& c);
ShiftVec add_shift(const ShiftVec& a, const ShiftVec& b);

struct ShiftTerm {
  std::function<ExactScalar(const LambdaPoint&)> coeff;
  ShiftVec shift;
};

// Scalar difference operator sum_mu c_mu(lambda) S_mu, S_mu f(lambda) = f(lambda + gamma mu) S_mu.
class DifferenceOperator {
 public:
  using Fn = std::function<ShiftExpansion(const LambdaPoint&)>;

  DifferenceOperator(int n, ExactScalar gamma, Fn fn);
  static DifferenceOperator from_terms(int n, ExactScalar gamma, std::vector<ShiftTerm> terms);
  static DifferenceOperator shift(int n, ExactScalar gamma, ShiftVec mu);
  static DifferenceOperator constant(int n, ExactScalar gamma, ExactScalar c);

  int n() const { return n_; }
  const ExactScalar& gamma() const { return gamma_; }
  ShiftExpansion at(const LambdaPoint& lambda) const { return fn_(lambda); }

  friend DifferenceOperator operator*(const DifferenceOperator& p, const DifferenceOperator& q);
  friend DifferenceOperator operator+(const DifferenceOperator& p, const DifferenceOperator& q);
  friend DifferenceOperator operator-(const DifferenceOperator& p, const DifferenceOperator& q);
  DifferenceOperator scaled(ExactScalar c) const;
  DifferenceOperator power(int k) const;

 private:
  int n_;
  ExactScalar gamma_;
  Fn fn_;
};

DifferenceOperator commutator(const DifferenceOperator& p, const DifferenceOperator& q);

// Square matrix of difference operators on legs; evaluated lazily per sample point.
class ShiftMatrix {
 public:
  using Entries = std::vector<ShiftExpansion>;  // row-major dim x dim
  using Fn = std::function<Entries(const LambdaPoint&)>;

  ShiftMatrix(IndexSet legs, int n, ExactScalar gamma, Fn fn);
  // lambda-dependent matrix as a shift matrix with all coefficients on S_0
  static ShiftMatrix from_matrix(IndexSet legs, int n, ExactScalar gamma,
                                 std::function<Matrix(const LambdaPoint&)> m);
  static ShiftMatrix identity(IndexSet legs, int n, ExactScalar gamma);

  const IndexSet& legs() const { return legs_; }
  std::size_t dim() const { return dim_; }
  int n() const { return n_; }
  const ExactScalar& gamma() const { return gamma_; }
  Entries at(const LambdaPoint& lambda) const { return fn_(lambda); }

  friend ShiftMatrix operator*(const ShiftMatrix& x, const ShiftMatrix& y);
  friend ShiftMatrix operator-(const ShiftMatrix& x, const ShiftMatrix& y);
  ShiftMatrix transposed() const;  // entry (a,b) -> (b,a); coefficients untouched
  DifferenceOperator trace() const;

 private:
  IndexSet legs_;
  std::size_t dim_;
  int n_;
  ExactScalar gamma_;
  Fn fn_;
};

// Diagonal shift matrix with (a,a) entry S_{sign*mu(a)}.
ShiftMatrix exp_D(const IndexSet& legs, int n, const ExactScalar& gamma, int sign);

struct DiffopWitness {
  ShiftVec shift;
  LambdaPoint lambda;
  ExactScalar lhs;
  ExactScalar rhs;
  std::size_t row = 0;
  std::size_t col = 0;
  std::string to_string() const;
};

struct EqualityResult {
  bool equal = true;
  int samples = 0;
  std::optional<DiffopWitness> witness;
  std::string diagnostic;
};

// Coefficient-by-coefficient comparison at k sample points; resamples on poles.
EqualityResult diffop_equal(const DifferenceOperator& p, const DifferenceOperator& q, Sampler& sampler, int k,
                            int retry_budget = 200);
EqualityResult shift_matrix_equal(const ShiftMatrix& x, const ShiftMatrix& y, Sampler& sampler, int k,
                                  int retry_budget = 200);

// JSON list of {shift, coeff_at: [{lambda, value}]} at the given sample points.
nlohmann::json dump_operator(const DifferenceOperator& p, const std::vector<LambdaPoint>& points);

// Lemma-level operations.
struct LemmaResult {
  bool pass = true;
  int samples = 0;
  std::string witness;
};

// X on all slots of a total-zero-weight group: returns X^{-SL} and checks e^{-D}X = Xbar e^{-D}.
DynPtr push_through(const DynPtr& x);
LemmaResult check_push_through(const DynPtr& x, Sampler& sampler, int samples);
// (R e^D S)^t = [S^SL]^t e^D [R^SC]^t on all slots of R and S.
LemmaResult check_dyn_transpose(const DynPtr& r, const DynPtr& s, Sampler& sampler, int samples);
// Tr(D X D^-1 e^D) = Tr(X e^D) with D total zero weight.
LemmaResult check_trace_cyclic(const DynPtr& d, const DynPtr& x, Sampler& sampler, int samples);
// R^SC equals e^{-D} R e^{D} for R diagonal on its legs.
LemmaResult check_sc_conjugation(const DynPtr& r, Sampler& sampler, int samples);

}  // namespace qexch
