#pragma once

#include <array>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "qexch/catalog.hpp"

namespace qexch {

enum class Role { A, B, C, D };
std::string role_name(Role r);
DynPtr role_matrix(const StructureQuadruple& q, Role r);

// Row: split the first sequence first; Col: split the second sequence first.
enum class Split { Row, Col };

using LegSeq = std::vector<LegId>;
LegSeq reversed(const LegSeq& s);

// Fused structure matrices X_{P Q} for ordered leg sequences, memoized per request.
class Fuser {
 public:
  explicit Fuser(StructureQuadruple q) : q_(std::move(q)) {}

  const StructureQuadruple& quadruple() const { return q_; }

  Word structure(Role r, const LegSeq& p, const LegSeq& q, Split split = Split::Row);
  // recursion tree of the same request
  nlohmann::json provenance(Role r, const LegSeq& p, const LegSeq& q, Split split = Split::Row) const;

  // A_{M Nbar'}, B_{M N'}, C_{M N'}, D_{M Nbar'}
  ExchangeData first(const IndexSet& m, const IndexSet& np);
  // A_{Mbar N'}, B_{M Nbar'}, C_{Mbar N'}, D_{M Nbar'}
  ExchangeData second(const IndexSet& m, const IndexSet& np);

  std::size_t memo_size() const { return memo_.size(); }

 private:
  struct Step {
    bool by_row;
    LegSeq first_p, first_q, rest_p, rest_q;
    LegSeq first_shift, rest_shift;
  };
  Step step(Role r, const LegSeq& p, const LegSeq& q, Split split) const;
  DynPtr matrix(Role r) const;

  StructureQuadruple q_;
  std::map<std::tuple<int, LegSeq, LegSeq, int>, Word> memo_;
};

// Fused solution on M by the inductive rule of the regime.
Word fuse_T(Fuser& f, const DynPtr& t, const LegSeq& m);
nlohmann::json fuse_T_provenance(const Fuser& f, const DynPtr& t, const LegSeq& m);
// The closed product form of the same solution.
Word fuse_T_closed(const StructureQuadruple& q, const DynPtr& t, const LegSeq& m);

// Dual structure matrices of fused words on legs M, N' (pointwise transforms; fully dynamical uses shifts too).
ExchangeData dual_of_fused(Regime r, const ExchangeData& s, const IndexSet& m, const IndexSet& np);

// L_M = prod_{i<j} A_ij, double ordered.
Word build_L(const StructureQuadruple& q, const LegSeq& m);
// Closed interleaved form of L_M T_M.
Word second_T_closed(const StructureQuadruple& q, const DynPtr& t, const LegSeq& m);
// (L_M^{t_M})^{-1} as a factor on M.
Word dual_coupling(const StructureQuadruple& q, const IndexSet& m);

std::size_t total_dim(const std::vector<const IndexSet*>& sets);
void require_budget(const std::vector<const IndexSet*>& sets, std::size_t budget);

// Row-split and column-split recursions agree for every structure matrix on (M, N').
std::vector<Check> check_split_agreement(const StructureQuadruple& q, const IndexSet& m, const IndexSet& np,
                                         Sampler& s, int k);
// Fused YB system of the regime on (M, N', L'').
std::vector<Check> verify_fused_yb(const StructureQuadruple& q, const IndexSet& m, const IndexSet& np,
                                   const IndexSet& l, Sampler& s, int k, std::size_t budget = 729);
// Fused exchange relation for T (and the dual one for K when given).
std::vector<Check> check_fused_solutions(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m,
                                         const IndexSet& np, Sampler& s, int k, std::size_t budget = 729);
// Recursive fused T equals its closed product.
Check check_T_closed_form(const StructureQuadruple& q, const DynPtr& t, const IndexSet& m, Sampler& s, int k);
// Four intertwining relations of L on (M, N').
std::vector<Check> check_kernel(const StructureQuadruple& q, const IndexSet& m, const IndexSet& np, Sampler& s, int k,
                                std::size_t budget = 729);
// L_M T_M equals the closed form; T-tilde and K-tilde satisfy the second fused (dual) relations.
std::vector<Check> check_second_fusion(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m,
                                       const IndexSet& np, Sampler& s, int k, std::size_t budget = 729);
// Fused dual structure equals the dual of the fused structure.
std::vector<Check> check_dual_of_fused(const StructureQuadruple& q, const IndexSet& m, const IndexSet& np, Sampler& s,
                                       int k, std::size_t budget = 729);

}  // namespace qexch
