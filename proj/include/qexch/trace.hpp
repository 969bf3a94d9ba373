#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qexch/diffop.hpp"
#include "qexch/dressing.hpp"

namespace qexch {

// Fused T_M and dual K_M on legs (spectral values attached when the quadruple is spectral).
struct TraceSource {
  Word T, K;
  IndexSet legs;
  nlohmann::json recipe = nlohmann::json::object();
};

struct TraceOptions {
  bool dress_T = false;  // T -> Q T S
  bool dress_K = false;  // K -> Q^{t_M} K S^{t_M}
  DressOptions dressing;
};

// Legs with sampled spectral values for spectral quadruples (one shared value when equal).
IndexSet attach_spectral(const StructureQuadruple& q, const IndexSet& m, Sampler& sampler, bool equal);

// Requires sol.K.
TraceSource trace_source(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& legs,
                         const TraceOptions& o = {});

struct Hamiltonian {
  Regime regime;
  IndexSet legs;
  DifferenceOperator op;
  nlohmann::json recipe;
};

// Tr(K^{t} T) as a constant operator (coefficient on S_0).
Hamiltonian trace_nondyn(const StructureQuadruple& q, const TraceSource& s);
// Tr(T e^{D} (K^{SC})^{t}) through shift matrices.
Hamiltonian trace_semidyn(const StructureQuadruple& q, const TraceSource& s);
// sum_c (T^{t} K)_{cc} S_{mu(c)}.
Hamiltonian trace_semidyn_diagonal(const StructureQuadruple& q, const TraceSource& s);
// Tr(e^{-D} T e^{D} (K^{SC})^{t}) through shift matrices.
Hamiltonian trace_fullydyn(const StructureQuadruple& q, const TraceSource& s);
// sum_{a,b} T_ab(lambda - mu(a)) K_ab(lambda - mu(a)) S_{mu(b) - mu(a)}.
Hamiltonian trace_fullydyn_closed(const StructureQuadruple& q, const TraceSource& s);
// The regime's primary route.
Hamiltonian build_hamiltonian(const StructureQuadruple& q, const TraceSource& s);

// Scalar value of a constant Hamiltonian.
ExactScalar scalar_value(const Hamiltonian& h);

// Both assembly routes of a dynamical regime agree.
Check check_trace_routes(const StructureQuadruple& q, const TraceSource& s, Sampler& sampler, int k);

struct CommutationReport {
  std::string pair;
  int samples = 0;
  bool equal = true;
  std::string max_residual = "0";
  std::optional<double> runtime_ms;
  bool scalar = false;
};
nlohmann::json commutation_to_json(const CommutationReport& r);
CommutationReport commute(const Hamiltonian& a, const Hamiltonian& b, std::string pair, Sampler& sampler, int k);
Check commutation_check(const CommutationReport& r);

// Undressed H_M equals the product of single-leg H_1 (one per leg of M).
Check check_decoupling(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m, Sampler& sampler,
                       int k);
// Dressed H_M differs from the product of single-leg H_1 somewhere; passes with an explicit witness.
Check check_nontrivial(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m,
                       const TraceOptions& o, Sampler& sampler, int k);
// Tr(Ktilde^{t} Qtilde Ttilde Stilde) = Tr(K^{t} Q T S) with Ttilde = L T, Ktilde = (L^{t})^{-1} K.
Check check_identification(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m,
                           const DressOptions& o, Sampler& sampler, int k);

// Screens dual solutions: "identity", "constant-diagonal", or "file" with a user matrix.
nlohmann::json dual_candidate_screen(const StructureQuadruple& q, const std::string& ansatz, Sampler& sampler,
                                     int samples, const std::optional<Matrix>& user_k = std::nullopt);

}  // namespace qexch
