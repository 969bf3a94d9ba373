#pragma once

#include <string>
#include <vector>

#include "qexch/fusion.hpp"

namespace qexch {

enum class DressMode { Full, Left, Right };
std::string dress_mode_name(DressMode m);
DressMode parse_dress_mode(const std::string& text);  // throws StructuralError

struct DressOptions {
  DressMode mode = DressMode::Full;
  // spectral quadruples: build Q_M, S_M for |M| >= 2 and evaluate with equal spectral values
  bool formal = false;
};

// Q_M, S_M on ordered legs; an unbuilt factor is the identity (empty word).
struct DressingPair {
  Word Q, S;
  bool q_built = true;
  bool s_built = true;
  std::string note;
  nlohmann::json provenance = nlohmann::json::object();
};

DressingPair build_dressing(const StructureQuadruple& q, const LegSeq& m, const DressOptions& o = {});
SampleSpec dressing_spec(const StructureQuadruple& q, const DressOptions& o);

// W^{t_M} as a single factor on legs (identity stays identity).
Word transposed_on(const Word& w, const IndexSet& legs);
// W^{-1} as a single factor on legs.
Word inverse_on(const Word& w, const IndexSet& legs);

Word dress(const DressingPair& p, const Word& t);

// The regime's constraint system for the pairs on M and N'.
std::vector<Check> check_dressing_constraints(const StructureQuadruple& q, const IndexSet& m, const IndexSet& np,
                                              const DressOptions& o, Sampler& s, int k, std::size_t budget = 729);
// Dressed T (and K with the transposed pair) against the fused (dual) exchange relation.
std::vector<Check> check_dressed_solutions(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m,
                                           const IndexSet& np, const DressOptions& o, Sampler& s, int k,
                                           std::size_t budget = 729);
// L Q L^-1 and S against the second-fusion constraint system, and the dressed L_M T_M.
std::vector<Check> check_second_dressing(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m,
                                         const IndexSet& np, const DressOptions& o, Sampler& s, int k,
                                         std::size_t budget = 729);
// With trivial structure matrices the pair reduces to products of permutations.
std::vector<Check> check_classical_dressing(int n, int m_size, Sampler& s);

}  // namespace qexch
