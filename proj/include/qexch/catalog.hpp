#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qexch/checks.hpp"

namespace qexch {

enum class Regime { Nondynamical, Semidynamical, Fullydynamical };
std::string regime_name(Regime r);
Regime parse_regime(const std::string& text);  // throws StructuralError

// (A, B, C, D) on two slots each, plus regime and parameters.
struct StructureQuadruple {
  std::string name;
  Regime regime = Regime::Nondynamical;
  DynParams params;
  bool spectral = false;
  DynPtr A, B, C, D;
  nlohmann::json metadata = nlohmann::json::object();

  SampleSpec sample_spec(bool equal_spectral = false) const;
};

// Scalar solutions on one slot; K is null when no dual solution is shipped.
struct SolutionEntry {
  DynPtr T;
  DynPtr K;
};

struct CatalogEntry {
  StructureQuadruple q;
  SolutionEntry solution;
  // entry-specific identities (crossing relations, closed forms); may be empty
  std::function<std::vector<Check>(Sampler&, int)> identities;
};

CatalogEntry make_yangian(int n);
CatalogEntry make_kulish_sklyanin(int n);
// U defaults to the antidiagonal unit matrix; throws std::invalid_argument unless U^2 = Id
CatalogEntry make_twisted_yangian(int n, std::optional<Matrix> U = std::nullopt);
// gamma_tilde defaults to the screened value
CatalogEntry make_rs_rational(int n, ExactScalar gamma = 1, std::optional<ExactScalar> gamma_tilde = std::nullopt);
CatalogEntry make_fully_dynamical_rs(int n, ExactScalar gamma = 1);
CatalogEntry make_identity(Regime r, int n, ExactScalar gamma = 1);

std::vector<std::string> catalog_names();
// name in catalog_names(); regime is used only by "identity"
CatalogEntry catalog_entry(const std::string& name, int n, ExactScalar gamma = 1,
                           Regime identity_regime = Regime::Nondynamical);

// Weight conditions and unitarity of the quadruple's regime.
std::vector<Check> check_regime(const StructureQuadruple& q, Sampler& sampler, int samples);
// The regime's Yang-Baxter system on legs 1, 2, 3.
std::vector<Check> verify_yb(const StructureQuadruple& q, Sampler& sampler, int samples);

// Dual transforms of four maps whose first factor sits on slots m and second on slots np.
std::array<DynPtr, 4> dual_maps(Regime r, const std::array<DynPtr, 4>& x, const std::vector<int>& m,
                                const std::vector<int>& np);
// Structure matrices of the dual relation, which has the same form as the direct one.
StructureQuadruple dual_structure(const StructureQuadruple& q);

// Fused structure words A_{M Nbar'}, B_{M N'}, C_{M N'}, D_{M Nbar'}.
struct ExchangeData {
  Word A, B, C, D;
};
// Both sides of the regime's exchange relation for solutions T_M, T_N' on disjoint M, N'.
std::pair<Word, Word> exchange_sides(Regime r, const ExchangeData& s, const Word& tm, const Word& tn,
                                     const IndexSet& m, const IndexSet& np);
// Base exchange relation on legs 1, 2'.
Check check_base_exchange(const StructureQuadruple& q, const DynPtr& t, Sampler& sampler, int samples,
                          std::string name, std::string anchor);

// Quadruple bundle files.
nlohmann::json bundle_to_json(const CatalogEntry& e);
struct BundleLoad {
  CatalogEntry entry;
  std::vector<Check> validation;
  bool forced = false;
};
// Re-runs check_regime and verify_yb; throws StructuralError on failure unless force is set.
BundleLoad load_bundle(const nlohmann::json& j, bool force, std::uint64_t seed, int samples);

}  // namespace qexch
