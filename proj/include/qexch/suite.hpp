#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qexch/trace.hpp"

namespace qexch {

struct SuiteConfig {
  std::string quadruple = "rs";  // catalog name or path to a bundle file
  std::optional<Regime> regime;  // selects the identity entry's regime; must match otherwise
  int n = 2;
  int m_size = 2;
  int np_size = 2;
  int l_size = 1;
  ExactScalar gamma{1};
  int samples = 20;
  std::uint64_t seed = 7;
  std::size_t budget = 729;
  bool formal = false;
  bool force = false;
  bool timing = false;  // runtime_ms fields are null unless set
  DressMode trace_dressing = DressMode::Left;
  std::vector<std::string> checks;  // groups to run; empty runs all
  std::optional<std::string> k_file;  // matrix literal for a user dual solution
  std::string out;
};

// Check groups in dependency order.
const std::vector<std::string>& suite_groups();

// Throws StructuralError on unknown keys, bad values or unknown groups.
SuiteConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SuiteConfig& c);
void validate_config(const SuiteConfig& c);

struct LoadedQuadruple {
  CatalogEntry entry;
  std::vector<Check> validation;
  std::string source;  // "catalog" or "file"
  bool forced = false;
};
// Catalog entry by name, otherwise a bundle file validated before use.
LoadedQuadruple load_quadruple(const SuiteConfig& c);

nlohmann::json run_suite(const SuiteConfig& c);
// 0 when no check failed, 1 otherwise.
int report_exit_code(const nlohmann::json& report);

}  // namespace qexch
