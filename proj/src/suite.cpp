#include "qexch/suite.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>

#include "qexch/matrix_io.hpp"

namespace qexch {

const std::vector<std::string>& suite_groups() {
  static const std::vector<std::string> groups = {
      "regime",   "yb",     "identities", "lemmas",     "exchange",     "fused-yb",       "fusion",
      "dual",     "L",      "dressing",   "traces",     "decoupling",   "commutation",    "nontrivial",
      "identification", "screen"};
  return groups;
}

namespace {

const std::set<std::string> kConfigKeys = {"quadruple", "regime", "n",       "m_size",  "np_size", "l_size",
                                           "gamma",     "samples", "seed",   "budget",  "formal",  "force",
                                           "timing",    "trace_dressing", "checks", "k_file", "out"};

template <typename T>
T get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw StructuralError(std::string("config: bad value for '") + key + "'");
  }
}

std::vector<int> slots_of(const DynPtr& x) {
  std::vector<int> s(static_cast<std::size_t>(x->arity()));
  std::iota(s.begin(), s.end(), 0);
  return s;
}

bool has_total_zero_weight(const DynPtr& x, Sampler& s) {
  int seen = 0, tries = 0;
  while (seen < 3 && tries++ < 50) {
    try {
      Matrix m = x->eval(s.lambda(x->n(), x->params().gamma));
      if (!check_total_zero_weight(m, slots_of(x)).pass) return false;
      ++seen;
    } catch (const PoleError&) {
    }
  }
  return seen == 3;
}

Check lemma_check(std::string name, std::string anchor, const std::vector<LemmaResult>& results) {
  Check c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  for (std::size_t i = 0; i < results.size(); ++i) {
    c.samples += results[i].samples;
    if (!results[i].pass && c.status == Status::Pass) {
      c.status = Status::Fail;
      c.witness = (results.size() > 1 ? "instance " + std::to_string(i) + ": " : std::string()) + results[i].witness;
    }
  }
  if (results.size() > 1) c.detail = {{"instances", results.size()}};
  return c;
}

Check skipped_check(std::string name, std::string anchor, std::string why) {
  Check c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.status = Status::Skipped;
  c.witness = std::move(why);
  return c;
}

class Runner {
 public:
  explicit Runner(const SuiteConfig& c) : c_(c) {}

  bool selected(const std::string& group) const {
    return c_.checks.empty() || std::find(c_.checks.begin(), c_.checks.end(), group) != c_.checks.end();
  }

  // Runs one batch; a budget overrun turns the batch into a single skipped check.
  void run(const std::string& group, const std::string& label, const std::string& anchor,
           const std::function<std::vector<Check>()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<Check> out;
    try {
      out = f();
    } catch (const BudgetExceeded& e) {
      out = {skipped_check(label, anchor, e.what())};
    } catch (const PoleError& e) {
      Check c;
      c.name = label;
      c.anchor = anchor;
      c.status = Status::Fail;
      c.witness = std::string("no pole-free sample point: ") + e.what();
      out = {c};
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& c : out) {
      auto j = check_to_json(c);
      j["group"] = group;
      j["batch"] = label;
      j["runtime_ms"] = c_.timing ? nlohmann::json(ms) : nlohmann::json(nullptr);
      checks_.push_back(std::move(j));
    }
  }

  void run_one(const std::string& group, const std::string& label, const std::string& anchor,
               const std::function<Check()>& f) {
    run(group, label, anchor, [&] { return std::vector<Check>{f()}; });
  }

  nlohmann::json& checks() { return checks_; }

 private:
  const SuiteConfig& c_;
  nlohmann::json checks_ = nlohmann::json::array();
};

// Independent stream per group so that selecting groups does not move the others' sample points.
Sampler group_sampler(const SuiteConfig& c, const std::string& group) {
  const auto& g = suite_groups();
  auto idx = static_cast<std::uint64_t>(std::find(g.begin(), g.end(), group) - g.begin());
  return Sampler(c.seed * 1000003ULL + idx);
}

std::vector<Check> lemma_group(const StructureQuadruple& q, const SolutionEntry& sol, int k, Sampler& s) {
  std::vector<Check> out;
  std::vector<DynPtr> catalog;
  for (const auto& x : {q.A, q.B, q.C, q.D, sol.T, sol.K})
    if (x && !x->spectral()) catalog.push_back(x);
  const int n = q.params.n;
  const ExactScalar& gamma = q.params.gamma;

  for (const auto& x : catalog) {
    if (!has_total_zero_weight(x, s)) continue;
    out.push_back(lemma_check("shift push-through for " + x->name(), "shift push-through",
                              {check_push_through(x, s, k)}));
    std::vector<LemmaResult> cyc;
    for (int i = 0; i < 10; ++i)
      cyc.push_back(check_trace_cyclic(x, random_dynamical(s, n, x->arity(), gamma, false, "X"), s, k));
    out.push_back(lemma_check("trace cyclicity for " + x->name() + " with random X", "trace cyclicity", cyc));
  }
  for (const auto& r : catalog)
    for (const auto& t : catalog)
      if (r->arity() == t->arity())
        out.push_back(lemma_check("dynamical transpose for (" + r->name() + ", " + t->name() + ")",
                                  "dynamical transpose", {check_dyn_transpose(r, t, s, k)}));

  std::vector<LemmaResult> push, tr, cyc;
  for (int i = 0; i < 10; ++i) {
    push.push_back(check_push_through(random_dynamical(s, n, 2, gamma, true, "Z"), s, k));
    tr.push_back(check_dyn_transpose(random_dynamical(s, n, 2, gamma, false, "R"),
                                     random_dynamical(s, n, 2, gamma, false, "S"), s, k));
    cyc.push_back(check_trace_cyclic(random_dynamical(s, n, 2, gamma, true, "D"),
                                     random_dynamical(s, n, 2, gamma, false, "X"), s, k));
  }
  out.push_back(lemma_check("shift push-through for random total-zero-weight matrices", "shift push-through", push));
  out.push_back(lemma_check("dynamical transpose for random pairs", "dynamical transpose", tr));
  out.push_back(lemma_check("trace cyclicity for random D and X", "trace cyclicity", cyc));
  return out;
}

nlohmann::json out_of_scope() {
  return {"operator-valued quantum spaces and monodromy over tensored quantum spaces",
          "spectra and Bethe ansatz of the commuting operators",
          "dressings beyond the closed-form particular solutions",
          "Gaudin-type specializations"};
}

}  // namespace

void validate_config(const SuiteConfig& c) {
  if (c.n < 2) throw StructuralError("config: n must be at least 2");
  if (c.m_size < 1 || c.np_size < 1 || c.l_size < 1) throw StructuralError("config: set sizes must be positive");
  if (c.samples < 1) throw StructuralError("config: samples must be positive");
  if (c.budget < 1) throw StructuralError("config: budget must be positive");
  if (c.gamma.is_zero()) throw StructuralError("config: gamma must be nonzero");
  const auto& g = suite_groups();
  for (const auto& name : c.checks)
    if (std::find(g.begin(), g.end(), name) == g.end()) throw StructuralError("config: unknown check group '" + name + "'");
}

SuiteConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw StructuralError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kConfigKeys.count(key)) throw StructuralError("config: unknown key '" + key + "'");
  SuiteConfig c;
  if (j.contains("quadruple")) c.quadruple = get<std::string>(j, "quadruple");
  if (j.contains("regime") && !j.at("regime").is_null()) c.regime = parse_regime(get<std::string>(j, "regime"));
  if (j.contains("n")) c.n = get<int>(j, "n");
  if (j.contains("m_size")) c.m_size = get<int>(j, "m_size");
  if (j.contains("np_size")) c.np_size = get<int>(j, "np_size");
  if (j.contains("l_size")) c.l_size = get<int>(j, "l_size");
  if (j.contains("gamma")) {
    try {
      c.gamma = scalar_from_json(j.at("gamma"));
    } catch (const std::exception&) {
      throw StructuralError("config: bad value for 'gamma'");
    }
  }
  if (j.contains("samples")) c.samples = get<int>(j, "samples");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("budget")) c.budget = get<std::size_t>(j, "budget");
  if (j.contains("formal")) c.formal = get<bool>(j, "formal");
  if (j.contains("force")) c.force = get<bool>(j, "force");
  if (j.contains("timing")) c.timing = get<bool>(j, "timing");
  if (j.contains("trace_dressing")) c.trace_dressing = parse_dress_mode(get<std::string>(j, "trace_dressing"));
  if (j.contains("checks")) c.checks = get<std::vector<std::string>>(j, "checks");
  if (j.contains("k_file") && !j.at("k_file").is_null()) c.k_file = get<std::string>(j, "k_file");
  if (j.contains("out")) c.out = get<std::string>(j, "out");
  validate_config(c);
  return c;
}

nlohmann::json config_to_json(const SuiteConfig& c) {
  return {{"quadruple", c.quadruple},
          {"regime", c.regime ? nlohmann::json(regime_name(*c.regime)) : nlohmann::json(nullptr)},
          {"n", c.n},
          {"m_size", c.m_size},
          {"np_size", c.np_size},
          {"l_size", c.l_size},
          {"gamma", scalar_to_json(c.gamma)},
          {"samples", c.samples},
          {"seed", c.seed},
          {"budget", c.budget},
          {"formal", c.formal},
          {"force", c.force},
          {"timing", c.timing},
          {"trace_dressing", dress_mode_name(c.trace_dressing)},
          {"checks", c.checks},
          {"k_file", c.k_file ? nlohmann::json(*c.k_file) : nlohmann::json(nullptr)},
          {"out", c.out}};
}

LoadedQuadruple load_quadruple(const SuiteConfig& c) {
  LoadedQuadruple out;
  const auto names = catalog_names();
  if (std::find(names.begin(), names.end(), c.quadruple) != names.end()) {
    out.entry = catalog_entry(c.quadruple, c.n, c.gamma, c.regime.value_or(Regime::Nondynamical));
    if (c.regime && out.entry.q.regime != *c.regime)
      throw StructuralError("catalog entry '" + c.quadruple + "' is " + regime_name(out.entry.q.regime) +
                            ", config says " + regime_name(*c.regime));
    out.source = "catalog";
    return out;
  }
  if (!std::filesystem::exists(c.quadruple))
    throw StructuralError("'" + c.quadruple + "' is neither a catalog entry nor a readable file");
  auto load = load_bundle(read_json_file(c.quadruple), c.force, c.seed, c.samples);
  if (c.regime && load.entry.q.regime != *c.regime)
    throw StructuralError("bundle is " + regime_name(load.entry.q.regime) + ", config says " + regime_name(*c.regime));
  out.entry = std::move(load.entry);
  out.validation = std::move(load.validation);
  out.forced = load.forced;
  out.source = "file";
  return out;
}

nlohmann::json run_suite(const SuiteConfig& c) {
  validate_config(c);
  LoadedQuadruple lq = load_quadruple(c);
  const StructureQuadruple& q = lq.entry.q;
  SolutionEntry sol = lq.entry.solution;
  const int n = q.params.n;
  const int k = c.samples;
  const std::size_t budget = c.budget;
  std::optional<Matrix> user_k;
  if (c.k_file) {
    Matrix km = matrix_from_json(read_json_file(*c.k_file));
    if (km.legs().size() != 1 || km.legs()[0].dim != n)
      throw StructuralError("k_file: expected a matrix on one leg of dimension " + std::to_string(n));
    user_k = km.with_legs(IndexSet::range(0, 1, n));
    sol.K = constant_matrix("K", *user_k, q.params);
  }
  const bool k_from_file = user_k.has_value();
  const bool k_gap = !sol.K;
  const bool semi = q.regime == Regime::Semidynamical;
  const DressOptions dress_opts{DressMode::Full, c.formal};
  const TraceOptions trace_opts{true, false, DressOptions{c.trace_dressing, c.formal}};

  Runner run(c);
  auto M = [n](int a) { return IndexSet::range(1, a, n); };
  auto N = [n](int b) { return IndexSet::range(101, b, n); };
  auto L = [n](int d) { return IndexSet::range(201, d, n); };
  auto pattern = [](int a, int b) {
    return " (|M|=" + std::to_string(a) + ", |N'|=" + std::to_string(b) + ")";
  };
  const std::string no_k = "no dual solution K available";

  if (run.selected("regime")) {
    Sampler s = group_sampler(c, "regime");
    run.run("regime", "regime conditions", "regime conditions", [&] {
      auto v = check_regime(q, s, k);
      v.insert(v.begin(), lq.validation.begin(), lq.validation.end());
      return v;
    });
  }
  if (run.selected("yb")) {
    Sampler s = group_sampler(c, "yb");
    run.run("yb", "Yang-Baxter system", "Yang-Baxter system", [&] { return verify_yb(q, s, k); });
  }
  if (run.selected("identities") && lq.entry.identities) {
    Sampler s = group_sampler(c, "identities");
    run.run("identities", "entry identities", "entry identities", [&] { return lq.entry.identities(s, k); });
  }
  if (run.selected("lemmas")) {
    Sampler s = group_sampler(c, "lemmas");
    run.run("lemmas", "shift lemmas", "shift lemmas", [&] { return lemma_group(q, sol, k, s); });
  }
  if (run.selected("exchange")) {
    Sampler s = group_sampler(c, "exchange");
    run.run_one("exchange", "exchange relation for T", "exchange relation",
                [&] { return check_base_exchange(q, sol.T, s, k, "exchange relation for T", "exchange relation"); });
    if (sol.K) {
      run.run_one("exchange", "dual exchange relation for K", "dual exchange relation", [&] {
        return check_base_exchange(dual_structure(q), sol.K, s, k,
                                   std::string("dual exchange relation for ") + (k_from_file ? "user K" : "K"),
                                   "dual exchange relation");
      });
    } else {
      run.run_one("exchange", "dual solution K", "dual exchange relation", [&] {
        Check ch = skipped_check("dual solution K", "dual exchange relation", no_k);
        ch.status = Status::Info;
        return ch;
      });
    }
  }
  if (run.selected("fused-yb")) {
    Sampler s = group_sampler(c, "fused-yb");
    for (int a = 1; a <= c.m_size; ++a)
      for (int b = 1; b <= c.np_size; ++b)
        for (int d = 1; d <= c.l_size; ++d) {
          std::string label = "fused Yang-Baxter system (|M|=" + std::to_string(a) + ", |N'|=" + std::to_string(b) +
                              ", |L''|=" + std::to_string(d) + ")";
          run.run("fused-yb", label, "fused Yang-Baxter system",
                  [&] { return verify_fused_yb(q, M(a), N(b), L(d), s, k, budget); });
        }
  }
  if (run.selected("fusion")) {
    Sampler s = group_sampler(c, "fusion");
    for (int a = 1; a <= c.m_size; ++a) {
      run.run_one("fusion", "closed product of the fused solution (|M|=" + std::to_string(a) + ")",
                  "closed product of the fused solution", [&] {
                    IndexSet m = M(a);
                    require_budget({&m}, budget);
                    return check_T_closed_form(q, sol.T, m, s, k);
                  });
      for (int b = 1; b <= c.np_size; ++b) {
        run.run("fusion", "fused structure recursion" + pattern(a, b), "fused structure recursion", [&] {
          IndexSet m = M(a), np = N(b);
          require_budget({&m, &np}, budget);
          return check_split_agreement(q, m, np, s, k);
        });
        run.run("fusion", "fused exchange relation" + pattern(a, b), "fused exchange relation",
                [&] { return check_fused_solutions(q, sol, M(a), N(b), s, k, budget); });
      }
    }
  }
  if (run.selected("dual")) {
    Sampler s = group_sampler(c, "dual");
    for (int a = 1; a <= c.m_size; ++a)
      for (int b = 1; b <= c.np_size; ++b)
        run.run("dual", "dual of the fused structure" + pattern(a, b), "dual of the fused structure",
                [&] { return check_dual_of_fused(q, M(a), N(b), s, k, budget); });
  }
  if (run.selected("L")) {
    Sampler s = group_sampler(c, "L");
    for (int a = 1; a <= c.m_size; ++a)
      for (int b = 1; b <= c.np_size; ++b) {
        run.run("L", "coupling matrix intertwining" + pattern(a, b), "coupling matrix intertwining",
                [&] { return check_kernel(q, M(a), N(b), s, k, budget); });
        run.run("L", "second fusion" + pattern(a, b), "second fusion",
                [&] { return check_second_fusion(q, sol, M(a), N(b), s, k, budget); });
      }
  }
  if (run.selected("dressing")) {
    Sampler s = group_sampler(c, "dressing");
    for (int a = 1; a <= c.m_size; ++a) {
      for (int b = 1; b <= c.np_size; ++b) {
        run.run("dressing", "dressing constraints" + pattern(a, b), "dressing constraints",
                [&] { return check_dressing_constraints(q, M(a), N(b), dress_opts, s, k, budget); });
        run.run("dressing", "dressed solutions" + pattern(a, b), "dressed exchange relation",
                [&] { return check_dressed_solutions(q, sol, M(a), N(b), dress_opts, s, k, budget); });
        run.run("dressing", "second dressing" + pattern(a, b), "second dressing",
                [&] { return check_second_dressing(q, sol, M(a), N(b), dress_opts, s, k, budget); });
      }
      run.run("dressing", "classical dressing (|M|=" + std::to_string(a) + ")", "classical dressing",
              [&] { return check_classical_dressing(n, a, s); });
    }
  }

  auto trace_group = [&](const std::string& group, const std::string& label, const std::string& anchor,
                         const std::function<std::vector<Check>()>& f) {
    if (k_gap) {
      run.run_one(group, label, anchor, [&] { return skipped_check(label, anchor, no_k); });
      return;
    }
    run.run(group, label, anchor, f);
  };

  if (run.selected("traces")) {
    Sampler s = group_sampler(c, "traces");
    for (int a = 1; a <= c.m_size; ++a) {
      std::string label = "trace assembly routes (|M|=" + std::to_string(a) + ")";
      trace_group("traces", label, "trace assembly routes", [&] {
        IndexSet m = M(a);
        require_budget({&m}, budget);
        m = attach_spectral(q, m, s, c.formal);
        return std::vector<Check>{check_trace_routes(q, trace_source(q, sol, m, trace_opts), s, k)};
      });
    }
  }
  if (run.selected("decoupling")) {
    Sampler s = group_sampler(c, "decoupling");
    for (int a = 1; a <= c.m_size; ++a) {
      std::string label = "undressed traces decouple (|M|=" + std::to_string(a) + ")";
      trace_group("decoupling", label, "decoupling of undressed traces", [&] {
        IndexSet m = M(a);
        require_budget({&m}, budget);
        return std::vector<Check>{check_decoupling(q, sol, m, s, k)};
      });
    }
  }
  nlohmann::json commutation = nlohmann::json::array();
  if (run.selected("commutation")) {
    Sampler s = group_sampler(c, "commutation");
    for (int a = 1; a <= c.m_size; ++a)
      for (int b = 1; b <= c.np_size; ++b) {
        std::string pair = "H_" + std::to_string(a) + ", H_" + std::to_string(b) + "'";
        trace_group("commutation", "[" + pair + "] = 0", "commuting traces", [&] {
          IndexSet m = M(a), np = N(b);
          require_budget({&m, &np}, budget);
          m = attach_spectral(q, m, s, c.formal);
          np = attach_spectral(q, np, s, c.formal);
          auto ha = build_hamiltonian(q, trace_source(q, sol, m, trace_opts));
          auto hb = build_hamiltonian(q, trace_source(q, sol, np, trace_opts));
          auto r = commute(ha, hb, pair, s, k);
          if (!c.timing) r.runtime_ms.reset();
          commutation.push_back(commutation_to_json(r));
          return std::vector<Check>{commutation_check(r)};
        });
      }
  }
  if (run.selected("nontrivial")) {
    Sampler s = group_sampler(c, "nontrivial");
    for (int a = 2; a <= c.m_size; ++a) {
      std::string label = "dressed traces do not decouple (|M|=" + std::to_string(a) + ")";
      trace_group("nontrivial", label, "dressed traces do not decouple", [&] {
        IndexSet m = M(a);
        require_budget({&m}, budget);
        Check ch = check_nontrivial(q, sol, m, trace_opts, s, k);
        if (!semi && ch.status != Status::Skipped) {
          ch.detail = {{"outcome", status_name(ch.status)}, {"note", "asserted for semi-dynamical data only"}};
          ch.status = Status::Info;
        }
        return std::vector<Check>{ch};
      });
    }
  }
  if (run.selected("identification")) {
    Sampler s = group_sampler(c, "identification");
    for (int a = 1; a <= c.m_size; ++a) {
      std::string label = "AD and DKM traces agree (|M|=" + std::to_string(a) + ")";
      trace_group("identification", label, "trace identification", [&] {
        IndexSet m = M(a);
        require_budget({&m}, budget);
        return std::vector<Check>{check_identification(q, sol, m, dress_opts, s, k)};
      });
    }
  }
  nlohmann::json screens = nlohmann::json::array();
  if (run.selected("screen")) {
    Sampler s = group_sampler(c, "screen");
    for (const std::string ansatz : {"identity", "constant-diagonal"}) {
      try {
        screens.push_back(dual_candidate_screen(q, ansatz, s, std::min(k, 5)));
      } catch (const PoleError& e) {
        screens.push_back({{"ansatz", ansatz}, {"outcome", "undecided"}, {"note", e.what()}});
      }
    }
    if (user_k) screens.push_back(dual_candidate_screen(q, "file", s, std::min(k, 5), user_k));
  }

  nlohmann::json report;
  report["suite"] = "qexch";
  report["config"] = config_to_json(c);
  report["config"].erase("out");
  report["quadruple"] = {{"name", q.name},
                         {"regime", regime_name(q.regime)},
                         {"n", n},
                         {"gamma", scalar_to_json(q.params.gamma)},
                         {"spectral", q.spectral},
                         {"source", lq.source},
                         {"forced", lq.forced}};
  report["dual_solution"] = {{"available", !k_gap},
                             {"source", k_gap ? "none" : (k_from_file ? "file" : "shipped")},
                             {"k_gap", k_gap}};
  report["checks"] = run.checks();
  report["commutation"] = commutation;
  report["screens"] = screens;
  report["out_of_scope"] = out_of_scope();
  std::map<std::string, int> counts = {{"pass", 0}, {"fail", 0}, {"skipped", 0}, {"info", 0}};
  for (const auto& ch : run.checks()) ++counts[ch.at("status").get<std::string>()];
  report["summary"] = counts;
  report["summary"]["exit_code"] = counts["fail"] > 0 ? 1 : 0;
  return report;
}

int report_exit_code(const nlohmann::json& report) {
  for (const auto& ch : report.at("checks"))
    if (ch.at("status") == "fail") return 1;
  return 0;
}

}  // namespace qexch
