#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qexch/matrix_io.hpp"
#include "qexch/suite.hpp"

using namespace qexch;

namespace {

constexpr int kExitFinding = 1;
constexpr int kExitStructural = 2;

// Flags shared by every subcommand; unset flags leave the config untouched.
struct Flags {
  std::optional<std::string> quadruple, regime, gamma, out, config, trace_dressing, k_file;
  std::optional<int> n, m_size, np_size, l_size, samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  bool formal = false, force = false, timing = false;
  std::vector<std::string> checks;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--quadruple", f.quadruple, "catalog name or bundle file");
  app->add_option("--regime", f.regime, "nondynamical, semidynamical or fullydynamical");
  app->add_option("--n", f.n, "auxiliary dimension");
  app->add_option("--m-size", f.m_size, "|M|");
  app->add_option("--np-size", f.np_size, "|N'|");
  app->add_option("--samples", f.samples, "sample points per check");
  app->add_option("--seed", f.seed, "sampler seed");
  app->add_option("--gamma", f.gamma, "shift step as an exact scalar, e.g. 1/2");
  app->add_option("--budget", f.budget, "cap on the total tensor dimension");
  app->add_option("--out", f.out, "write the JSON report here instead of stdout");
  app->add_flag("--formal", f.formal, "evaluate spectral dressings at one shared spectral value");
  app->add_flag("--force", f.force, "accept a bundle that fails validation");
  app->add_flag("--timing", f.timing, "record runtime_ms (reports are then not reproducible)");
}

SuiteConfig make_config(const Flags& f) {
  SuiteConfig c = f.config ? config_from_json(read_json_file(*f.config)) : SuiteConfig{};
  if (f.quadruple) c.quadruple = *f.quadruple;
  if (f.regime) c.regime = parse_regime(*f.regime);
  if (f.n) c.n = *f.n;
  if (f.m_size) c.m_size = *f.m_size;
  if (f.np_size) c.np_size = *f.np_size;
  if (f.l_size) c.l_size = *f.l_size;
  if (f.samples) c.samples = *f.samples;
  if (f.seed) c.seed = *f.seed;
  if (f.budget) c.budget = *f.budget;
  if (f.gamma) {
    try {
      c.gamma = ExactScalar::parse(*f.gamma);
    } catch (const std::exception&) {
      throw StructuralError("bad --gamma '" + *f.gamma + "'");
    }
  }
  if (f.out) c.out = *f.out;
  if (f.trace_dressing) c.trace_dressing = parse_dress_mode(*f.trace_dressing);
  if (f.k_file) c.k_file = *f.k_file;
  if (!f.checks.empty()) c.checks = f.checks;
  c.formal = c.formal || f.formal;
  c.force = c.force || f.force;
  c.timing = c.timing || f.timing;
  validate_config(c);
  return c;
}

void emit(const SuiteConfig& c, const nlohmann::json& j) {
  std::string text = dump_json(j);
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(c.out, text);
  }
}

void print_summary(const nlohmann::json& checks) {
  int pass = 0, fail = 0, other = 0;
  for (const auto& ch : checks) {
    const auto& s = ch.at("status");
    if (s == "pass") {
      ++pass;
    } else if (s == "fail") {
      ++fail;
      std::cerr << "FAIL " << ch.at("name").get<std::string>() << ": " << ch.value("witness", "") << "\n";
    } else {
      ++other;
    }
  }
  std::cerr << pass << " passed, " << fail << " failed, " << other << " skipped or informational\n";
}

nlohmann::json checks_json(const std::vector<Check>& v) {
  auto out = nlohmann::json::array();
  for (const auto& c : v) out.push_back(check_to_json(c));
  return out;
}

int finish(const SuiteConfig& c, nlohmann::json report) {
  print_summary(report.at("checks"));
  emit(c, report);
  return report_exit_code(report) == 0 ? 0 : kExitFinding;
}

nlohmann::json quadruple_json(const LoadedQuadruple& lq) {
  const auto& q = lq.entry.q;
  return {{"name", q.name},
          {"regime", regime_name(q.regime)},
          {"n", q.params.n},
          {"gamma", scalar_to_json(q.params.gamma)},
          {"spectral", q.spectral},
          {"source", lq.source},
          {"forced", lq.forced}};
}

// A pole-free sample point with legs attached, for literal output.
std::pair<SamplePoint, IndexSet> sample_point(const StructureQuadruple& q, const IndexSet& legs, bool formal,
                                              Sampler& s, const std::function<void(const SamplePoint&)>& probe) {
  for (int tries = 0; tries < 200; ++tries) {
    SamplePoint p = draw_point(q.sample_spec(formal), s, legs.size());
    try {
      probe(p);
      return {p, p.attach(legs)};
    } catch (const PoleError&) {
    }
  }
  throw PoleError("no pole-free sample point found");
}

nlohmann::json point_json(const SamplePoint& p) {
  auto lam = nlohmann::json::array();
  for (const auto& x : p.lambda.coords) lam.push_back(scalar_to_json(x));
  auto sp = nlohmann::json::array();
  for (const auto& x : p.spectral) sp.push_back(scalar_to_json(x));
  return {{"lambda", lam}, {"spectral", sp}};
}

int cmd_verify_yb(const SuiteConfig& c, bool fused) {
  LoadedQuadruple lq = load_quadruple(c);
  const auto& q = lq.entry.q;
  const int n = q.params.n;
  Sampler s(c.seed);
  std::vector<Check> v = lq.validation;
  auto add = [&v](std::vector<Check> w) { v.insert(v.end(), w.begin(), w.end()); };
  add(check_regime(q, s, c.samples));
  add(verify_yb(q, s, c.samples));
  if (lq.entry.identities) add(lq.entry.identities(s, c.samples));
  if (fused) {
    // every pattern whose total dimension fits the budget
    auto fits = [&](int total) {
      std::size_t d = 1;
      for (int i = 0; i < total; ++i) d *= static_cast<std::size_t>(n);
      return d <= c.budget;
    };
    for (int a = 1; fits(a + 2); ++a)
      for (int b = 1; fits(a + b + 1); ++b)
        for (int d = 1; fits(a + b + d); ++d)
          add(verify_fused_yb(q, IndexSet::range(1, a, n), IndexSet::range(101, b, n), IndexSet::range(201, d, n), s,
                              c.samples, c.budget));
  }
  nlohmann::json report = {{"command", "verify-yb"},
                           {"config", config_to_json(c)},
                           {"quadruple", quadruple_json(lq)},
                           {"checks", checks_json(v)}};
  return finish(c, report);
}

int cmd_fuse(const SuiteConfig& c) {
  LoadedQuadruple lq = load_quadruple(c);
  const auto& q = lq.entry.q;
  const int n = q.params.n;
  IndexSet m = IndexSet::range(1, c.m_size, n), np = IndexSet::range(101, c.np_size, n);
  require_budget({&m, &np}, c.budget);
  IndexSet legs = m.concat(np);
  Fuser f(q);
  ExchangeData x = f.first(m, np);
  Word t = fuse_T(f, lq.entry.solution.T, m.ids());
  Sampler s(c.seed);
  nlohmann::json literals;
  auto [p, target] = sample_point(q, legs, c.formal, s, [&](const SamplePoint& pt) {
    IndexSet tg = pt.attach(legs);
    literals = nlohmann::json::object();
    literals["A"] = matrix_to_json(evaluate(x.A, tg, pt.lambda));
    literals["B"] = matrix_to_json(evaluate(x.B, tg, pt.lambda));
    literals["C"] = matrix_to_json(evaluate(x.C, tg, pt.lambda));
    literals["D"] = matrix_to_json(evaluate(x.D, tg, pt.lambda));
    literals["T"] = matrix_to_json(evaluate(t, tg.subset(m.ids()), pt.lambda));
  });
  LegSeq ms = m.ids(), ns = np.ids();
  nlohmann::json provenance = {{"A", f.provenance(Role::A, ms, reversed(ns))},
                               {"B", f.provenance(Role::B, ms, ns)},
                               {"C", f.provenance(Role::C, ms, ns)},
                               {"D", f.provenance(Role::D, ms, reversed(ns))},
                               {"T", fuse_T_provenance(f, lq.entry.solution.T, ms)}};
  std::vector<Check> v = check_fused_solutions(q, lq.entry.solution, m, np, s, c.samples, c.budget);
  nlohmann::json report = {{"command", "fuse"},
                           {"config", config_to_json(c)},
                           {"quadruple", quadruple_json(lq)},
                           {"M", legs_to_json(m)},
                           {"N'", legs_to_json(np)},
                           {"point", point_json(p)},
                           {"matrices", literals},
                           {"provenance", provenance},
                           {"checks", checks_json(v)}};
  return finish(c, report);
}

int cmd_dress(const SuiteConfig& c, DressMode mode) {
  LoadedQuadruple lq = load_quadruple(c);
  const auto& q = lq.entry.q;
  const int n = q.params.n;
  IndexSet m = IndexSet::range(1, c.m_size, n), np = IndexSet::range(101, c.np_size, n);
  require_budget({&m, &np}, c.budget);
  DressOptions o{mode, c.formal};
  DressingPair pair = build_dressing(q, m.ids(), o);
  Sampler s(c.seed);
  nlohmann::json literals;
  auto [p, target] = sample_point(q, m, c.formal, s, [&](const SamplePoint& pt) {
    IndexSet tg = pt.attach(m);
    literals = nlohmann::json::object();
    literals["Q"] = matrix_to_json(evaluate(pair.Q, tg, pt.lambda));
    literals["S"] = matrix_to_json(evaluate(pair.S, tg, pt.lambda));
  });
  std::vector<Check> v = check_dressing_constraints(q, m, np, o, s, c.samples, c.budget);
  auto w = check_dressed_solutions(q, lq.entry.solution, m, np, o, s, c.samples, c.budget);
  v.insert(v.end(), w.begin(), w.end());
  nlohmann::json report = {{"command", "dress"},
                           {"config", config_to_json(c)},
                           {"quadruple", quadruple_json(lq)},
                           {"mode", dress_mode_name(mode)},
                           {"M", legs_to_json(m)},
                           {"point", point_json(p)},
                           {"matrices", literals},
                           {"provenance", pair.provenance},
                           {"checks", checks_json(v)}};
  return finish(c, report);
}

TraceOptions trace_options(const SuiteConfig& c, bool undressed) {
  return TraceOptions{!undressed, false, DressOptions{c.trace_dressing, c.formal}};
}

SolutionEntry solution_with_k(const SuiteConfig& c, const LoadedQuadruple& lq) {
  SolutionEntry sol = lq.entry.solution;
  if (c.k_file) {
    const int n = lq.entry.q.params.n;
    Matrix km = matrix_from_json(read_json_file(*c.k_file));
    if (km.legs().size() != 1 || km.legs()[0].dim != n)
      throw StructuralError("k file: expected a matrix on one leg of dimension " + std::to_string(n));
    sol.K = constant_matrix("K", km.with_legs(IndexSet::range(0, 1, n)), lq.entry.q.params);
  }
  if (!sol.K) throw StructuralError("no dual solution K; pass --k-file");
  return sol;
}

int cmd_trace(const SuiteConfig& c, bool undressed) {
  LoadedQuadruple lq = load_quadruple(c);
  const auto& q = lq.entry.q;
  const int n = q.params.n;
  SolutionEntry sol = solution_with_k(c, lq);
  IndexSet m = IndexSet::range(1, c.m_size, n);
  require_budget({&m}, c.budget);
  Sampler s(c.seed);
  m = attach_spectral(q, m, s, c.formal);
  Hamiltonian h = build_hamiltonian(q, trace_source(q, sol, m, trace_options(c, undressed)));
  std::vector<LambdaPoint> points;
  for (int tries = 0; static_cast<int>(points.size()) < c.samples; ++tries) {
    if (tries > c.samples + 200) throw PoleError("no pole-free sample points for the operator dump");
    LambdaPoint l = s.lambda(n, q.params.gamma);
    try {
      h.op.at(l);
      points.push_back(l);
    } catch (const PoleError&) {
    }
  }
  nlohmann::json report = {{"command", "trace"},
                           {"config", config_to_json(c)},
                           {"quadruple", quadruple_json(lq)},
                           {"M", legs_to_json(m)},
                           {"recipe", h.recipe},
                           {"operator", dump_operator(h.op, points)}};
  emit(c, report);
  return 0;
}

int cmd_commute(const SuiteConfig& c, bool undressed) {
  LoadedQuadruple lq = load_quadruple(c);
  const auto& q = lq.entry.q;
  const int n = q.params.n;
  SolutionEntry sol = solution_with_k(c, lq);
  IndexSet m = IndexSet::range(1, c.m_size, n), np = IndexSet::range(101, c.np_size, n);
  require_budget({&m, &np}, c.budget);
  Sampler s(c.seed);
  m = attach_spectral(q, m, s, c.formal);
  np = attach_spectral(q, np, s, c.formal);
  auto o = trace_options(c, undressed);
  auto ha = build_hamiltonian(q, trace_source(q, sol, m, o));
  auto hb = build_hamiltonian(q, trace_source(q, sol, np, o));
  auto r = commute(ha, hb, "H_" + std::to_string(c.m_size) + ", H_" + std::to_string(c.np_size) + "'", s, c.samples);
  if (!c.timing) r.runtime_ms.reset();
  emit(c, commutation_to_json(r));
  std::cerr << "[" << r.pair << "] " << (r.equal ? "= 0" : "!= 0") << " at " << r.samples << " samples\n";
  return r.equal ? 0 : kExitFinding;
}

int cmd_suite(const SuiteConfig& c) {
  auto report = run_suite(c);
  print_summary(report.at("checks"));
  if (report.at("dual_solution").at("k_gap").get<bool>())
    std::cerr << "no dual solution K: trace groups skipped (supply one with --k-file)\n";
  emit(c, report);
  return report_exit_code(report) == 0 ? 0 : kExitFinding;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification of quadratic exchange algebras, their fusion, dressing and traces"};
  app.require_subcommand(1);

  Flags yb_f, fuse_f, dress_f, trace_f, commute_f, suite_f;
  bool fused = false, trace_undressed = false, commute_undressed = false;
  std::string dress_mode = "full";

  auto* yb = app.add_subcommand("verify-yb", "regime conditions and Yang-Baxter system of a quadruple");
  add_common(yb, yb_f);
  yb->add_flag("--fused", fused, "also run the fused system for every pattern within the budget");

  auto* fuse = app.add_subcommand("fuse", "fused structure matrices and solution on (M, N') with provenance");
  add_common(fuse, fuse_f);

  auto* dress = app.add_subcommand("dress", "dressing pair Q_M, S_M with provenance and constraint checks");
  add_common(dress, dress_f);
  dress->add_option("--mode", dress_mode, "full, left or right");

  auto* trace = app.add_subcommand("trace", "dump the trace operator H_M");
  add_common(trace, trace_f);
  trace->add_option("--dress-mode", trace_f.trace_dressing, "full, left or right");
  trace->add_flag("--undressed", trace_undressed, "use the undressed fused solution");
  trace->add_option("--k-file", trace_f.k_file, "matrix literal of a dual solution K");

  auto* comm = app.add_subcommand("commute", "commutator of H_M and H_N'");
  add_common(comm, commute_f);
  comm->add_option("--dress-mode", commute_f.trace_dressing, "full, left or right");
  comm->add_flag("--undressed", commute_undressed, "use the undressed fused solutions");
  comm->add_option("--k-file", commute_f.k_file, "matrix literal of a dual solution K");

  auto* suite = app.add_subcommand("suite", "run the check groups in dependency order");
  add_common(suite, suite_f);
  suite->add_option("--config", suite_f.config, "JSON config; flags override its fields");
  suite->add_option("--l-size", suite_f.l_size, "|L''|");
  suite->add_option("--checks", suite_f.checks, "groups to run")->delimiter(',');
  suite->add_option("--trace-dressing", suite_f.trace_dressing, "full, left or right");
  suite->add_option("--k-file", suite_f.k_file, "matrix literal of a dual solution K");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitStructural;
  }

  try {
    if (yb->parsed()) return cmd_verify_yb(make_config(yb_f), fused);
    if (fuse->parsed()) return cmd_fuse(make_config(fuse_f));
    if (dress->parsed()) return cmd_dress(make_config(dress_f), parse_dress_mode(dress_mode));
    if (trace->parsed()) return cmd_trace(make_config(trace_f), trace_undressed);
    if (comm->parsed()) return cmd_commute(make_config(commute_f), commute_undressed);
    if (suite->parsed()) return cmd_suite(make_config(suite_f));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStructural;
  }
  return kExitStructural;
}
