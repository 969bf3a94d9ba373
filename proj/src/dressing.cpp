#include "qexch/dressing.hpp"

#include <numeric>

#include "qexch/errors.hpp"

namespace qexch {

std::string dress_mode_name(DressMode m) {
  switch (m) {
    case DressMode::Full: return "full";
    case DressMode::Left: return "left";
    case DressMode::Right: return "right";
  }
  return "unknown";
}

DressMode parse_dress_mode(const std::string& text) {
  if (text == "full") return DressMode::Full;
  if (text == "left") return DressMode::Left;
  if (text == "right") return DressMode::Right;
  throw StructuralError("unknown dressing mode '" + text + "'");
}

namespace {

LegSeq range_of(const LegSeq& m, std::size_t from, std::size_t to) {
  return {m.begin() + static_cast<long>(from), m.begin() + static_cast<long>(to)};
}

nlohmann::json leg_names(const LegSeq& s) {
  auto j = nlohmann::json::array();
  for (LegId id : s) j.push_back(leg_name(id));
  return j;
}

std::vector<int> all_slots(std::size_t count) {
  std::vector<int> v(count);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

Check skipped(std::string name, std::string anchor, std::string why) {
  Check c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.status = Status::Skipped;
  c.witness = std::move(why);
  return c;
}

std::string sizes(const IndexSet& m, const IndexSet& np) {
  return "(|M|=" + std::to_string(m.size()) + ", |N'|=" + std::to_string(np.size()) + ")";
}

struct Relation {
  std::string name;
  char factor;  // 'Q' or 'S'
  Word lhs, rhs;
};

}  // namespace

SampleSpec dressing_spec(const StructureQuadruple& q, const DressOptions& o) {
  return q.sample_spec(q.spectral && o.formal);
}

DressingPair build_dressing(const StructureQuadruple& q, const LegSeq& m, const DressOptions& o) {
  DressingPair p;
  p.q_built = o.mode != DressMode::Right;
  p.s_built = o.mode != DressMode::Left;
  if (q.spectral && m.size() >= 2 && !o.formal) {
    p.q_built = p.s_built = false;
    p.note = "spectral parameters would have to be permuted; use formal mode";
  }
  auto qa = dyn_left_swap(q.A);
  auto sd = dyn_left_swap(q.D);
  nlohmann::json qf = nlohmann::json::array(), sf = nlohmann::json::array();
  for (std::size_t a = 0; a + 1 < m.size(); ++a) {
    LegSeq q_shift = q.regime == Regime::Fullydynamical ? range_of(m, a + 2, m.size()) : LegSeq{};
    LegSeq s_shift = q.regime == Regime::Nondynamical ? LegSeq{} : range_of(m, 0, a);
    if (p.q_built) {
      p.Q *= Word::factor(qa, {m[a], m[a + 1]}).shifted(q_shift);
      qf.push_back({{"legs", leg_names({m[a], m[a + 1]})}, {"shift", leg_names(q_shift)}});
    }
    if (p.s_built) {
      p.S *= Word::factor(sd, {m[a], m[a + 1]}).shifted(s_shift);
      sf.push_back({{"legs", leg_names({m[a], m[a + 1]})}, {"shift", leg_names(s_shift)}});
    }
  }
  p.provenance = {{"M", leg_names(m)},
                  {"Q", p.q_built ? nlohmann::json{{"factor", "P A"}, {"product", qf}} : nlohmann::json(nullptr)},
                  {"S", p.s_built ? nlohmann::json{{"factor", "P D"}, {"product", sf}} : nlohmann::json(nullptr)}};
  if (!p.note.empty()) p.provenance["note"] = p.note;
  return p;
}

Word transposed_on(const Word& w, const IndexSet& legs) {
  if (w.empty()) return w;
  IndexSet base = legs.without_spectral();
  auto slots = all_slots(legs.size());
  auto x = word_as_dynamical(w, base, "W");
  return Word::factor(dyn_partial_transpose(x, slots), base.ids());
}

Word inverse_on(const Word& w, const IndexSet& legs) {
  if (w.empty()) return w;
  IndexSet base = legs.without_spectral();
  return Word::factor(dyn_inverse(word_as_dynamical(w, base, "W")), base.ids());
}

Word dress(const DressingPair& p, const Word& t) { return p.Q * t * p.S; }

namespace {

std::vector<Relation> constraint_system(Regime r, const ExchangeData& x, const DressingPair& pm,
                                        const DressingPair& pn, const IndexSet& m, const IndexSet& np) {
  const Word &QM = pm.Q, &QN = pn.Q, &SM = pm.S, &SN = pn.S;
  const Word &A = x.A, &B = x.B, &C = x.C, &D = x.D;
  switch (r) {
    case Regime::Nondynamical:
      return {{"[Q_M, A]", 'Q', QM * A, A * QM},         {"[Q_N', A]", 'Q', QN * A, A * QN},
              {"[Q_N', B]", 'Q', QN * B, B * QN},        {"[Q_M, C]", 'Q', QM * C, C * QM},
              {"[S_M, D]", 'S', SM * D, D * SM},         {"[S_N', D]", 'S', SN * D, D * SN},
              {"[S_N', C]", 'S', SN * C, C * SN},        {"[S_M, B]", 'S', SM * B, B * SM}};
    case Regime::Semidynamical:
      return {{"[Q_M, A]", 'Q', QM * A, A * QM},
              {"[Q_N', A]", 'Q', QN * A, A * QN},
              {"Q_N' B = B Q_N'(h_M)", 'Q', QN * B, B * QN.shifted(m)},
              {"Q_M C = C Q_M(h_N')", 'Q', QM * C, C * QM.shifted(np)},
              {"[S_N', C]", 'S', SN * C, C * SN},
              {"[S_M, B]", 'S', SM * B, B * SM},
              {"S_M(h_N') D = D S_M", 'S', SM.shifted(np) * D, D * SM},
              {"S_N' D = D S_N'(h_M)", 'S', SN * D, D * SN.shifted(m)}};
    case Regime::Fullydynamical:
      return {{"Q_M A = A Q_M(h_N')", 'Q', QM * A, A * QM.shifted(np)},
              {"Q_N'(h_M) A = A Q_N'", 'Q', QN.shifted(m) * A, A * QN},
              {"Q_N' B = B Q_N'(h_M)", 'Q', QN * B, B * QN.shifted(m)},
              {"Q_M C = C Q_M(h_N')", 'Q', QM * C, C * QM.shifted(np)},
              {"S_N'(h_M) C = C S_N'", 'S', SN.shifted(m) * C, C * SN},
              {"S_M(h_N') B = B S_M", 'S', SM.shifted(np) * B, B * SM},
              {"S_M(h_N') D = D S_M", 'S', SM.shifted(np) * D, D * SM},
              {"S_N' D = D S_N'(h_M)", 'S', SN * D, D * SN.shifted(m)}};
  }
  return {};
}

std::vector<Check> run_system(const std::vector<Relation>& rels, const DressingPair& pm, const DressingPair& pn,
                              const std::string& prefix, const std::string& anchor, const IndexSet& legs,
                              const SampleSpec& spec, Sampler& s, int k) {
  std::vector<Check> out;
  for (const auto& r : rels) {
    bool built = r.factor == 'Q' ? pm.q_built && pn.q_built : pm.s_built && pn.s_built;
    if (!built) {
      out.push_back(skipped(prefix + r.name, anchor, pm.note.empty() ? "factor not built in this mode" : pm.note));
      continue;
    }
    out.push_back(word_identity(prefix + r.name, anchor, r.lhs, r.rhs, legs, spec, s, k));
  }
  return out;
}

}  // namespace

std::vector<Check> check_dressing_constraints(const StructureQuadruple& q, const IndexSet& m, const IndexSet& np,
                                              const DressOptions& o, Sampler& s, int k, std::size_t budget) {
  require_budget({&m, &np}, budget);
  Fuser f(q);
  auto pm = build_dressing(q, m.ids(), o), pn = build_dressing(q, np.ids(), o);
  auto rels = constraint_system(q.regime, f.first(m, np), pm, pn, m, np);
  return run_system(rels, pm, pn, "dressing constraint " + sizes(m, np) + " ", "dressing constraints", m.concat(np),
                    dressing_spec(q, o), s, k);
}

std::vector<Check> check_dressed_solutions(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m,
                                           const IndexSet& np, const DressOptions& o, Sampler& s, int k,
                                           std::size_t budget) {
  require_budget({&m, &np}, budget);
  const std::string anchor = "dressed fused solutions";
  std::vector<Check> out;
  auto pm = build_dressing(q, m.ids(), o), pn = build_dressing(q, np.ids(), o);
  if (!pm.q_built && !pm.s_built) return {skipped("dressed fused solutions " + sizes(m, np), anchor, pm.note)};
  IndexSet legs = m.concat(np);
  auto spec = dressing_spec(q, o);
  Fuser f(q);
  auto data = f.first(m, np);
  {
    Word tm = dress(pm, fuse_T(f, sol.T, m.ids())), tn = dress(pn, fuse_T(f, sol.T, np.ids()));
    auto [lhs, rhs] = exchange_sides(q.regime, data, tm, tn, m, np);
    Check c = word_identity("dressed T satisfies the fused exchange relation " + sizes(m, np), anchor, lhs, rhs, legs,
                            spec, s, k);
    c.detail = {{"Q_M S_M", pm.provenance}};
    out.push_back(std::move(c));
  }
  if (sol.K) {
    Fuser fd(dual_structure(q));
    DressingPair dm{transposed_on(pm.Q, m), transposed_on(pm.S, m), pm.q_built, pm.s_built, pm.note, {}};
    DressingPair dn{transposed_on(pn.Q, np), transposed_on(pn.S, np), pn.q_built, pn.s_built, pn.note, {}};
    Word km = dress(dm, fuse_T(fd, sol.K, m.ids())), kn = dress(dn, fuse_T(fd, sol.K, np.ids()));
    ExchangeData dual = q.regime == Regime::Fullydynamical ? fd.first(m, np) : dual_of_fused(q.regime, data, m, np);
    auto [lhs, rhs] = exchange_sides(q.regime, dual, km, kn, m, np);
    out.push_back(word_identity("K dressed by the transposed pair satisfies the fused dual exchange relation " +
                                    sizes(m, np),
                                anchor, lhs, rhs, legs, spec, s, k));
  }
  return out;
}

std::vector<Check> check_second_dressing(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m,
                                         const IndexSet& np, const DressOptions& o, Sampler& s, int k,
                                         std::size_t budget) {
  const std::string anchor = "second fusion dressing";
  if (q.regime == Regime::Fullydynamical)
    return {skipped("second fusion dressing", anchor, "no second fusion in the fully dynamical regime")};
  require_budget({&m, &np}, budget);
  auto pm = build_dressing(q, m.ids(), o), pn = build_dressing(q, np.ids(), o);
  if (!pm.q_built && !pm.s_built) return {skipped("second fusion dressing " + sizes(m, np), anchor, pm.note)};
  Word lm = build_L(q, m.ids()), ln = build_L(q, np.ids());
  auto tilde = [](const DressingPair& p, const Word& l, const IndexSet& legs) {
    DressingPair t = p;
    if (p.q_built) t.Q = l * p.Q * inverse_on(l, legs);
    return t;
  };
  auto tm = tilde(pm, lm, m), tn = tilde(pn, ln, np);
  Fuser f(q);
  auto data = f.second(m, np);
  IndexSet legs = m.concat(np);
  auto spec = dressing_spec(q, o);
  auto rels = constraint_system(q.regime, data, tm, tn, m, np);
  auto out = run_system(rels, tm, tn, "second fusion dressing constraint " + sizes(m, np) + " ", anchor, legs, spec,
                        s, k);
  Word ttm = dress(tm, lm * fuse_T(f, sol.T, m.ids())), ttn = dress(tn, ln * fuse_T(f, sol.T, np.ids()));
  auto [lhs, rhs] = exchange_sides(q.regime, data, ttm, ttn, m, np);
  out.push_back(word_identity("dressed L_M T_M satisfies the second fused exchange relation " + sizes(m, np), anchor,
                              lhs, rhs, legs, spec, s, k));
  return out;
}

std::vector<Check> check_classical_dressing(int n, int m_size, Sampler& s) {
  auto e = make_identity(Regime::Nondynamical, n);
  IndexSet m = IndexSet::range(1, m_size, n);
  auto p = build_dressing(e.q, m.ids());
  Word perms;
  auto swap = constant_matrix("P", swap_operator<ExactScalar>(IndexSet::range(0, 2, n), 0, 1), e.q.params);
  for (int a = 0; a + 1 < m_size; ++a) perms *= Word::factor(swap, {a + 1, a + 2});
  const std::string anchor = "classical limit of the dressing";
  std::string tag = " (|M|=" + std::to_string(m_size) + ")";
  return {word_identity("trivial structure matrices give Q_M = P_12 P_23 ..." + tag, anchor, p.Q, perms, m,
                        e.q.sample_spec(), s, 2),
          word_identity("trivial structure matrices give S_M = P_12 P_23 ..." + tag, anchor, p.S, perms, m,
                        e.q.sample_spec(), s, 2)};
}

}  // namespace qexch
