#include "qexch/fusion.hpp"

#include <algorithm>
#include <numeric>

#include "qexch/errors.hpp"

namespace qexch {

std::string role_name(Role r) {
  switch (r) {
    case Role::A: return "A";
    case Role::B: return "B";
    case Role::C: return "C";
    case Role::D: return "D";
  }
  return "?";
}

LegSeq reversed(const LegSeq& s) { return {s.rbegin(), s.rend()}; }

namespace {

enum class Shift { None, Rest, Head };

// (row-first, row-rest, col-first, col-rest)
using Rule = std::array<Shift, 4>;

Rule shift_rule(Regime regime, Role r) {
  constexpr Shift N = Shift::None, R = Shift::Rest, H = Shift::Head;
  if (regime == Regime::Nondynamical) return {N, N, N, N};
  if (regime == Regime::Semidynamical) {
    switch (r) {
      case Role::A: return {N, N, N, N};
      case Role::B: return {N, H, N, N};
      case Role::C: return {N, N, N, H};
      case Role::D: return {N, H, R, N};
    }
  }
  switch (r) {
    case Role::A: return {R, N, N, H};
    case Role::B: return {N, H, R, N};
    case Role::C: return {R, N, N, H};
    case Role::D: return {N, H, R, N};
  }
  return {N, N, N, N};
}

LegSeq tail(const LegSeq& s) { return {s.begin() + 1, s.end()}; }

nlohmann::json leg_names(const LegSeq& s) {
  auto j = nlohmann::json::array();
  for (LegId id : s) j.push_back(leg_name(id));
  return j;
}

Word single(const DynPtr& x, LegId a) { return Word::factor(x, {a}); }
Word pair(const DynPtr& x, LegId a, LegId b) { return Word::factor(x, {a, b}); }

LegSeq before(const LegSeq& s, std::size_t i) { return {s.begin(), s.begin() + static_cast<long>(i)}; }
LegSeq after(const LegSeq& s, std::size_t i) { return {s.begin() + static_cast<long>(i) + 1, s.end()}; }

LegSeq join(LegSeq a, const LegSeq& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<int> slot_range(int first, int count) {
  std::vector<int> v(static_cast<std::size_t>(count));
  std::iota(v.begin(), v.end(), first);
  return v;
}

std::string sizes(const IndexSet& m, const IndexSet& np) {
  return "(|M|=" + std::to_string(m.size()) + ", |N'|=" + std::to_string(np.size()) + ")";
}

Check skipped(std::string name, std::string anchor, std::string why) {
  Check c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.status = Status::Skipped;
  c.witness = std::move(why);
  return c;
}

}  // namespace

DynPtr role_matrix(const StructureQuadruple& q, Role r) {
  switch (r) {
    case Role::A: return q.A;
    case Role::B: return q.B;
    case Role::C: return q.C;
    case Role::D: return q.D;
  }
  return nullptr;
}

DynPtr Fuser::matrix(Role r) const { return role_matrix(q_, r); }

Fuser::Step Fuser::step(Role r, const LegSeq& p, const LegSeq& q, Split split) const {
  Step s;
  s.by_row = (split == Split::Row && p.size() > 1) || q.size() == 1;
  Rule rule = shift_rule(q_.regime, r);
  Shift first = s.by_row ? rule[0] : rule[2];
  Shift rest = s.by_row ? rule[1] : rule[3];
  if (s.by_row) {
    s.first_p = {p[0]};
    s.first_q = q;
    s.rest_p = tail(p);
    s.rest_q = q;
  } else {
    s.first_p = p;
    s.first_q = {q[0]};
    s.rest_p = p;
    s.rest_q = tail(q);
  }
  const LegSeq& rest_legs = s.by_row ? s.rest_p : s.rest_q;
  LegSeq head = s.by_row ? LegSeq{p[0]} : LegSeq{q[0]};
  if (first == Shift::Rest) s.first_shift = rest_legs;
  if (rest == Shift::Head) s.rest_shift = head;
  return s;
}

Word Fuser::structure(Role r, const LegSeq& p, const LegSeq& q, Split split) {
  if (p.empty() || q.empty()) throw LegError("fused structure matrix needs two nonempty sequences");
  if (p.size() == 1 && q.size() == 1) return pair(matrix(r), p[0], q[0]);
  auto key = std::make_tuple(static_cast<int>(r), p, q, static_cast<int>(split));
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  Step s = step(r, p, q, split);
  Word w = structure(r, s.first_p, s.first_q, split).shifted(s.first_shift) *
           structure(r, s.rest_p, s.rest_q, split).shifted(s.rest_shift);
  memo_.emplace(key, w);
  return w;
}

nlohmann::json Fuser::provenance(Role r, const LegSeq& p, const LegSeq& q, Split split) const {
  nlohmann::json node = {{"matrix", role_name(r)}, {"P", leg_names(p)}, {"Q", leg_names(q)}};
  if (p.size() == 1 && q.size() == 1) return node;
  Step s = step(r, p, q, split);
  node["split"] = s.by_row ? "row" : "col";
  node["first"] = {{"shift", leg_names(s.first_shift)}, {"node", provenance(r, s.first_p, s.first_q, split)}};
  node["rest"] = {{"shift", leg_names(s.rest_shift)}, {"node", provenance(r, s.rest_p, s.rest_q, split)}};
  return node;
}

ExchangeData Fuser::first(const IndexSet& m, const IndexSet& np) {
  LegSeq ms = m.ids(), ns = np.ids();
  return {structure(Role::A, ms, reversed(ns)), structure(Role::B, ms, ns), structure(Role::C, ms, ns),
          structure(Role::D, ms, reversed(ns))};
}

ExchangeData Fuser::second(const IndexSet& m, const IndexSet& np) {
  LegSeq ms = m.ids(), ns = np.ids();
  return {structure(Role::A, reversed(ms), ns), structure(Role::B, ms, reversed(ns)),
          structure(Role::C, reversed(ms), ns), structure(Role::D, ms, reversed(ns))};
}

Word fuse_T(Fuser& f, const DynPtr& t, const LegSeq& m) {
  if (m.empty()) throw LegError("fused solution needs a nonempty leg sequence");
  if (m.size() == 1) return single(t, m[0]);
  LegSeq head{m[0]}, rest = tail(m);
  Word b = f.structure(Role::B, head, rest);
  Word t1 = single(t, m[0]);
  Word t0 = fuse_T(f, t, rest);
  switch (f.quadruple().regime) {
    case Regime::Nondynamical: return t1 * b * t0;
    case Regime::Semidynamical: return t1 * b * t0.shifted(head);
    case Regime::Fullydynamical: return t1.shifted(rest) * b * t0.shifted(head);
  }
  throw StructuralError("unknown regime");
}

nlohmann::json fuse_T_provenance(const Fuser& f, const DynPtr& t, const LegSeq& m) {
  nlohmann::json node = {{"solution", t->name()}, {"M", leg_names(m)}};
  if (m.size() <= 1) return node;
  LegSeq head{m[0]}, rest = tail(m);
  Regime r = f.quadruple().regime;
  node["factors"] = nlohmann::json::array(
      {{{"solution", leg_names(head)}, {"shift", leg_names(r == Regime::Fullydynamical ? rest : LegSeq{})}},
       {{"structure", f.provenance(Role::B, head, rest)}},
       {{"shift", leg_names(r == Regime::Nondynamical ? LegSeq{} : head)}, {"node", fuse_T_provenance(f, t, rest)}}});
  return node;
}

Word fuse_T_closed(const StructureQuadruple& q, const DynPtr& t, const LegSeq& m) {
  Word w;
  for (std::size_t i = 0; i < m.size(); ++i) {
    LegSeq lo = before(m, i), hi = after(m, i);
    switch (q.regime) {
      case Regime::Nondynamical: w *= single(t, m[i]); break;
      case Regime::Semidynamical: w *= single(t, m[i]).shifted(lo); break;
      case Regime::Fullydynamical: w *= single(t, m[i]).shifted(join(lo, hi)); break;
    }
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      Word b = pair(q.B, m[i], m[j]);
      if (q.regime == Regime::Semidynamical) b = b.shifted(lo);
      if (q.regime == Regime::Fullydynamical) b = b.shifted(join(lo, after(m, j)));
      w *= b;
    }
  }
  return w;
}

ExchangeData dual_of_fused(Regime r, const ExchangeData& s, const IndexSet& m, const IndexSet& np) {
  IndexSet legs = m.concat(np).without_spectral();
  auto ms = slot_range(0, static_cast<int>(m.size()));
  auto ns = slot_range(static_cast<int>(m.size()), static_cast<int>(np.size()));
  auto d = dual_maps(r,
                     {word_as_dynamical(s.A, legs, "A_MN"), word_as_dynamical(s.B, legs, "B_MN"),
                      word_as_dynamical(s.C, legs, "C_MN"), word_as_dynamical(s.D, legs, "D_MN")},
                     ms, ns);
  auto ids = legs.ids();
  return {Word::factor(d[0], ids), Word::factor(d[1], ids), Word::factor(d[2], ids), Word::factor(d[3], ids)};
}

Word build_L(const StructureQuadruple& q, const LegSeq& m) {
  Word w;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) w *= pair(q.A, m[i], m[j]);
  return w;
}

Word second_T_closed(const StructureQuadruple& q, const DynPtr& t, const LegSeq& m) {
  const bool semi = q.regime == Regime::Semidynamical;
  Word w;
  for (std::size_t i = 0; i < m.size(); ++i) {
    LegSeq lo = semi ? before(m, i) : LegSeq{};
    for (std::size_t j = i + 1; j < m.size(); ++j) w *= pair(q.A, m[i], m[j]).shifted(lo);
    w *= single(t, m[i]).shifted(lo);
    for (std::size_t j = m.size(); j-- > i + 1;) w *= pair(q.B, m[i], m[j]).shifted(lo);
  }
  return w;
}

Word dual_coupling(const StructureQuadruple& q, const IndexSet& m) {
  IndexSet legs = m.without_spectral();
  auto all = legs.ids();
  auto l = word_as_dynamical(build_L(q, all), legs, "L_M");
  auto slots = slot_range(0, static_cast<int>(m.size()));
  auto x = dyn_map(l, "(L_M^tM)^-1", [slots](const Matrix& a) {
    return inverse(partial_transpose(a, std::vector<LegId>(slots.begin(), slots.end())));
  });
  return Word::factor(x, all);
}

std::size_t total_dim(const std::vector<const IndexSet*>& sets) {
  std::size_t d = 1;
  for (const auto* s : sets) d *= s->dimension();
  return d;
}

void require_budget(const std::vector<const IndexSet*>& sets, std::size_t budget) {
  std::size_t d = total_dim(sets);
  if (d > budget)
    throw BudgetExceeded("total dimension " + std::to_string(d) + " exceeds budget " + std::to_string(budget));
}

std::vector<Check> check_split_agreement(const StructureQuadruple& q, const IndexSet& m, const IndexSet& np,
                                         Sampler& s, int k) {
  const std::string anchor = "fused structure recursion";
  Fuser f(q);
  LegSeq ms = m.ids(), ns = np.ids();
  IndexSet legs = m.concat(np);
  struct Req {
    Role r;
    LegSeq p, q;
    std::string label;
  };
  std::vector<Req> reqs = {{Role::A, ms, reversed(ns), "A_{M Nbar'}"}, {Role::B, ms, ns, "B_{M N'}"},
                           {Role::C, ms, ns, "C_{M N'}"},              {Role::D, ms, reversed(ns), "D_{M Nbar'}"},
                           {Role::A, reversed(ms), ns, "A_{Mbar N'}"}, {Role::B, ms, reversed(ns), "B_{M Nbar'}"},
                           {Role::C, reversed(ms), ns, "C_{Mbar N'}"}};
  std::vector<Check> out;
  auto spec = q.sample_spec();
  for (const auto& r : reqs) {
    Word row = f.structure(r.r, r.p, r.q, Split::Row);
    Word col = f.structure(r.r, r.p, r.q, Split::Col);
    Check c = word_identity("row and column recursions agree for " + r.label + " " + sizes(m, np), anchor, row, col,
                            legs, spec, s, k);
    c.detail = {{"row", f.provenance(r.r, r.p, r.q, Split::Row)}, {"col", f.provenance(r.r, r.p, r.q, Split::Col)}};
    out.push_back(std::move(c));
    if (q.regime == Regime::Nondynamical) {
      Word dbl;
      for (LegId a : r.p)
        for (LegId b : r.q) dbl *= pair(role_matrix(q, r.r), a, b);
      out.push_back(word_identity("recursion equals the double ordered product for " + r.label + " " + sizes(m, np),
                                  anchor, row, dbl, legs, spec, s, k));
    }
  }
  return out;
}

std::vector<Check> verify_fused_yb(const StructureQuadruple& q, const IndexSet& m, const IndexSet& np,
                                   const IndexSet& l, Sampler& s, int k, std::size_t budget) {
  require_budget({&m, &np, &l}, budget);
  const std::string anchor = "fused Yang-Baxter system";
  Fuser f(q);
  LegSeq M = m.ids(), N = np.ids(), L = l.ids();
  auto A = [&](const LegSeq& p, const LegSeq& r) { return f.structure(Role::A, p, reversed(r)); };
  auto B = [&](const LegSeq& p, const LegSeq& r) { return f.structure(Role::B, p, r); };
  auto C = [&](const LegSeq& p, const LegSeq& r) { return f.structure(Role::C, p, r); };
  auto D = [&](const LegSeq& p, const LegSeq& r) { return f.structure(Role::D, p, reversed(r)); };
  IndexSet legs = m.concat(np).concat(l);
  auto spec = q.sample_spec();
  std::string tag = " (|M|=" + std::to_string(m.size()) + ", |N'|=" + std::to_string(np.size()) +
                    ", |L''|=" + std::to_string(l.size()) + ")";
  std::vector<std::pair<std::string, std::pair<Word, Word>>> eqs;
  switch (q.regime) {
    case Regime::Nondynamical:
      eqs = {{"AAA", {A(M, N) * A(M, L) * A(N, L), A(N, L) * A(M, L) * A(M, N)}},
             {"ACC", {A(M, N) * C(M, L) * C(N, L), C(N, L) * C(M, L) * A(M, N)}},
             {"DDD", {D(M, N) * D(M, L) * D(N, L), D(N, L) * D(M, L) * D(M, N)}},
             {"DBB", {D(M, N) * B(M, L) * B(N, L), B(N, L) * B(M, L) * D(M, N)}}};
      break;
    case Regime::Semidynamical:
      eqs = {{"AAA", {A(M, N) * A(M, L) * A(N, L), A(N, L) * A(M, L) * A(M, N)}},
             {"ACC", {A(M, N) * C(M, L) * C(N, L), C(N, L) * C(M, L) * A(M, N).shifted(L)}},
             {"DDD", {D(M, N).shifted(L) * D(M, L) * D(N, L).shifted(M), D(N, L) * D(M, L).shifted(N) * D(M, N)}},
             {"DBB", {D(M, N) * B(M, L) * B(N, L).shifted(M), B(N, L) * B(M, L).shifted(N) * D(M, N)}}};
      break;
    case Regime::Fullydynamical:
      eqs = {{"AAA", {A(M, N) * A(M, L).shifted(N) * A(N, L), A(N, L).shifted(M) * A(M, L) * A(M, N).shifted(L)}},
             {"ACC", {A(M, N) * C(M, L).shifted(N) * C(N, L), C(N, L).shifted(M) * C(M, L) * A(M, N).shifted(L)}},
             {"DDD", {D(M, N).shifted(L) * D(M, L) * D(N, L).shifted(M), D(N, L) * D(M, L).shifted(N) * D(M, N)}},
             {"DBB",
              {D(M, N).shifted(L) * B(M, L) * B(N, L).shifted(M), B(N, L) * B(M, L).shifted(N) * D(M, N)}}};
      break;
  }
  std::vector<Check> out;
  for (auto& [name, sides] : eqs)
    out.push_back(word_identity("fused YB " + name + tag, anchor, sides.first, sides.second, legs, spec, s, k));
  return out;
}

std::vector<Check> check_fused_solutions(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m,
                                         const IndexSet& np, Sampler& s, int k, std::size_t budget) {
  require_budget({&m, &np}, budget);
  std::vector<Check> out;
  IndexSet legs = m.concat(np);
  auto spec = q.sample_spec();
  Fuser f(q);
  auto data = f.first(m, np);
  {
    Word tm = fuse_T(f, sol.T, m.ids()), tn = fuse_T(f, sol.T, np.ids());
    auto [lhs, rhs] = exchange_sides(q.regime, data, tm, tn, m, np);
    Check c = word_identity("fused exchange relation for T " + sizes(m, np), "fused exchange relation", lhs, rhs,
                            legs, spec, s, k);
    c.detail = {{"T_M", fuse_T_provenance(f, sol.T, m.ids())}};
    out.push_back(std::move(c));
  }
  if (sol.K) {
    Fuser fd(dual_structure(q));
    Word km = fuse_T(fd, sol.K, m.ids()), kn = fuse_T(fd, sol.K, np.ids());
    ExchangeData dual = q.regime == Regime::Fullydynamical ? fd.first(m, np) : dual_of_fused(q.regime, data, m, np);
    auto [lhs, rhs] = exchange_sides(q.regime, dual, km, kn, m, np);
    out.push_back(word_identity("fused dual exchange relation for K " + sizes(m, np), "fused dual exchange relation",
                                lhs, rhs, legs, spec, s, k));
  }
  return out;
}

Check check_T_closed_form(const StructureQuadruple& q, const DynPtr& t, const IndexSet& m, Sampler& s, int k) {
  Fuser f(q);
  return word_identity("fused " + t->name() + " equals its closed product (|M|=" + std::to_string(m.size()) + ")",
                       "closed product of the fused solution", fuse_T(f, t, m.ids()), fuse_T_closed(q, t, m.ids()), m,
                       q.sample_spec(), s, k);
}

std::vector<Check> check_kernel(const StructureQuadruple& q, const IndexSet& m, const IndexSet& np, Sampler& s, int k,
                                std::size_t budget) {
  const std::string anchor = "coupling matrix intertwining";
  if (q.regime == Regime::Fullydynamical)
    return {skipped("coupling matrix relations", anchor, "no coupling matrix in the fully dynamical regime")};
  require_budget({&m, &np}, budget);
  const bool semi = q.regime == Regime::Semidynamical;
  Fuser f(q);
  LegSeq M = m.ids(), N = np.ids();
  Word lm = build_L(q, M), ln = build_L(q, N);
  IndexSet legs = m.concat(np);
  auto spec = q.sample_spec();
  std::string tag = " " + sizes(m, np);
  std::vector<Check> out;
  out.push_back(word_identity("L_M A_{M Nbar'} = A_{Mbar Nbar'} L_M" + tag, anchor,
                              lm * f.structure(Role::A, M, reversed(N)),
                              f.structure(Role::A, reversed(M), reversed(N)) * lm, legs, spec, s, k));
  out.push_back(word_identity("L_N' A_{M Nbar'} = A_{M N'} L_N'" + tag, anchor,
                              ln * f.structure(Role::A, M, reversed(N)), f.structure(Role::A, M, N) * ln, legs, spec,
                              s, k));
  out.push_back(word_identity("L_N' B_{M N'} = B_{M Nbar'} L_N'" + tag, anchor, ln * f.structure(Role::B, M, N),
                              f.structure(Role::B, M, reversed(N)) * (semi ? ln.shifted(M) : ln), legs, spec, s, k));
  out.push_back(word_identity("L_M C_{M N'} = C_{Mbar N'} L_M" + tag, anchor, lm * f.structure(Role::C, M, N),
                              f.structure(Role::C, reversed(M), N) * (semi ? lm.shifted(N) : lm), legs, spec, s, k));
  return out;
}

std::vector<Check> check_second_fusion(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m,
                                       const IndexSet& np, Sampler& s, int k, std::size_t budget) {
  const std::string anchor = "second fusion";
  if (q.regime == Regime::Fullydynamical)
    return {skipped("second fusion", anchor, "no second fusion in the fully dynamical regime")};
  require_budget({&m, &np}, budget);
  std::vector<Check> out;
  auto spec = q.sample_spec();
  IndexSet legs = m.concat(np);
  Fuser f(q);
  LegSeq M = m.ids(), N = np.ids();
  Word ttm = build_L(q, M) * fuse_T(f, sol.T, M);
  Word ttn = build_L(q, N) * fuse_T(f, sol.T, N);
  out.push_back(word_identity("L_M T_M equals the interleaved closed product (|M|=" + std::to_string(m.size()) + ")",
                              anchor, ttm, second_T_closed(q, sol.T, M), m, spec, s, k));
  auto data = f.second(m, np);
  auto [lhs, rhs] = exchange_sides(q.regime, data, ttm, ttn, m, np);
  out.push_back(word_identity("second fused exchange relation for L_M T_M " + sizes(m, np), anchor, lhs, rhs, legs,
                              spec, s, k));
  if (sol.K) {
    Fuser fd(dual_structure(q));
    Word ktm = dual_coupling(q, m) * fuse_T(fd, sol.K, M);
    Word ktn = dual_coupling(q, np) * fuse_T(fd, sol.K, N);
    auto [dl, dr] = exchange_sides(q.regime, dual_of_fused(q.regime, data, m, np), ktm, ktn, m, np);
    out.push_back(word_identity("second fused dual exchange relation for (L_M^tM)^-1 K_M " + sizes(m, np), anchor, dl,
                                dr, legs, spec, s, k));
  }
  return out;
}

std::vector<Check> check_dual_of_fused(const StructureQuadruple& q, const IndexSet& m, const IndexSet& np, Sampler& s,
                                       int k, std::size_t budget) {
  require_budget({&m, &np}, budget);
  Fuser f(q), fd(dual_structure(q));
  auto lhs = fd.first(m, np);
  auto rhs = dual_of_fused(q.regime, f.first(m, np), m, np);
  IndexSet legs = m.concat(np);
  auto spec = q.sample_spec();
  const std::string anchor = "dual of the fused structure";
  std::string tag = " " + sizes(m, np);
  std::vector<Check> out;
  out.push_back(word_identity("fused dual A equals dual of fused A" + tag, anchor, lhs.A, rhs.A, legs, spec, s, k));
  out.push_back(word_identity("fused dual B equals dual of fused B" + tag, anchor, lhs.B, rhs.B, legs, spec, s, k));
  out.push_back(word_identity("fused dual C equals dual of fused C" + tag, anchor, lhs.C, rhs.C, legs, spec, s, k));
  out.push_back(word_identity("fused dual D equals dual of fused D" + tag, anchor, lhs.D, rhs.D, legs, spec, s, k));
  return out;
}

}  // namespace qexch
