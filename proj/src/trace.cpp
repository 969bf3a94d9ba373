#include "qexch/trace.hpp"

#include <chrono>
#include <numeric>

#include "qexch/errors.hpp"

namespace qexch {

namespace {

std::vector<std::size_t> positions_all(const IndexSet& legs) {
  std::vector<std::size_t> v(legs.size());
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

std::vector<int> slots_all(const IndexSet& legs) {
  std::vector<int> v(legs.size());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

ShiftVec zero_shift(int n) { return ShiftVec(static_cast<std::size_t>(n), 0); }

std::string leg_list(const IndexSet& legs) {
  std::string s = "{";
  for (std::size_t k = 0; k < legs.size(); ++k) s += (k ? "," : "") + leg_name(legs[k].id);
  return s + "}";
}

ShiftMatrix word_matrix(const Word& w, const IndexSet& legs, int n, const ExactScalar& gamma) {
  return ShiftMatrix::from_matrix(legs.without_spectral(), n, gamma,
                                  [w, legs](const LambdaPoint& l) { return evaluate(w, legs, l); });
}

// (K^{SC})^{t} on all legs, SC with sign +1.
ShiftMatrix k_sc_transposed(const Word& k, const IndexSet& legs, int n, const ExactScalar& gamma) {
  IndexSet base = legs.without_spectral();
  auto ksc = sl_sc(word_as_dynamical(k, base, "K_M"), slots_all(legs), ShiftMode::SC, 1);
  return ShiftMatrix::from_matrix(base, n, gamma, [ksc](const LambdaPoint& l) { return transpose(ksc->eval(l)); });
}

Hamiltonian make(const StructureQuadruple& q, const TraceSource& s, DifferenceOperator op, const std::string& route) {
  nlohmann::json recipe = s.recipe;
  recipe["route"] = route;
  return {q.regime, s.legs, std::move(op), recipe};
}

Check from_equality(std::string name, std::string anchor, const EqualityResult& r) {
  Check c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.samples = r.samples;
  c.status = r.equal ? Status::Pass : Status::Fail;
  if (r.witness) c.witness = r.witness->to_string();
  if (!r.diagnostic.empty()) c.witness += (c.witness.empty() ? "" : "; ") + r.diagnostic;
  return c;
}

DifferenceOperator single_leg_product(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m) {
  auto h = DifferenceOperator::constant(q.params.n, q.params.gamma, ExactScalar(1));
  for (std::size_t i = 0; i < m.size(); ++i) {
    IndexSet leg = m.subset({m[i].id});
    h = h * build_hamiltonian(q, trace_source(q, sol, leg)).op;
  }
  return h;
}

}  // namespace

IndexSet attach_spectral(const StructureQuadruple& q, const IndexSet& m, Sampler& sampler, bool equal) {
  if (!q.spectral) return m;
  if (equal) {
    auto u = sampler.spectral(1)[0];
    return m.with_spectral(std::vector<ExactScalar>(m.size(), u));
  }
  return m.with_spectral(sampler.spectral(m.size()));
}

TraceSource trace_source(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& legs,
                         const TraceOptions& o) {
  if (!sol.K) throw StructuralError("trace needs a dual solution K");
  Fuser f(q), fd(dual_structure(q));
  auto ids = legs.ids();
  TraceSource s{fuse_T(f, sol.T, ids), fuse_T(fd, sol.K, ids), legs, {}};
  s.recipe = {{"T", sol.T->name()}, {"K", sol.K->name()}, {"M", leg_list(legs)}, {"dressing", nullptr}};
  if (o.dress_T || o.dress_K) {
    auto p = build_dressing(q, ids, o.dressing);
    if (o.dress_T) s.T = p.Q * s.T * p.S;
    if (o.dress_K) s.K = transposed_on(p.Q, legs) * s.K * transposed_on(p.S, legs);
    s.recipe["dressing"] = {
        {"mode", dress_mode_name(o.dressing.mode)}, {"T", o.dress_T}, {"K", o.dress_K}, {"pair", p.provenance}};
  }
  return s;
}

Hamiltonian trace_nondyn(const StructureQuadruple& q, const TraceSource& s) {
  const int n = q.params.n;
  Word t = s.T, k = s.K;
  IndexSet legs = s.legs;
  auto op = DifferenceOperator(n, q.params.gamma, [t, k, legs, n](const LambdaPoint& l) {
    Matrix tm = evaluate(t, legs, l), km = evaluate(k, legs, l);
    ExactScalar acc;
    for (std::size_t a = 0; a < tm.dim(); ++a)
      for (std::size_t b = 0; b < tm.dim(); ++b) scalar_ops::add_product(acc, km(b, a), tm(b, a));
    ShiftExpansion e;
    accumulate(e, zero_shift(n), acc);
    return e;
  });
  return make(q, s, std::move(op), "Tr(K^t T)");
}

Hamiltonian trace_semidyn(const StructureQuadruple& q, const TraceSource& s) {
  const int n = q.params.n;
  const auto& g = q.params.gamma;
  IndexSet base = s.legs.without_spectral();
  auto op = (word_matrix(s.T, s.legs, n, g) * exp_D(base, n, g, 1) * k_sc_transposed(s.K, s.legs, n, g)).trace();
  return make(q, s, std::move(op), "Tr(T e^D (K^SC)^t)");
}

Hamiltonian trace_semidyn_diagonal(const StructureQuadruple& q, const TraceSource& s) {
  const int n = q.params.n;
  Word t = s.T, k = s.K;
  IndexSet legs = s.legs;
  auto op = DifferenceOperator(n, q.params.gamma, [t, k, legs, n](const LambdaPoint& l) {
    Matrix tm = evaluate(t, legs, l), km = evaluate(k, legs, l);
    MultiIndex mi(legs);
    auto all = positions_all(legs);
    ShiftExpansion e;
    for (std::size_t c = 0; c < tm.dim(); ++c) {
      ExactScalar acc;
      for (std::size_t a = 0; a < tm.dim(); ++a) scalar_ops::add_product(acc, tm(a, c), km(a, c));
      accumulate(e, weight_vector(mi, c, all, n), acc);
    }
    return e;
  });
  return make(q, s, std::move(op), "sum_c (T^t K)_cc S_mu(c)");
}

Hamiltonian trace_fullydyn(const StructureQuadruple& q, const TraceSource& s) {
  const int n = q.params.n;
  const auto& g = q.params.gamma;
  IndexSet base = s.legs.without_spectral();
  auto op = (exp_D(base, n, g, -1) * word_matrix(s.T, s.legs, n, g) * exp_D(base, n, g, 1) *
             k_sc_transposed(s.K, s.legs, n, g))
                .trace();
  return make(q, s, std::move(op), "Tr(e^-D T e^D (K^SC)^t)");
}

Hamiltonian trace_fullydyn_closed(const StructureQuadruple& q, const TraceSource& s) {
  const int n = q.params.n;
  ExactScalar gamma = q.params.gamma;
  Word t = s.T, k = s.K;
  IndexSet legs = s.legs;
  auto op = DifferenceOperator(n, gamma, [t, k, legs, n, gamma](const LambdaPoint& l) {
    MultiIndex mi(legs);
    auto all = positions_all(legs);
    std::map<ShiftVec, std::pair<Matrix, Matrix>> at;
    ShiftExpansion e;
    for (std::size_t a = 0; a < mi.size(); ++a) {
      ShiftVec mua = weight_vector(mi, a, all, n);
      auto it = at.find(mua);
      if (it == at.end()) {
        LambdaPoint p = l.shifted(weight_vector(mi, a, all, n, -1), gamma);
        it = at.emplace(mua, std::make_pair(evaluate(t, legs, p), evaluate(k, legs, p))).first;
      }
      const auto& [tm, km] = it->second;
      for (std::size_t b = 0; b < mi.size(); ++b) {
        ShiftVec nu = add_shift(weight_vector(mi, b, all, n), weight_vector(mi, a, all, n, -1));
        accumulate(e, nu, tm(a, b) * km(a, b));
      }
    }
    return e;
  });
  return make(q, s, std::move(op), "sum_ab T_ab K_ab (lambda - mu(a)) S_(mu(b)-mu(a))");
}

Hamiltonian build_hamiltonian(const StructureQuadruple& q, const TraceSource& s) {
  switch (q.regime) {
    case Regime::Nondynamical: return trace_nondyn(q, s);
    case Regime::Semidynamical: return trace_semidyn(q, s);
    case Regime::Fullydynamical: return trace_fullydyn(q, s);
  }
  throw StructuralError("unknown regime");
}

ExactScalar scalar_value(const Hamiltonian& h) {
  LambdaPoint origin{std::vector<ExactScalar>(static_cast<std::size_t>(h.op.n()))};
  auto e = h.op.at(origin);
  auto it = e.find(zero_shift(h.op.n()));
  return it == e.end() ? ExactScalar() : it->second;
}

Check check_trace_routes(const StructureQuadruple& q, const TraceSource& s, Sampler& sampler, int k) {
  const std::string name = "trace assembly routes agree on M=" + leg_list(s.legs);
  if (q.regime == Regime::Nondynamical) {
    Check c;
    c.name = name;
    c.anchor = "commuting traces";
    c.status = Status::Skipped;
    c.witness = "single route for constant traces";
    return c;
  }
  if (q.regime == Regime::Semidynamical)
    return from_equality(name, "semi-dynamical commuting traces",
                         diffop_equal(trace_semidyn(q, s).op, trace_semidyn_diagonal(q, s).op, sampler, k));
  return from_equality(name, "fully dynamical commuting traces",
                       diffop_equal(trace_fullydyn(q, s).op, trace_fullydyn_closed(q, s).op, sampler, k));
}

nlohmann::json commutation_to_json(const CommutationReport& r) {
  nlohmann::json j = {{"pair", r.pair}, {"samples", r.samples}, {"max_residual", r.max_residual}};
  j["runtime_ms"] = r.runtime_ms ? nlohmann::json(*r.runtime_ms) : nlohmann::json(nullptr);
  return j;
}

CommutationReport commute(const Hamiltonian& a, const Hamiltonian& b, std::string pair, Sampler& sampler, int k) {
  auto t0 = std::chrono::steady_clock::now();
  CommutationReport r;
  r.pair = std::move(pair);
  r.scalar = a.regime == Regime::Nondynamical && b.regime == Regime::Nondynamical;
  auto eq = diffop_equal(a.op * b.op, b.op * a.op, sampler, k);
  r.samples = eq.samples;
  r.equal = eq.equal;
  if (!eq.equal) r.max_residual = eq.witness ? eq.witness->to_string() : eq.diagnostic;
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Check commutation_check(const CommutationReport& r) {
  Check c;
  c.name = "[" + r.pair + "] = 0";
  c.anchor = "commuting traces";
  c.samples = r.samples;
  c.status = r.equal ? Status::Pass : Status::Fail;
  if (!r.equal) c.witness = r.max_residual;
  if (r.scalar) c.detail = {{"note", "constant traces commute trivially"}};
  return c;
}

Check check_decoupling(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m, Sampler& sampler,
                       int k) {
  IndexSet legs = attach_spectral(q, m, sampler, false);
  auto hm = build_hamiltonian(q, trace_source(q, sol, legs)).op;
  return from_equality("undressed H_M equals the product of single-leg traces (|M|=" + std::to_string(m.size()) + ")",
                       "decoupling of undressed traces", diffop_equal(hm, single_leg_product(q, sol, legs), sampler, k));
}

Check check_nontrivial(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m,
                       const TraceOptions& o, Sampler& sampler, int k) {
  IndexSet legs = attach_spectral(q, m, sampler, q.spectral && o.dressing.formal);
  auto hm = build_hamiltonian(q, trace_source(q, sol, legs, o)).op;
  auto r = diffop_equal(hm, single_leg_product(q, sol, legs), sampler, k);
  Check c;
  c.name = "dressed H_M differs from the product of single-leg traces (|M|=" + std::to_string(m.size()) + ", " +
           dress_mode_name(o.dressing.mode) + " dressing of" + (o.dress_T ? " T" : "") + (o.dress_K ? " K" : "") + ")";
  c.anchor = "non-triviality of dressed traces";
  c.samples = r.samples;
  c.status = r.equal ? Status::Fail : Status::Pass;
  c.witness = r.equal ? "dressed and undressed traces agree at every sample" : r.witness ? r.witness->to_string() : "";
  return c;
}

Check check_identification(const StructureQuadruple& q, const SolutionEntry& sol, const IndexSet& m,
                           const DressOptions& o, Sampler& sampler, int k) {
  const std::string name = "AD and DKM dressed traces agree (|M|=" + std::to_string(m.size()) + ")";
  const std::string anchor = "identification of the two fusion procedures";
  if (q.regime == Regime::Fullydynamical) {
    Check c;
    c.name = name;
    c.anchor = anchor;
    c.status = Status::Skipped;
    c.witness = "no second fusion in the fully dynamical regime";
    return c;
  }
  IndexSet legs = attach_spectral(q, m, sampler, q.spectral && o.formal);
  DressOptions force = o;
  force.formal = true;
  auto ids = legs.ids();
  auto p = build_dressing(q, ids, force);
  Fuser f(q), fd(dual_structure(q));
  Word t = fuse_T(f, sol.T, ids), kk = fuse_T(fd, sol.K, ids), l = build_L(q, ids);
  TraceSource ad{p.Q * t * p.S, kk, legs, {{"pipeline", "AD"}}};
  Word qt = l * p.Q * inverse_on(l, legs);
  TraceSource dkm{qt * (l * t) * p.S, dual_coupling(q, legs) * kk, legs, {{"pipeline", "DKM"}}};
  auto r = diffop_equal(build_hamiltonian(q, dkm).op, build_hamiltonian(q, ad).op, sampler, k);
  Check c = from_equality(name, anchor, r);
  c.detail = {{"dressing", p.provenance}, {"spectral", legs.to_string()}};
  return c;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(std::vector<std::vector<ExactScalar>>& rows, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][c].is_zero()) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    ExactScalar inv = ExactScalar(1) / rows[r][c];
    for (auto& x : rows[r]) x *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c].is_zero()) continue;
      ExactScalar f = rows[i][c];
      for (std::size_t j = 0; j < cols; ++j) rows[i][j] -= f * rows[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  rows.resize(r);
  return pivots;
}

Check dual_relation_check(const StructureQuadruple& q, const DynPtr& k, Sampler& sampler, int samples,
                          std::string name) {
  return check_base_exchange(dual_structure(q), k, sampler, samples, std::move(name), "dual exchange relation");
}

}  // namespace

nlohmann::json dual_candidate_screen(const StructureQuadruple& q, const std::string& ansatz, Sampler& sampler,
                                     int samples, const std::optional<Matrix>& user_k) {
  const int n = q.params.n;
  IndexSet one = IndexSet::range(0, 1, n);
  nlohmann::json out = {{"quadruple", q.name}, {"regime", regime_name(q.regime)}, {"ansatz", ansatz}};
  if (ansatz == "identity" || ansatz == "file") {
    if (ansatz == "file" && !user_k) throw StructuralError("file ansatz needs a matrix");
    Matrix km = ansatz == "identity" ? Matrix::identity(one) : user_k->with_legs(one);
    if (km.is_zero()) {
      out["outcome"] = "excluded";
      out["note"] = "the zero matrix satisfies the relation trivially";
      return out;
    }
    auto c = dual_relation_check(q, constant_matrix("K", km, q.params), sampler, samples, "dual relation for " + ansatz);
    out["samples"] = c.samples;
    out["outcome"] = c.status == Status::Pass ? "solves" : "fails";
    if (!c.witness.empty()) out["witness"] = c.witness;
    return out;
  }
  if (ansatz != "constant-diagonal") throw StructuralError("unknown ansatz '" + ansatz + "'");
  // residual(k) = sum_{i,j} k_i k_j R_ij is linear in the monomials y_ij = k_i k_j (i <= j)
  auto dq = dual_structure(q);
  IndexSet m = IndexSet::range(1, 1, n), np = IndexSet::range(101, 1, n);
  ExchangeData s{Word::factor(dq.A, {1, 101}), Word::factor(dq.B, {1, 101}), Word::factor(dq.C, {1, 101}),
                 Word::factor(dq.D, {1, 101})};
  std::vector<DynPtr> e;
  for (int i = 0; i < n; ++i)
    e.push_back(constant_matrix("E" + std::to_string(i), elementary<ExactScalar>({0, n}, i, i), q.params));
  std::vector<std::pair<int, int>> mono;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) mono.emplace_back(i, j);
  IndexSet legs = m.concat(np);
  SampleSpec spec = q.sample_spec();
  std::vector<std::vector<ExactScalar>> rows;
  int used = 0, attempts = 0;
  while (used < samples) {
    if (++attempts > samples + 200) throw PoleError("dual screen: too many singular sample points");
    SamplePoint p = draw_point(spec, sampler, legs.size());
    IndexSet target = p.attach(legs);
    try {
      std::vector<std::vector<Matrix>> r(static_cast<std::size_t>(n), std::vector<Matrix>(static_cast<std::size_t>(n)));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          auto [lhs, rhs] = exchange_sides(q.regime, s, Word::factor(e[i], {1}), Word::factor(e[j], {101}), m, np);
          r[i][j] = evaluate(lhs, target, p.lambda) - evaluate(rhs, target, p.lambda);
        }
      std::size_t d = legs.dimension();
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
          std::vector<ExactScalar> row;
          for (auto [i, j] : mono) row.push_back(i == j ? r[i][j](a, b) : r[i][j](a, b) + r[j][i](a, b));
          bool nonzero = false;
          for (const auto& x : row) nonzero = nonzero || !x.is_zero();
          if (nonzero) rows.push_back(std::move(row));
        }
      ++used;
    } catch (const PoleError&) {
    }
  }
  auto pivots = rref(rows, mono.size());
  auto name = [&](std::size_t c) {
    return "k" + std::to_string(mono[c].first + 1) + "*k" + std::to_string(mono[c].second + 1);
  };
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& row : rows) {
    std::string t;
    for (std::size_t c = 0; c < mono.size(); ++c) {
      if (row[c].is_zero()) continue;
      t += (t.empty() ? "" : " + ") + ("(" + row[c].to_string() + ")" + name(c));
    }
    eqs.push_back(t + " = 0");
  }
  out["samples"] = used;
  out["monomials"] = mono.size();
  out["independent_equations"] = eqs;
  bool identity_solves = true;
  for (const auto& row : rows) {
    ExactScalar sum;
    for (const auto& x : row) sum += x;
    identity_solves = identity_solves && sum.is_zero();
  }
  out["identity_solves"] = identity_solves;
  if (rows.empty()) {
    out["outcome"] = "every constant diagonal K solves";
  } else if (pivots.size() == mono.size()) {
    out["outcome"] = "no nonzero constant diagonal K solves";
  } else {
    out["outcome"] = "solutions are the diagonal K whose monomials satisfy the listed equations";
  }
  return out;
}

}  // namespace qexch
