#include "qexch/catalog.hpp"

#include <array>
#include <map>

#include "qexch/matrix_io.hpp"

namespace qexch {

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::Nondynamical: return "nondynamical";
    case Regime::Semidynamical: return "semidynamical";
    case Regime::Fullydynamical: return "fullydynamical";
  }
  return "unknown";
}

Regime parse_regime(const std::string& text) {
  if (text == "nondynamical" || text == "nondyn") return Regime::Nondynamical;
  if (text == "semidynamical" || text == "semi") return Regime::Semidynamical;
  if (text == "fullydynamical" || text == "fully") return Regime::Fullydynamical;
  throw StructuralError("unknown regime '" + text + "'");
}

SampleSpec StructureQuadruple::sample_spec(bool equal_spectral) const {
  return SampleSpec{params.n, params.gamma, spectral, equal_spectral};
}

namespace {

IndexSet slots(int arity, int n) { return IndexSet::range(0, arity, n); }

std::size_t at(int n, int i, int k) { return static_cast<std::size_t>(i * n + k); }

// adds c to the coefficient of E_ij (x) E_kl
void add2(Matrix& m, int n, int i, int j, int k, int l, const ExactScalar& c) { m(at(n, i, k), at(n, j, l)) += c; }

Matrix id2(int n) { return Matrix::identity(slots(2, n)); }
Matrix swap2(int n) { return swap_operator<ExactScalar>(slots(2, n), 0, 1); }

Matrix rational_r(int n, const ExactScalar& u) {
  return scalar_mul(u, id2(n)) + scalar_mul(ExactScalar::i(), swap2(n));
}

Matrix antidiagonal(int n) {
  Matrix u(slots(1, n));
  for (int k = 0; k < n; ++k) u(static_cast<std::size_t>(k), static_cast<std::size_t>(n - 1 - k)) = 1;
  return u;
}

Matrix on_first(const Matrix& u, int n) {
  return kron(u.with_legs(IndexSet::range(0, 1, n)), Matrix::identity(IndexSet::range(1, 1, n)));
}

ExactScalar rho(int n) { return ExactScalar::rational(n, 2); }
ExactScalar zeta(const ExactScalar& l) { return (l + ExactScalar::i()) * (ExactScalar::i() - l); }
ExactScalar zeta_prime(int n, const ExactScalar& l) {
  ExactScalar ir = ExactScalar::i() * rho(n);
  return (ir - l) * (l + ir);
}

Matrix rbar(int n, const Matrix& u1, const ExactScalar& l) {
  Matrix r = rational_r(n, ExactScalar(0) - l - ExactScalar::i() * rho(n));
  return u1 * partial_transpose(r, {1}) * u1;
}

ExactScalar diff(const LambdaPoint& l, int i, int j) {
  return l.coords[static_cast<std::size_t>(i)] - l.coords[static_cast<std::size_t>(j)];
}

Matrix rs_a(int n, const ExactScalar& g, const LambdaPoint& l) {
  Matrix m = id2(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      ExactScalar c = g / diff(l, i, j);
      add2(m, n, i, i, j, j, c);
      add2(m, n, i, i, j, i, -c);
      add2(m, n, i, j, j, j, -c);
      add2(m, n, i, j, j, i, c);
    }
  return m;
}

Matrix rs_b(int n, const ExactScalar& g, const LambdaPoint& l) {
  Matrix m = id2(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      ExactScalar c = g / (diff(l, i, j) - g);
      add2(m, n, j, j, i, i, c);
      add2(m, n, j, j, i, j, -c);
    }
  return m;
}

Matrix rs_d(int n, const ExactScalar& g, const LambdaPoint& l) {
  Matrix m = id2(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      ExactScalar c = g / diff(l, i, j);
      add2(m, n, i, i, j, j, -c);
      add2(m, n, i, j, j, i, c);
    }
  return m;
}

Matrix rs_t(int n, const ExactScalar& gt, const LambdaPoint& l) {
  Matrix m(slots(1, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ExactScalar num(1), den(1);
      for (int a = 0; a < n; ++a) {
        if (a != i) num *= diff(l, a, j) + gt;
        if (a != j) den *= diff(l, a, j);
      }
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = num / den;
    }
  return m;
}

DynParams params_for(int n, ExactScalar gamma) {
  if (n < 2) throw std::invalid_argument("leg dimension n must be at least 2");
  DynParams p;
  p.n = n;
  p.gamma = std::move(gamma);
  return p;
}

DynPtr spectral2(std::string name, const DynParams& p, std::function<Matrix(const Spectral&)> f) {
  return make_dynamical(std::move(name), 2, p, [f](const LambdaPoint&, const Spectral& s) { return f(s); }, {},
                        false, true);
}

DynPtr constant1(std::string name, const Matrix& m, const DynParams& p) { return constant_matrix(std::move(name), m, p); }

Word f2(const DynPtr& x, LegId a, LegId b) { return Word::factor(x, {a, b}); }

// Pointwise check on two spectral values; body gets (u1, u2).
Check spectral_identity(std::string name, std::string anchor, int n, Sampler& sampler, int k,
                        std::function<std::optional<std::string>(const ExactScalar&, const ExactScalar&)> body) {
  SampleSpec spec{n, ExactScalar(1), true, false};
  return run_pointwise(std::move(name), std::move(anchor), spec, sampler, k, 2,
                       [&](const SamplePoint& p) { return body(p.spectral[0], p.spectral[1]); });
}

std::optional<std::string> compare(const Matrix& x, const Matrix& y) {
  auto w = first_difference(x, y);
  if (w) return w->to_string();
  return std::nullopt;
}

}  // namespace

CatalogEntry make_yangian(int n) {
  DynParams p = params_for(n, 1);
  auto r = spectral2("R(u1-u2)", p, [n](const Spectral& s) { return rational_r(n, s[0] - s[1]); });
  auto id = constant_matrix("Id", id2(n), p);
  CatalogEntry e;
  e.q = StructureQuadruple{"yangian", Regime::Nondynamical, p, true, r, id, id, r};
  e.q.metadata = {{"catalog", "yangian"},
                  {"unitarity", {{"alpha", "zeta(u1-u2)"}, {"beta", "zeta(u1-u2)"}, {"gamma_c", "1"}}}};
  Matrix t(slots(1, n)), k(slots(1, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      t(si, sj) = 1 + i + 2 * j + (i == j ? 3 : 0);
      k(si, sj) = (i == j ? 2 + i : 0) + (i + 1 == j ? 1 : 0);
    }
  e.solution = {constant1("T", t, p), constant1("K", k, p)};
  return e;
}

CatalogEntry make_kulish_sklyanin(int n) {
  DynParams p = params_for(n, 1);
  auto a = spectral2("R(u1-u2)", p, [n](const Spectral& s) { return rational_r(n, s[0] - s[1]); });
  auto b = spectral2("P R(u1+u2) P", p, [n](const Spectral& s) {
    return swap2(n) * rational_r(n, s[0] + s[1]) * swap2(n);
  });
  auto c = spectral2("R(u1+u2)", p, [n](const Spectral& s) { return rational_r(n, s[0] + s[1]); });
  auto d = spectral2("P R(u1-u2) P", p, [n](const Spectral& s) {
    return swap2(n) * rational_r(n, s[0] - s[1]) * swap2(n);
  });
  CatalogEntry e;
  e.q = StructureQuadruple{"kulish-sklyanin", Regime::Nondynamical, p, true, a, b, c, d};
  e.q.metadata = {{"catalog", "kulish-sklyanin"},
                  {"unitarity", {{"alpha", "zeta(u1-u2)"}, {"beta", "zeta(u1-u2)"}, {"gamma_c", "1"}}}};
  auto t = make_dynamical(
      "5/2 + u G", 1, p,
      [n](const LambdaPoint&, const Spectral& s) {
        Matrix m(slots(1, n));
        for (int k = 0; k < n; ++k) {
          ExactScalar g = (k % 2 == 0) ? 1 : -1;
          m(static_cast<std::size_t>(k), static_cast<std::size_t>(k)) = ExactScalar::rational(5, 2) + g * s[0];
        }
        return m;
      },
      {}, false, true);
  e.solution = {t, constant1("U", antidiagonal(n), p)};
  return e;
}

CatalogEntry make_twisted_yangian(int n, std::optional<Matrix> U) {
  DynParams p = params_for(n, 1);
  Matrix u = U ? U->with_legs(slots(1, n)) : antidiagonal(n);
  if (!(u * u == Matrix::identity(slots(1, n)))) throw std::invalid_argument("twisted Yangian: U^2 != Id");
  Matrix u1 = on_first(u, n);
  auto a = spectral2("R(u1-u2)", p, [n](const Spectral& s) { return rational_r(n, s[0] - s[1]); });
  auto b = spectral2("P Rbar(u1+u2) P", p, [n, u1](const Spectral& s) {
    return swap2(n) * rbar(n, u1, s[0] + s[1]) * swap2(n);
  });
  auto c = spectral2("Rbar(u1+u2)", p, [n, u1](const Spectral& s) { return rbar(n, u1, s[0] + s[1]); });
  auto d = spectral2("P R(u1-u2) P", p, [n](const Spectral& s) {
    return swap2(n) * rational_r(n, s[0] - s[1]) * swap2(n);
  });
  CatalogEntry e;
  e.q = StructureQuadruple{"twisted-yangian", Regime::Nondynamical, p, true, a, b, c, d};
  e.q.metadata = {{"catalog", "twisted-yangian"},
                  {"U", matrix_to_json(u)},
                  {"rho", scalar_to_json(rho(n))},
                  {"unitarity", {{"alpha", "zeta(u1-u2)"}, {"beta", "zeta(u1-u2)"}, {"gamma_c", "1"}}}};
  e.solution = {constant1("U", u, p), constant1("Id", Matrix::identity(slots(1, n)), p)};

  e.identities = [n, u, u1, a, b, c, d](Sampler& s, int k) {
    std::vector<Check> out;
    const ExactScalar i = ExactScalar::i();
    const ExactScalar ir = i * rho(n);
    const Matrix P = swap2(n);
    const Matrix I2 = id2(n);
    out.push_back(Check{"U squares to the identity", "twisted Yangian, U^2 = 1",
                        u * u == Matrix::identity(slots(1, n)) ? Status::Pass : Status::Fail, "", 1});
    if (n == 2)
      out.push_back(spectral_identity("Rbar equals R at n = 2", "twisted Yangian, su(2) self-conjugacy", n, s, k,
                                      [&](const ExactScalar& l, const ExactScalar&) {
                                        return compare(rbar(n, u1, l), rational_r(n, l));
                                      }));
    out.push_back(spectral_identity("unitarity of R", "twisted Yangian, unitarity of R", n, s, k,
                                    [&](const ExactScalar& l, const ExactScalar&) {
                                      Matrix lhs = rational_r(n, l) * P * rational_r(n, ExactScalar(0) - l) * P;
                                      return compare(lhs, scalar_mul(zeta(l), I2));
                                    }));
    out.push_back(spectral_identity("unitarity of Rbar", "twisted Yangian, unitarity of Rbar", n, s, k,
                                    [&](const ExactScalar& l, const ExactScalar&) {
                                      Matrix lhs = rbar(n, u1, l) * P * rbar(n, u1, ExactScalar(0) - l) * P;
                                      return compare(lhs, scalar_mul(zeta_prime(n, l), I2));
                                    }));
    out.push_back(spectral_identity(
        "crossing-unitarity of R", "twisted Yangian, crossing-unitarity of R", n, s, k,
        [&](const ExactScalar& l, const ExactScalar&) {
          Matrix lhs = partial_transpose(rational_r(n, l), {0}) *
                       partial_transpose(rational_r(n, ExactScalar(0) - l - ir - ir), {1});
          return compare(lhs, scalar_mul(zeta_prime(n, l + ir), I2));
        }));
    out.push_back(spectral_identity(
        "crossing-unitarity of Rbar", "twisted Yangian, crossing-unitarity of Rbar (argument l + i rho)", n, s, k,
        [&](const ExactScalar& l, const ExactScalar&) {
          Matrix lhs = partial_transpose(rbar(n, u1, l), {0}) *
                       partial_transpose(rbar(n, u1, ExactScalar(0) - l - ir - ir), {1});
          return compare(lhs, scalar_mul(zeta(l + ir), I2));
        }));
    {
      auto literal = spectral_identity(
          "crossing-unitarity of Rbar, literal zeta(l)", "twisted Yangian, crossing-unitarity of Rbar with the factor at l", n,
          s, k, [&](const ExactScalar& l, const ExactScalar&) {
            Matrix lhs = partial_transpose(rbar(n, u1, l), {0}) *
                         partial_transpose(rbar(n, u1, ExactScalar(0) - l - ir - ir), {1});
            return compare(lhs, scalar_mul(zeta(l), I2));
          });
      literal.detail = {{"holds", literal.status == Status::Pass}};
      literal.status = Status::Info;
      out.push_back(literal);
    }
    out.push_back(spectral_identity(
        "Rbar rank-one form", "twisted Yangian, Rbar = (-l - i rho) + i Q with Q rank one", n, s, k,
        [&](const ExactScalar& l, const ExactScalar&) -> std::optional<std::string> {
          Matrix q = scalar_mul(ExactScalar(0) - i, rbar(n, u1, l) - scalar_mul(ExactScalar(0) - l - ir, I2));
          Matrix q0 = scalar_mul(ExactScalar(0) - i, rbar(n, u1, 0) - scalar_mul(ExactScalar(0) - ir, I2));
          if (auto w = compare(q, q0)) return "Q depends on l: " + *w;
          if (auto w = compare(q * q, scalar_mul(ExactScalar(n), q))) return "Q^2 != n Q: " + *w;
          std::size_t nonzero_rows = 0;
          for (std::size_t r = 0; r < q.dim(); ++r) {
            bool any = false;
            for (std::size_t c2 = 0; c2 < q.dim(); ++c2) any = any || !q(r, c2).is_zero();
            nonzero_rows += any;
          }
          if (nonzero_rows == 0) return std::string("Q vanishes");
          // rank one: every 2x2 minor vanishes
          for (std::size_t r1 = 0; r1 < q.dim(); ++r1)
            for (std::size_t r2 = r1 + 1; r2 < q.dim(); ++r2)
              for (std::size_t c1 = 0; c1 < q.dim(); ++c1)
                for (std::size_t c2 = c1 + 1; c2 < q.dim(); ++c2)
                  if (!(q(r1, c1) * q(r2, c2) - q(r1, c2) * q(r2, c1)).is_zero()) return std::string("rank > 1");
          return std::nullopt;
        }));
    auto dual_form = [&](std::string name, const DynPtr& x, std::function<Matrix(const Matrix&)> transform,
                         std::function<Matrix(const ExactScalar&, const ExactScalar&)> expected) {
      out.push_back(spectral_identity(std::move(name), "twisted Yangian, dual structure identification", n, s, k,
                                      [&](const ExactScalar& u1v, const ExactScalar& u2v) {
                                        return compare(transform(x->eval(LambdaPoint{}, {u1v, u2v})),
                                                       expected(u1v, u2v));
                                      }));
    };
    dual_form(
        "dual A", a, [](const Matrix& m) { return partial_transpose(inverse(m), {0, 1}); },
        [&](const ExactScalar& x, const ExactScalar& y) {
          return scalar_mul(ExactScalar(1) / zeta(x - y), rational_r(n, y - x));
        });
    dual_form(
        "dual B", b, [](const Matrix& m) { return partial_transpose(inverse(partial_transpose(m, {0})), {1}); },
        [&](const ExactScalar& x, const ExactScalar& y) {
          return scalar_mul(ExactScalar(1) / zeta(x + y + ir), rbar(n, u1, ExactScalar(0) - x - y - ir - ir));
        });
    dual_form(
        "dual C", c, [](const Matrix& m) { return partial_transpose(inverse(partial_transpose(m, {1})), {0}); },
        [&](const ExactScalar& x, const ExactScalar& y) {
          return scalar_mul(ExactScalar(1) / zeta(x + y + ir),
                            P * rbar(n, u1, ExactScalar(0) - x - y - ir - ir) * P);
        });
    dual_form(
        "dual D", d, [](const Matrix& m) { return inverse(partial_transpose(m, {0, 1})); },
        [&](const ExactScalar& x, const ExactScalar& y) {
          return scalar_mul(ExactScalar(1) / zeta(x - y), P * rational_r(n, y - x) * P);
        });
    return out;
  };
  return e;
}

namespace {

DynPtr rs_t_matrix(const DynParams& p, const ExactScalar& gt) {
  int n = p.n;
  return make_dynamical("T_RS", 1, p, [n, gt](const LambdaPoint& l, const Spectral&) { return rs_t(n, gt, l); });
}

}  // namespace

CatalogEntry make_rs_rational(int n, ExactScalar gamma, std::optional<ExactScalar> gamma_tilde) {
  DynParams p = params_for(n, gamma);
  auto a = make_dynamical("A_RS", 2, p, [n, gamma](const LambdaPoint& l, const Spectral&) { return rs_a(n, gamma, l); });
  auto b = make_dynamical(
      "B_RS", 2, p, [n, gamma](const LambdaPoint& l, const Spectral&) { return rs_b(n, gamma, l); }, {{0}, false});
  auto c = make_dynamical(
      "C_RS", 2, p,
      [n, gamma](const LambdaPoint& l, const Spectral&) { return exchange_roles(rs_b(n, gamma, l)); }, {{1}, false});
  auto d = make_dynamical(
      "D_RS", 2, p, [n, gamma](const LambdaPoint& l, const Spectral&) { return rs_d(n, gamma, l); }, {{}, true});
  CatalogEntry e;
  e.q = StructureQuadruple{"rs", Regime::Semidynamical, p, false, a, b, c, d};
  e.q.metadata = {{"catalog", "rs"}};

  nlohmann::json screening = nlohmann::json::array();
  ExactScalar pinned = gamma;
  if (gamma_tilde) {
    pinned = *gamma_tilde;
    screening.push_back({{"value", gamma_tilde->to_string()}, {"source", "given"}});
  } else {
    std::vector<ExactScalar> candidates = {gamma, ExactScalar(0) - gamma, ExactScalar::rational(7, 3), ExactScalar(0)};
    std::optional<ExactScalar> first_pass;
    for (const auto& gt : candidates) {
      Sampler probe(0x7e5);
      auto chk = check_base_exchange(e.q, rs_t_matrix(p, gt), probe, 3, "screen", "screen");
      screening.push_back({{"value", gt.to_string()}, {"exchange_residual_zero", chk.status == Status::Pass}});
      if (chk.status == Status::Pass && !first_pass) first_pass = gt;
    }
    if (first_pass) pinned = *first_pass;
  }
  p.extra["gamma_tilde"] = pinned;
  e.q.params = p;
  e.q.metadata["gamma_tilde"] = pinned.to_string();
  e.q.metadata["gamma_tilde_screening"] = screening;

  Matrix k(slots(1, n));
  const int diag[] = {2, 5, 11, 17, 23, 29};
  for (int i = 0; i < n; ++i) k(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = diag[i % 6];
  e.solution = {rs_t_matrix(p, pinned), constant1("K", k, p)};
  return e;
}

CatalogEntry make_fully_dynamical_rs(int n, ExactScalar gamma) {
  if (n != 2 && n != 3) throw std::invalid_argument("derived fully dynamical entry ships solutions for n = 2, 3 only");
  DynParams p = params_for(n, gamma);
  WeightTags total{{}, true};
  auto d = make_dynamical(
      "D_RS", 2, p, [n, gamma](const LambdaPoint& l, const Spectral&) { return rs_d(n, gamma, l); }, total);
  auto dpi = make_dynamical(
      "D_RS^pi", 2, p,
      [n, gamma](const LambdaPoint& l, const Spectral&) { return exchange_roles(rs_d(n, gamma, l)); }, total);
  CatalogEntry e;
  e.q = StructureQuadruple{"fully-rs", Regime::Fullydynamical, p, false, dpi, d, dpi, d};
  e.q.metadata = {{"catalog", "fully-rs"}, {"construction", "A = C = D_RS^pi, B = D = D_RS"}};
  Matrix t = Matrix::identity(slots(1, n));
  Matrix k(slots(1, n));
  if (n == 2) {
    t(0, 1) = 2;
    t(1, 0) = 3;
    k(0, 0) = 2;
    k(0, 1) = 4;
    k(1, 0) = 1;
    k(1, 1) = 2;
  } else {
    t(1, 0) = 2;
    k(1, 0) = 1;
  }
  e.solution = {constant1("T", t, p), constant1("K", k, p)};
  return e;
}

CatalogEntry make_identity(Regime r, int n, ExactScalar gamma) {
  DynParams p = params_for(n, gamma);
  Matrix id = id2(n);
  auto tagged = [&](std::string name, WeightTags tags) {
    return retag(constant_matrix(name, id, p), name, std::move(tags));
  };
  CatalogEntry e;
  if (r == Regime::Nondynamical) {
    auto x = constant_matrix("Id", id, p);
    e.q = StructureQuadruple{"identity", r, p, false, x, x, x, x};
  } else if (r == Regime::Semidynamical) {
    e.q = StructureQuadruple{"identity", r, p, false, tagged("Id", {}), tagged("Id", {{0}, false}),
                             tagged("Id", {{1}, false}), tagged("Id", {{}, true})};
  } else {
    auto x = tagged("Id", {{}, true});
    e.q = StructureQuadruple{"identity", r, p, false, x, x, x, x};
  }
  e.q.metadata = {{"catalog", "identity"}, {"unitarity", {{"alpha", "1"}, {"beta", "1"}, {"gamma_c", "1"}}}};
  auto one = constant1("Id", Matrix::identity(slots(1, n)), p);
  e.solution = {one, one};
  return e;
}

std::vector<std::string> catalog_names() {
  return {"yangian", "kulish-sklyanin", "twisted-yangian", "rs", "fully-rs", "identity"};
}

CatalogEntry catalog_entry(const std::string& name, int n, ExactScalar gamma, Regime identity_regime) {
  if (name == "yangian") return make_yangian(n);
  if (name == "kulish-sklyanin") return make_kulish_sklyanin(n);
  if (name == "twisted-yangian") return make_twisted_yangian(n);
  if (name == "rs") return make_rs_rational(n, gamma);
  if (name == "fully-rs") return make_fully_dynamical_rs(n, gamma);
  if (name == "identity") return make_identity(identity_regime, n, gamma);
  throw StructuralError("unknown catalog entry '" + name + "'");
}

namespace {

struct Role {
  const char* name;
  DynPtr StructureQuadruple::*member;
};
const Role kRoles[] = {{"A", &StructureQuadruple::A},
                       {"B", &StructureQuadruple::B},
                       {"C", &StructureQuadruple::C},
                       {"D", &StructureQuadruple::D}};

Check weight_check(const StructureQuadruple& q, const DynPtr& x, std::string name, std::string anchor,
                   std::function<WeightCheck(const Matrix&)> test, Sampler& s, int k) {
  return run_pointwise(std::move(name), std::move(anchor), q.sample_spec(), s, k, 2,
                       [&](const SamplePoint& p) -> std::optional<std::string> {
                         auto w = test(x->eval(p.lambda, p.spectral));
                         if (!w.pass) return w.witness;
                         return std::nullopt;
                       });
}

}  // namespace

std::vector<Check> check_regime(const StructureQuadruple& q, Sampler& s, int k) {
  std::vector<Check> out;
  for (const auto& role : kRoles) {
    const DynPtr& x = q.*role.member;
    if (!x || x->arity() != 2 || x->n() != q.params.n) {
      out.push_back(Check{std::string("shape of ") + role.name, "structure matrices act on two legs", Status::Fail,
                          "missing matrix or wrong arity/dimension", 0});
      return out;
    }
  }
  for (const auto& role : kRoles) {
    const DynPtr& x = q.*role.member;
    auto w = verify_weight_tags(*x, s, k);
    out.push_back(Check{std::string("declared weight tags of ") + role.name, "weight declarations are verified",
                        w.pass ? Status::Pass : Status::Fail, w.witness, k});
  }
  const IndexSet legs = IndexSet::range(1, 2, q.params.n);
  const Word id;
  if (q.regime == Regime::Nondynamical) {
    auto unit = [&](const DynPtr& x, std::string name) {
      return run_pointwise(name, "generalized unitarity", q.sample_spec(), s, k, 2,
                           [&](const SamplePoint& p) -> std::optional<std::string> {
                             Matrix m = evaluate(f2(x, 1, 2) * f2(x, 2, 1), p.attach(legs), p.lambda);
                             auto c = proportionality(m, Matrix::identity(legs));
                             if (!c || c->is_zero()) return std::string("X12 X21 is not a nonzero multiple of Id");
                             return std::nullopt;
                           });
    };
    out.push_back(unit(q.A, "A12 A21 proportional to Id"));
    out.push_back(unit(q.D, "D12 D21 proportional to Id"));
    std::optional<ExactScalar> gamma_c;
    out.push_back(run_pointwise("B12 proportional to C21", "generalized unitarity", q.sample_spec(), s, k, 2,
                                [&](const SamplePoint& p) -> std::optional<std::string> {
                                  IndexSet t = p.attach(legs);
                                  auto c = proportionality(evaluate(f2(q.B, 1, 2), t, p.lambda),
                                                           evaluate(f2(q.C, 2, 1), t, p.lambda));
                                  if (!c || c->is_zero()) return std::string("B12 is not a multiple of C21");
                                  if (gamma_c && *gamma_c != *c) return "ratio not constant: " + c->to_string();
                                  gamma_c = c;
                                  return std::nullopt;
                                }));
    out.push_back(run_pointwise("unitarity constants alpha gamma = beta / gamma", "generalized unitarity",
                                q.sample_spec(), s, k, 2, [&](const SamplePoint& p) -> std::optional<std::string> {
                                  IndexSet t = p.attach(legs);
                                  Matrix I = Matrix::identity(legs);
                                  auto alpha = proportionality(evaluate(f2(q.A, 1, 2) * f2(q.A, 2, 1), t, p.lambda), I);
                                  auto beta = proportionality(evaluate(f2(q.D, 1, 2) * f2(q.D, 2, 1), t, p.lambda), I);
                                  auto gc = proportionality(evaluate(f2(q.B, 1, 2), t, p.lambda),
                                                            evaluate(f2(q.C, 2, 1), t, p.lambda));
                                  if (!alpha || !beta || !gc || gc->is_zero()) return std::string("constants undefined");
                                  if (*alpha * *gc != *beta / *gc)
                                    return "alpha " + alpha->to_string() + ", beta " + beta->to_string() +
                                           ", gamma " + gc->to_string();
                                  return std::nullopt;
                                }));
  } else if (q.regime == Regime::Semidynamical) {
    out.push_back(weight_check(q, q.B, "B zero weight on leg 1", "semi-dynamical zero weight conditions",
                               [](const Matrix& m) { return check_slot_zero_weight(m, 0); }, s, k));
    out.push_back(weight_check(q, q.C, "C zero weight on leg 2", "semi-dynamical zero weight conditions",
                               [](const Matrix& m) { return check_slot_zero_weight(m, 1); }, s, k));
    out.push_back(weight_check(q, q.D, "D total zero weight", "semi-dynamical zero weight conditions (ZW)",
                               [](const Matrix& m) { return check_total_zero_weight(m, {0, 1}); }, s, k));
  } else {
    for (const auto& role : kRoles) {
      const DynPtr& x = q.*role.member;
      out.push_back(weight_check(q, x, std::string(role.name) + " total zero weight",
                                 "fully dynamical zero weight property",
                                 [](const Matrix& m) { return check_total_zero_weight(m, {0, 1}); }, s, k));
    }
    for (const auto& role : kRoles) {
      const DynPtr& x = q.*role.member;
      out.push_back(word_identity(std::string(role.name) + "12 " + role.name + "21 = Id",
                                  "fully dynamical unitarity", f2(x, 1, 2) * f2(x, 2, 1), id, legs,
                                  q.sample_spec(), s, k));
    }
  }
  return out;
}

std::vector<Check> verify_yb(const StructureQuadruple& q, Sampler& s, int k) {
  const IndexSet legs = IndexSet::range(1, 3, q.params.n);
  auto X = [](const DynPtr& x, LegId a, LegId b) { return f2(x, a, b); };
  auto H = [](const DynPtr& x, LegId a, LegId b, LegId h) { return f2(x, a, b).shifted(std::vector<LegId>{h}); };
  const auto& A = q.A;
  const auto& B = q.B;
  const auto& C = q.C;
  const auto& D = q.D;
  struct Eq {
    std::string name;
    Word lhs, rhs;
  };
  std::vector<Eq> eqs;
  std::string anchor;
  if (q.regime == Regime::Nondynamical) {
    anchor = "Yang-Baxter system";
    eqs = {{"AAA", X(A, 1, 2) * X(A, 1, 3) * X(A, 2, 3), X(A, 2, 3) * X(A, 1, 3) * X(A, 1, 2)},
           {"ACC", X(A, 1, 2) * X(C, 1, 3) * X(C, 2, 3), X(C, 2, 3) * X(C, 1, 3) * X(A, 1, 2)},
           {"DDD", X(D, 1, 2) * X(D, 1, 3) * X(D, 2, 3), X(D, 2, 3) * X(D, 1, 3) * X(D, 1, 2)},
           {"DBB", X(D, 1, 2) * X(B, 1, 3) * X(B, 2, 3), X(B, 2, 3) * X(B, 1, 3) * X(D, 1, 2)}};
  } else if (q.regime == Regime::Semidynamical) {
    anchor = "dynamical Yang-Baxter system";
    eqs = {{"AAA", X(A, 1, 2) * X(A, 1, 3) * X(A, 2, 3), X(A, 2, 3) * X(A, 1, 3) * X(A, 1, 2)},
           {"DDD", H(D, 1, 2, 3) * X(D, 1, 3) * H(D, 2, 3, 1), X(D, 2, 3) * H(D, 1, 3, 2) * X(D, 1, 2)},
           {"DBB", X(D, 1, 2) * X(B, 1, 3) * H(B, 2, 3, 1), X(B, 2, 3) * H(B, 1, 3, 2) * X(D, 1, 2)},
           {"ACC", X(A, 1, 2) * X(C, 1, 3) * X(C, 2, 3), X(C, 2, 3) * X(C, 1, 3) * H(A, 1, 2, 3)}};
  } else {
    anchor = "Gervais-Neveu-Felder system";
    eqs = {{"AAA", X(A, 1, 2) * H(A, 1, 3, 2) * X(A, 2, 3), H(A, 2, 3, 1) * X(A, 1, 3) * H(A, 1, 2, 3)},
           {"ACC", X(A, 1, 2) * H(C, 1, 3, 2) * X(C, 2, 3), H(C, 2, 3, 1) * X(C, 1, 3) * H(A, 1, 2, 3)},
           {"DDD", H(D, 1, 2, 3) * X(D, 1, 3) * H(D, 2, 3, 1), X(D, 2, 3) * H(D, 1, 3, 2) * X(D, 1, 2)},
           {"DBB", H(D, 1, 2, 3) * X(B, 1, 3) * H(B, 2, 3, 1), X(B, 2, 3) * H(B, 1, 3, 2) * X(D, 1, 2)}};
  }
  std::vector<Check> out;
  for (const auto& eq : eqs)
    out.push_back(word_identity("YB " + eq.name, anchor + ", " + eq.name, eq.lhs, eq.rhs, legs, q.sample_spec(), s, k));
  return out;
}

std::array<DynPtr, 4> dual_maps(Regime r, const std::array<DynPtr, 4>& x, const std::vector<int>& m,
                                const std::vector<int>& np) {
  std::vector<int> both = m;
  both.insert(both.end(), np.begin(), np.end());
  auto ids = [](const std::vector<int>& v) { return std::vector<LegId>(v.begin(), v.end()); };
  auto pt = [&](const Matrix& a, const std::vector<int>& v) { return partial_transpose(a, ids(v)); };
  const auto& [A, B, C, D] = x;
  if (r == Regime::Nondynamical) {
    return {dyn_map(A, "(A^-1)^t12", [=](const Matrix& a) { return pt(inverse(a), both); }),
            dyn_map(B, "((B^t1)^-1)^t2", [=](const Matrix& a) { return pt(inverse(pt(a, m)), np); }),
            dyn_map(C, "((C^t2)^-1)^t1", [=](const Matrix& a) { return pt(inverse(pt(a, np)), m); }),
            dyn_map(D, "(D^t12)^-1", [=](const Matrix& a) { return inverse(pt(a, both)); })};
  }
  if (r == Regime::Semidynamical) {
    return {dyn_map(A, "(A^-1)^t12", [=](const Matrix& a) { return pt(inverse(a), both); }),
            retag(dyn_map(B, "", [=](const Matrix& a) { return inverse(pt(a, np)); }), "(B^t2)^-1", {m, false}),
            retag(dyn_map(C, "", [=](const Matrix& a) { return inverse(pt(a, m)); }), "(C^t1)^-1", {np, false}),
            retag(dyn_map(D, "", [=](const Matrix& a) { return pt(inverse(a), both); }), "(D^-1)^t12", {{}, true})};
  }
  auto bar = [&](const DynPtr& y) { return sl_sc(y, both, ShiftMode::SL, -1); };
  auto tr = [](const DynPtr& y, const std::vector<int>& sl) { return dyn_partial_transpose(y, sl); };
  WeightTags total{{}, true};
  auto ad = tr(sl_sc(dyn_inverse(bar(A)), both, ShiftMode::SC, -1), both);
  auto bd = tr(sl_sc(dyn_inverse(tr(sl_sc(bar(B), np, ShiftMode::SC, -1), np)), m, ShiftMode::SL, 1), m);
  auto cd = tr(sl_sc(dyn_inverse(tr(sl_sc(bar(C), m, ShiftMode::SC, -1), m)), np, ShiftMode::SL, 1), np);
  auto dd = tr(sl_sc(dyn_inverse(bar(D)), both, ShiftMode::SL, 1), both);
  return {retag(ad, "A^d", total), retag(bd, "B^d", total), retag(cd, "C^d", total), retag(dd, "D^d", total)};
}

StructureQuadruple dual_structure(const StructureQuadruple& q) {
  StructureQuadruple d = q;
  d.name = q.name + " dual";
  d.metadata = {{"dual_of", q.name}};
  auto x = dual_maps(q.regime, {q.A, q.B, q.C, q.D}, {0}, {1});
  d.A = x[0];
  d.B = x[1];
  d.C = x[2];
  d.D = x[3];
  return d;
}

std::pair<Word, Word> exchange_sides(Regime r, const ExchangeData& s, const Word& tm, const Word& tn,
                                     const IndexSet& m, const IndexSet& np) {
  switch (r) {
    case Regime::Nondynamical:
      return {s.A * tm * s.B * tn, tn * s.C * tm * s.D};
    case Regime::Semidynamical:
      return {s.A * tm * s.B * tn.shifted(m), tn * s.C * tm.shifted(np) * s.D};
    case Regime::Fullydynamical:
      return {s.A * tm.shifted(np) * s.B * tn.shifted(m), tn.shifted(m) * s.C * tm.shifted(np) * s.D};
  }
  throw StructuralError("unknown regime");
}

Check check_base_exchange(const StructureQuadruple& q, const DynPtr& t, Sampler& sampler, int samples,
                          std::string name, std::string anchor) {
  const int n = q.params.n;
  IndexSet m = IndexSet::range(1, 1, n);
  IndexSet np = IndexSet::range(101, 1, n);
  ExchangeData s{f2(q.A, 1, 101), f2(q.B, 1, 101), f2(q.C, 1, 101), f2(q.D, 1, 101)};
  auto [lhs, rhs] = exchange_sides(q.regime, s, Word::factor(t, {1}), Word::factor(t, {101}), m, np);
  return word_identity(std::move(name), std::move(anchor), lhs, rhs, m.concat(np), q.sample_spec(), sampler, samples);
}

namespace {

nlohmann::json tags_to_json(const WeightTags& t) {
  return {{"zero_weight_slots", t.zero_weight_slots}, {"total_zero_weight", t.total_zero_weight}};
}

WeightTags tags_from_json(const nlohmann::json& j) {
  WeightTags t;
  if (j.contains("zero_weight_slots")) t.zero_weight_slots = j.at("zero_weight_slots").get<std::vector<int>>();
  if (j.contains("total_zero_weight")) t.total_zero_weight = j.at("total_zero_weight").get<bool>();
  return t;
}

Matrix literal_on_slots(const nlohmann::json& j, int arity, int n) {
  Matrix m = matrix_from_json(j);
  if (m.legs().size() != static_cast<std::size_t>(arity))
    throw StructuralError("matrix literal has " + std::to_string(m.legs().size()) + " legs, expected " +
                          std::to_string(arity));
  for (const auto& l : m.legs().labels())
    if (l.dim != n) throw StructuralError("matrix literal leg dimension " + std::to_string(l.dim) + " != n");
  return m.with_legs(slots(arity, n));
}

}  // namespace

nlohmann::json bundle_to_json(const CatalogEntry& e) {
  const auto& q = e.q;
  nlohmann::json j = {{"name", q.name},
                      {"regime", regime_name(q.regime)},
                      {"n", q.params.n},
                      {"gamma", scalar_to_json(q.params.gamma)}};
  nlohmann::json extra = nlohmann::json::object();
  for (const auto& [k, v] : q.params.extra) extra[k] = scalar_to_json(v);
  j["extra"] = extra;
  if (q.metadata.contains("catalog")) {
    j["catalog"] = q.metadata["catalog"];
    return j;
  }
  LambdaPoint origin;
  for (const auto& role : kRoles) {
    const DynPtr& x = q.*role.member;
    if (x->lambda_dependent() || x->spectral())
      throw StructuralError(std::string("cannot serialise lambda-dependent matrix ") + role.name);
    j["matrices"][role.name] = matrix_to_json(x->eval(origin));
    j["weight_tags"][role.name] = tags_to_json(x->tags());
  }
  if (e.solution.T && !e.solution.T->lambda_dependent() && !e.solution.T->spectral())
    j["T"] = matrix_to_json(e.solution.T->eval(origin));
  if (e.solution.K && !e.solution.K->lambda_dependent() && !e.solution.K->spectral())
    j["K"] = matrix_to_json(e.solution.K->eval(origin));
  return j;
}

BundleLoad load_bundle(const nlohmann::json& j, bool force, std::uint64_t seed, int samples) {
  BundleLoad out;
  try {
    if (!j.is_object()) throw StructuralError("bundle must be a JSON object");
    Regime r = parse_regime(j.at("regime").get<std::string>());
    int n = j.at("n").get<int>();
    if (n < 2) throw StructuralError("n must be at least 2");
    ExactScalar gamma = j.contains("gamma") ? scalar_from_json(j.at("gamma")) : ExactScalar(1);
    if (r != Regime::Nondynamical && gamma.is_zero()) throw StructuralError("gamma must be nonzero");
    if (j.contains("catalog")) {
      out.entry = catalog_entry(j.at("catalog").get<std::string>(), n, gamma, r);
      if (out.entry.q.regime != r)
        throw StructuralError("catalog entry '" + out.entry.q.name + "' is " + regime_name(out.entry.q.regime) +
                              ", bundle says " + regime_name(r));
      if (j.contains("K") && j.at("K").is_null()) out.entry.solution.K = nullptr;
    } else {
      DynParams p;
      p.n = n;
      p.gamma = gamma;
      if (j.contains("extra"))
        for (const auto& [k, v] : j.at("extra").items()) p.extra[k] = scalar_from_json(v);
      StructureQuadruple q;
      q.name = j.value("name", std::string("user"));
      q.regime = r;
      q.params = p;
      for (const auto& role : kRoles) {
        Matrix m = literal_on_slots(j.at("matrices").at(role.name), 2, n);
        WeightTags tags;
        if (j.contains("weight_tags") && j.at("weight_tags").contains(role.name))
          tags = tags_from_json(j.at("weight_tags").at(role.name));
        q.*role.member = retag(constant_matrix(role.name, m, p), role.name, tags);
      }
      q.metadata = {{"source", "file"}};
      out.entry.q = q;
      if (j.contains("T")) out.entry.solution.T = constant_matrix("T", literal_on_slots(j.at("T"), 1, n), p);
      if (j.contains("K")) out.entry.solution.K = constant_matrix("K", literal_on_slots(j.at("K"), 1, n), p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed bundle: ") + e.what());
  } catch (const LegError& e) {
    throw StructuralError(std::string("malformed bundle: ") + e.what());
  }
  Sampler s(seed);
  out.validation = check_regime(out.entry.q, s, samples);
  auto yb = verify_yb(out.entry.q, s, samples);
  out.validation.insert(out.validation.end(), yb.begin(), yb.end());
  std::string failed;
  for (const auto& c : out.validation)
    if (c.status == Status::Fail) failed += (failed.empty() ? "" : "; ") + c.name + " (" + c.witness + ")";
  if (!failed.empty()) {
    if (!force) throw StructuralError("bundle rejected by validation: " + failed);
    out.forced = true;
    out.entry.q.metadata["forced"] = true;
  }
  return out;
}

}  // namespace qexch
