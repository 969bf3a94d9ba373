#include "qexch/diffop.hpp"

#include <set>

#include "qexch/matrix_io.hpp"

namespace qexch {

void accumulate(ShiftExpansion& e, const ShiftVec& mu, const ExactScalar& c) {
  if (c.is_zero()) return;
  auto it = e.find(mu);
  if (it == e.end()) {
    e.emplace(mu, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) e.erase(it);
}

ShiftVec add_shift(const ShiftVec& a, const ShiftVec& b) {
  ShiftVec out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

DifferenceOperator::DifferenceOperator(int n, ExactScalar gamma, Fn fn)
    : n_(n), gamma_(std::move(gamma)), fn_(std::move(fn)) {}

DifferenceOperator DifferenceOperator::from_terms(int n, ExactScalar gamma, std::vector<ShiftTerm> terms) {
  return DifferenceOperator(n, gamma, [terms](const LambdaPoint& l) {
    ShiftExpansion e;
    for (const auto& t : terms) accumulate(e, t.shift, t.coeff(l));
    return e;
  });
}

DifferenceOperator DifferenceOperator::shift(int n, ExactScalar gamma, ShiftVec mu) {
  return DifferenceOperator(n, gamma, [mu](const LambdaPoint&) { return ShiftExpansion{{mu, ExactScalar(1)}}; });
}

DifferenceOperator DifferenceOperator::constant(int n, ExactScalar gamma, ExactScalar c) {
  ShiftVec zero(static_cast<std::size_t>(n), 0);
  return DifferenceOperator(n, gamma, [zero, c](const LambdaPoint&) {
    ShiftExpansion e;
    accumulate(e, zero, c);
    return e;
  });
}

DifferenceOperator operator*(const DifferenceOperator& p, const DifferenceOperator& q) {
  return DifferenceOperator(p.n_, p.gamma_, [p, q](const LambdaPoint& l) {
    ShiftExpansion out;
    for (const auto& [mu, c] : p.at(l)) {
      for (const auto& [nu, d] : q.at(l.shifted(mu, p.gamma_))) accumulate(out, add_shift(mu, nu), c * d);
    }
    return out;
  });
}

DifferenceOperator operator+(const DifferenceOperator& p, const DifferenceOperator& q) {
  return DifferenceOperator(p.n_, p.gamma_, [p, q](const LambdaPoint& l) {
    ShiftExpansion out = p.at(l);
    for (const auto& [nu, d] : q.at(l)) accumulate(out, nu, d);
    return out;
  });
}

DifferenceOperator operator-(const DifferenceOperator& p, const DifferenceOperator& q) {
  return p + q.scaled(ExactScalar(-1));
}

DifferenceOperator DifferenceOperator::scaled(ExactScalar c) const {
  auto self = *this;
  return DifferenceOperator(n_, gamma_, [self, c](const LambdaPoint& l) {
    ShiftExpansion out;
    for (const auto& [mu, d] : self.at(l)) accumulate(out, mu, c * d);
    return out;
  });
}

DifferenceOperator DifferenceOperator::power(int k) const {
  DifferenceOperator out = constant(n_, gamma_, ExactScalar(1));
  for (int i = 0; i < k; ++i) out = out * *this;
  return out;
}

DifferenceOperator commutator(const DifferenceOperator& p, const DifferenceOperator& q) { return p * q - q * p; }

ShiftMatrix::ShiftMatrix(IndexSet legs, int n, ExactScalar gamma, Fn fn)
    : legs_(std::move(legs)), dim_(legs_.dimension()), n_(n), gamma_(std::move(gamma)), fn_(std::move(fn)) {}

ShiftMatrix ShiftMatrix::from_matrix(IndexSet legs, int n, ExactScalar gamma,
                                     std::function<Matrix(const LambdaPoint&)> m) {
  std::size_t d = legs.dimension();
  ShiftVec zero(static_cast<std::size_t>(n), 0);
  return ShiftMatrix(legs, n, gamma, [m, d, zero](const LambdaPoint& l) {
    Matrix v = m(l);
    if (v.dim() != d) throw LegError("shift matrix source has wrong dimension");
    Entries e(d * d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) accumulate(e[a * d + b], zero, v(a, b));
    return e;
  });
}

ShiftMatrix ShiftMatrix::identity(IndexSet legs, int n, ExactScalar gamma) {
  IndexSet copy = legs;
  return from_matrix(legs, n, gamma, [copy](const LambdaPoint&) { return Matrix::identity(copy); });
}

ShiftMatrix operator*(const ShiftMatrix& x, const ShiftMatrix& y) {
  if (!x.legs_.same_legs(y.legs_)) throw LegError("shift matrix product: leg mismatch");
  const std::size_t d = x.dim_;
  return ShiftMatrix(x.legs_, x.n_, x.gamma_, [x, y, d](const LambdaPoint& l) {
    auto xe = x.at(l);
    std::map<ShiftVec, ShiftMatrix::Entries> ycache;
    ShiftMatrix::Entries out(d * d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t c = 0; c < d; ++c)
        for (const auto& [mu, coeff] : xe[a * d + c]) {
          auto it = ycache.find(mu);
          if (it == ycache.end()) it = ycache.emplace(mu, y.at(l.shifted(mu, x.gamma_))).first;
          const auto& ye = it->second;
          for (std::size_t b = 0; b < d; ++b)
            for (const auto& [nu, dd] : ye[c * d + b]) accumulate(out[a * d + b], add_shift(mu, nu), coeff * dd);
        }
    return out;
  });
}

ShiftMatrix operator-(const ShiftMatrix& x, const ShiftMatrix& y) {
  if (!x.legs_.same_legs(y.legs_)) throw LegError("shift matrix difference: leg mismatch");
  return ShiftMatrix(x.legs_, x.n_, x.gamma_, [x, y](const LambdaPoint& l) {
    auto out = x.at(l);
    auto ye = y.at(l);
    for (std::size_t k = 0; k < out.size(); ++k)
      for (const auto& [nu, c] : ye[k]) accumulate(out[k], nu, -c);
    return out;
  });
}

ShiftMatrix ShiftMatrix::transposed() const {
  auto self = *this;
  const std::size_t d = dim_;
  return ShiftMatrix(legs_, n_, gamma_, [self, d](const LambdaPoint& l) {
    auto e = self.at(l);
    Entries out(d * d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) out[b * d + a] = std::move(e[a * d + b]);
    return out;
  });
}

DifferenceOperator ShiftMatrix::trace() const {
  auto self = *this;
  const std::size_t d = dim_;
  return DifferenceOperator(n_, gamma_, [self, d](const LambdaPoint& l) {
    auto e = self.at(l);
    ShiftExpansion out;
    for (std::size_t a = 0; a < d; ++a)
      for (const auto& [mu, c] : e[a * d + a]) accumulate(out, mu, c);
    return out;
  });
}

ShiftMatrix exp_D(const IndexSet& legs, int n, const ExactScalar& gamma, int sign) {
  for (const auto& l : legs.labels())
    if (l.dim != n) throw LegError("exp_D: leg " + leg_name(l.id) + " has dimension " + std::to_string(l.dim) +
                                   ", expected n = " + std::to_string(n));
  MultiIndex mi(legs);
  std::vector<std::size_t> all;
  for (std::size_t k = 0; k < legs.size(); ++k) all.push_back(k);
  const std::size_t d = mi.size();
  ShiftMatrix::Entries e(d * d);
  for (std::size_t a = 0; a < d; ++a) accumulate(e[a * d + a], weight_vector(mi, a, all, n, sign), ExactScalar(1));
  return ShiftMatrix(legs, n, gamma, [e](const LambdaPoint&) { return e; });
}

std::string DiffopWitness::to_string() const {
  std::string s = "shift [";
  for (std::size_t i = 0; i < shift.size(); ++i) s += (i ? "," : "") + std::to_string(shift[i]);
  s += "] at lambda " + lambda.to_string() + ": " + lhs.to_string() + " vs " + rhs.to_string();
  return s;
}

namespace {

std::optional<DiffopWitness> compare_expansions(const ShiftExpansion& a, const ShiftExpansion& b,
                                                const LambdaPoint& l) {
  std::set<ShiftVec> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  for (const auto& k : keys) {
    auto ia = a.find(k);
    auto ib = b.find(k);
    ExactScalar va = ia == a.end() ? ExactScalar() : ia->second;
    ExactScalar vb = ib == b.end() ? ExactScalar() : ib->second;
    if (va != vb) return DiffopWitness{k, l, va, vb};
  }
  return std::nullopt;
}

template <class Body>
EqualityResult run_samples(int n, const ExactScalar& gamma, Sampler& sampler, int k, int retry_budget, Body body) {
  EqualityResult res;
  int retries = 0;
  while (res.samples < k) {
    LambdaPoint l = sampler.lambda(n, gamma);
    std::optional<DiffopWitness> w;
    try {
      w = body(l);
    } catch (const PoleError& e) {
      if (++retries > retry_budget) {
        res.equal = false;
        res.diagnostic = std::string("pole at every retry: ") + e.what();
        return res;
      }
      continue;
    }
    ++res.samples;
    if (w) {
      res.equal = false;
      res.witness = w;
      return res;
    }
  }
  return res;
}

}  // namespace

EqualityResult diffop_equal(const DifferenceOperator& p, const DifferenceOperator& q, Sampler& sampler, int k,
                            int retry_budget) {
  return run_samples(p.n(), p.gamma(), sampler, k, retry_budget,
                     [&](const LambdaPoint& l) { return compare_expansions(p.at(l), q.at(l), l); });
}

EqualityResult shift_matrix_equal(const ShiftMatrix& x, const ShiftMatrix& y, Sampler& sampler, int k,
                                  int retry_budget) {
  return run_samples(x.n(), x.gamma(), sampler, k, retry_budget,
                     [&](const LambdaPoint& l) -> std::optional<DiffopWitness> {
                       auto a = x.at(l), b = y.at(l);
                       const std::size_t d = x.dim();
                       for (std::size_t i = 0; i < a.size(); ++i) {
                         auto w = compare_expansions(a[i], b[i], l);
                         if (w) {
                           w->row = i / d;
                           w->col = i % d;
                           return w;
                         }
                       }
                       return std::nullopt;
                     });
}

nlohmann::json dump_operator(const DifferenceOperator& p, const std::vector<LambdaPoint>& points) {
  std::map<ShiftVec, nlohmann::json> by_shift;
  std::vector<ShiftExpansion> values;
  for (const auto& l : points) values.push_back(p.at(l));
  for (const auto& e : values)
    for (const auto& [mu, c] : e) by_shift.emplace(mu, nlohmann::json::array());
  for (std::size_t k = 0; k < points.size(); ++k) {
    auto lam = nlohmann::json::array();
    for (const auto& c : points[k].coords) lam.push_back(scalar_to_json(c));
    for (auto& [mu, list] : by_shift) {
      auto it = values[k].find(mu);
      list.push_back({{"lambda", lam}, {"value", scalar_to_json(it == values[k].end() ? ExactScalar() : it->second)}});
    }
  }
  auto out = nlohmann::json::array();
  for (auto& [mu, list] : by_shift) out.push_back({{"shift", mu}, {"coeff_at", list}});
  return out;
}

namespace {

ShiftMatrix as_shift_matrix(const DynPtr& x) {
  IndexSet legs = x->slot_legs();
  return ShiftMatrix::from_matrix(legs, x->n(), x->params().gamma,
                                  [x](const LambdaPoint& l) { return x->eval(l); });
}

std::vector<int> all_slots(const DynPtr& x) {
  std::vector<int> s;
  for (int k = 0; k < x->arity(); ++k) s.push_back(k);
  return s;
}

LemmaResult to_lemma(const EqualityResult& r) {
  LemmaResult out;
  out.pass = r.equal;
  out.samples = r.samples;
  if (r.witness) out.witness = "entry (" + std::to_string(r.witness->row) + "," + std::to_string(r.witness->col) +
                               ") " + r.witness->to_string();
  if (!r.diagnostic.empty()) out.witness = r.diagnostic;
  return out;
}

}  // namespace

DynPtr push_through(const DynPtr& x) {
  Sampler probe(0x5eed);
  auto w = verify_weight_tags(*x, probe, 3);
  if (!w.pass) throw std::invalid_argument("push_through: " + w.witness);
  std::vector<int> slots = all_slots(x);
  for (int s = 0; s < 3; ++s) {
    Matrix m = x->eval(probe.lambda(x->n(), x->params().gamma));
    auto r = check_total_zero_weight(m, slots);
    if (!r.pass) throw std::invalid_argument("push_through: " + x->name() + " " + r.witness);
  }
  return sl_sc(x, slots, ShiftMode::SL, -1);
}

LemmaResult check_push_through(const DynPtr& x, Sampler& sampler, int samples) {
  DynPtr xbar = push_through(x);
  IndexSet legs = x->slot_legs();
  auto em = exp_D(legs, x->n(), x->params().gamma, -1);
  return to_lemma(shift_matrix_equal(em * as_shift_matrix(x), as_shift_matrix(xbar) * em, sampler, samples));
}

LemmaResult check_dyn_transpose(const DynPtr& r, const DynPtr& s, Sampler& sampler, int samples) {
  IndexSet legs = r->slot_legs();
  auto ep = exp_D(legs, r->n(), r->params().gamma, +1);
  auto lhs = (as_shift_matrix(r) * ep * as_shift_matrix(s)).transposed();
  auto s_sl = dyn_map(sl_sc(s, all_slots(s), ShiftMode::SL, +1), "S^SL t", [](const Matrix& m) { return transpose(m); });
  auto r_sc = dyn_map(sl_sc(r, all_slots(r), ShiftMode::SC, +1), "R^SC t", [](const Matrix& m) { return transpose(m); });
  auto rhs = as_shift_matrix(s_sl) * ep * as_shift_matrix(r_sc);
  return to_lemma(shift_matrix_equal(lhs, rhs, sampler, samples));
}

LemmaResult check_trace_cyclic(const DynPtr& d, const DynPtr& x, Sampler& sampler, int samples) {
  IndexSet legs = d->slot_legs();
  auto ep = exp_D(legs, d->n(), d->params().gamma, +1);
  auto conj = ShiftMatrix::from_matrix(legs, d->n(), d->params().gamma, [d, x](const LambdaPoint& l) {
    Matrix dm = d->eval(l);
    return dm * x->eval(l) * inverse(dm);
  });
  auto lhs = (conj * ep).trace();
  auto rhs = (as_shift_matrix(x) * ep).trace();
  return to_lemma(diffop_equal(lhs, rhs, sampler, samples));
}

LemmaResult check_sc_conjugation(const DynPtr& r, Sampler& sampler, int samples) {
  IndexSet legs = r->slot_legs();
  auto ep = exp_D(legs, r->n(), r->params().gamma, +1);
  auto em = exp_D(legs, r->n(), r->params().gamma, -1);
  auto rsc = sl_sc(r, all_slots(r), ShiftMode::SC, +1);
  return to_lemma(shift_matrix_equal(em * as_shift_matrix(r) * ep, as_shift_matrix(rsc), sampler, samples));
}

}  // namespace qexch
