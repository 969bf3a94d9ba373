#include "qexch/dynamics.hpp"

#include <algorithm>

namespace qexch {

LambdaPoint LambdaPoint::shifted(const std::vector<int>& mu, const ExactScalar& gamma) const {
  LambdaPoint out = *this;
  for (std::size_t i = 0; i < mu.size() && i < coords.size(); ++i)
    if (mu[i] != 0) out.coords[i] += ExactScalar(mu[i]) * gamma;
  return out;
}

std::string LambdaPoint::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < coords.size(); ++i) s += (i ? "," : "") + coords[i].to_string();
  return s + "]";
}

long Sampler::uniform(long lo, long hi) {
  auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<long>(rng_() % span);
}

ExactScalar Sampler::rational() { return ExactScalar::rational(uniform(-bound_, bound_), uniform(1, bound_)); }

LambdaPoint Sampler::lambda(int n, const ExactScalar& gamma) {
  for (;;) {
    LambdaPoint p;
    for (int i = 0; i < n; ++i) p.coords.push_back(rational());
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j) {
        if (i == j) continue;
        ExactScalar d = p.coords[static_cast<std::size_t>(i)] - p.coords[static_cast<std::size_t>(j)];
        for (int k = -3; k <= 3; ++k)
          if (d == ExactScalar(k) * gamma) ok = false;
      }
    if (ok) return p;
  }
}

Spectral Sampler::spectral(std::size_t count) {
  for (;;) {
    Spectral s;
    for (std::size_t k = 0; k < count; ++k) s.push_back(rational());
    bool ok = true;
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t b = a + 1; b < count; ++b)
        if (s[a] == s[b] || (s[a] + s[b]).is_zero()) ok = false;
    if (ok) return s;
  }
}

DynamicalMatrix::DynamicalMatrix(std::string name, int arity, DynParams params, EvalFn fn, WeightTags tags,
                                 bool lambda_dependent, bool spectral)
    : name_(std::move(name)),
      arity_(arity),
      params_(std::move(params)),
      fn_(std::move(fn)),
      tags_(std::move(tags)),
      lambda_dependent_(lambda_dependent),
      spectral_(spectral) {}

Matrix DynamicalMatrix::eval(const LambdaPoint& lambda, const Spectral& spectral) const {
  Matrix m = fn_(lambda, spectral);
  IndexSet slots = slot_legs();
  if (m.dim() != slots.dimension()) throw LegError(name_ + ": evaluation has wrong dimension");
  return m.with_legs(slots);
}

bool DynamicalMatrix::slot_zero_weight(int slot) const {
  if (tags_.total_zero_weight && arity_ == 1) return true;
  return std::find(tags_.zero_weight_slots.begin(), tags_.zero_weight_slots.end(), slot) !=
         tags_.zero_weight_slots.end();
}

DynPtr make_dynamical(std::string name, int arity, DynParams params, DynamicalMatrix::EvalFn fn, WeightTags tags,
                      bool lambda_dependent, bool spectral) {
  return std::make_shared<const DynamicalMatrix>(std::move(name), arity, std::move(params), std::move(fn),
                                                 std::move(tags), lambda_dependent, spectral);
}

DynPtr constant_matrix(std::string name, const Matrix& m, DynParams params) {
  int arity = static_cast<int>(m.legs().size());
  Matrix copy = m.with_legs(IndexSet::range(0, arity, params.n));
  return make_dynamical(std::move(name), arity, std::move(params),
                        [copy](const LambdaPoint&, const Spectral&) { return copy; }, {}, false, false);
}

std::vector<int> weight_vector(const MultiIndex& mi, std::size_t flat, const std::vector<std::size_t>& positions,
                               int n, int multiplier) {
  std::vector<int> mu(static_cast<std::size_t>(n), 0);
  for (std::size_t p : positions) mu[static_cast<std::size_t>(mi.digit(flat, p))] += multiplier;
  return mu;
}

Matrix shift_eval(const DynamicalMatrix& x, const LambdaPoint& base, const Spectral& spectral,
                  const std::vector<ShiftKey>& shifts) {
  const int n = x.n();
  std::vector<int> fixed(static_cast<std::size_t>(n), 0);
  struct Keyed {
    std::size_t pos;
    int mult;
    bool by_row;
  };
  std::vector<Keyed> keyed;
  for (const auto& s : shifts) {
    if (s.kind == ShiftKey::Kind::Coordinate) {
      if (s.index < 0 || s.index >= n) throw LegError("coordinate shift index out of range");
      fixed[static_cast<std::size_t>(s.index)] += s.multiplier;
      continue;
    }
    if (s.index < 0 || s.index >= x.arity()) throw LegError("slot shift index out of range");
    if (!s.mode && !x.slot_zero_weight(s.index))
      throw ShiftModeError(x.name() + ": leg-keyed shift on slot " + std::to_string(s.index) +
                           " without zero weight needs an explicit SL/SC mode");
    bool by_row = !s.mode || *s.mode == ShiftMode::SL;
    int mult = (s.mode && *s.mode == ShiftMode::SC) ? -s.multiplier : s.multiplier;
    keyed.push_back({static_cast<std::size_t>(s.index), mult, by_row});
  }
  IndexSet slots = x.slot_legs();
  MultiIndex mi(slots);
  std::map<std::vector<int>, Matrix> cache;
  Matrix out(slots);
  for (std::size_t a = 0; a < mi.size(); ++a)
    for (std::size_t b = 0; b < mi.size(); ++b) {
      std::vector<int> v = fixed;
      for (const auto& k : keyed) v[static_cast<std::size_t>(mi.digit(k.by_row ? a : b, k.pos))] += k.mult;
      auto it = cache.find(v);
      if (it == cache.end()) it = cache.emplace(v, x.eval(base.shifted(v, x.params().gamma), spectral)).first;
      out(a, b) = it->second(a, b);
    }
  return out;
}

DynPtr sl_sc(const DynPtr& x, const std::vector<int>& slots, ShiftMode mode, int sign) {
  std::vector<ShiftKey> keys;
  for (int s : slots) keys.push_back({ShiftKey::Kind::Slot, s, sign, mode});
  std::string tag = std::string(sign < 0 ? "-" : "") + (mode == ShiftMode::SL ? "SL" : "SC");
  for (int s : slots) tag += std::to_string(s + 1);
  return make_dynamical(x->name() + "^" + tag, x->arity(), x->params(),
                        [x, keys](const LambdaPoint& l, const Spectral& sp) { return shift_eval(*x, l, sp, keys); },
                        {}, x->lambda_dependent(), x->spectral());
}

DynPtr dyn_map(const DynPtr& x, std::string name, std::function<Matrix(const Matrix&)> f) {
  return make_dynamical(std::move(name), x->arity(), x->params(),
                        [x, f](const LambdaPoint& l, const Spectral& sp) { return f(x->eval(l, sp)); }, {},
                        x->lambda_dependent(), x->spectral());
}

DynPtr retag(const DynPtr& x, std::string name, WeightTags tags) {
  return make_dynamical(std::move(name), x->arity(), x->params(),
                        [x](const LambdaPoint& l, const Spectral& sp) { return x->eval(l, sp); }, std::move(tags),
                        x->lambda_dependent(), x->spectral());
}

DynPtr random_dynamical(Sampler& sampler, int n, int arity, const ExactScalar& gamma, bool total_zero_weight,
                        std::string name) {
  IndexSet slots = IndexSet::range(0, arity, n);
  MultiIndex mi(slots);
  std::vector<std::size_t> all(static_cast<std::size_t>(arity));
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  const std::size_t d = mi.size();
  // coefficients per entry: constant, then one per lambda coordinate
  std::vector<std::vector<ExactScalar>> coeff(d * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      if (total_zero_weight && weight_vector(mi, a, all, n) != weight_vector(mi, b, all, n)) continue;
      auto& c = coeff[a * d + b];
      for (int i = 0; i <= n; ++i) c.push_back(sampler.rational());
    }
  DynParams params;
  params.n = n;
  params.gamma = gamma;
  WeightTags tags;
  tags.total_zero_weight = total_zero_weight;
  return make_dynamical(
      std::move(name), arity, params,
      [coeff, slots, d](const LambdaPoint& l, const Spectral&) {
        Matrix m(slots);
        for (std::size_t a = 0; a < d; ++a)
          for (std::size_t b = 0; b < d; ++b) {
            const auto& c = coeff[a * d + b];
            if (c.empty()) continue;
            ExactScalar v = c[0];
            for (std::size_t i = 0; i < l.coords.size(); ++i) v += c[i + 1] * l.coords[i];
            m(a, b) = v;
          }
        return m;
      },
      tags);
}

DynPtr dyn_inverse(const DynPtr& x) {
  return dyn_map(x, "(" + x->name() + ")^-1", [](const Matrix& m) { return inverse(m); });
}

DynPtr dyn_partial_transpose(const DynPtr& x, const std::vector<int>& slots) {
  std::string tag = "^t";
  for (int s : slots) tag += std::to_string(s + 1);
  return dyn_map(x, "(" + x->name() + ")" + tag, [slots](const Matrix& m) {
    return partial_transpose(m, std::vector<LegId>(slots.begin(), slots.end()));
  });
}

DynPtr dyn_exchange_roles(const DynPtr& x) {
  return dyn_map(x, "(" + x->name() + ")^pi", [](const Matrix& m) { return exchange_roles(m); });
}

DynPtr dyn_left_swap(const DynPtr& x) {
  return dyn_map(x, "P" + x->name(), [](const Matrix& m) { return swap_operator<ExactScalar>(m.legs(), 0, 1) * m; });
}

WeightCheck check_slot_zero_weight(const Matrix& m, int slot) {
  MultiIndex mi(m.legs());
  auto p = static_cast<std::size_t>(slot);
  for (std::size_t a = 0; a < mi.size(); ++a)
    for (std::size_t b = 0; b < mi.size(); ++b)
      if (!m(a, b).is_zero() && mi.digit(a, p) != mi.digit(b, p))
        return {false, "entry (" + std::to_string(a) + "," + std::to_string(b) + ") = " + m(a, b).to_string() +
                           " breaks zero weight on leg " + std::to_string(slot + 1)};
  return {};
}

WeightCheck check_total_zero_weight(const Matrix& m, const std::vector<int>& slots) {
  MultiIndex mi(m.legs());
  std::vector<std::size_t> pos(slots.begin(), slots.end());
  int n = m.legs()[0].dim;
  for (std::size_t a = 0; a < mi.size(); ++a)
    for (std::size_t b = 0; b < mi.size(); ++b)
      if (!m(a, b).is_zero() && weight_vector(mi, a, pos, n) != weight_vector(mi, b, pos, n))
        return {false, "entry (" + std::to_string(a) + "," + std::to_string(b) + ") = " + m(a, b).to_string() +
                           " has unequal row/column index multisets"};
  return {};
}

WeightCheck verify_weight_tags(const DynamicalMatrix& x, Sampler& sampler, int samples) {
  int retries = 0;
  for (int s = 0; s < samples; ++s) {
    Matrix m;
    try {
      m = x.eval(sampler.lambda(x.n(), x.params().gamma),
                 x.spectral() ? sampler.spectral(static_cast<std::size_t>(x.arity())) : Spectral{});
    } catch (const PoleError&) {
      if (++retries > 100) return {false, x.name() + ": every sample point hit a pole"};
      --s;
      continue;
    }
    for (int slot : x.tags().zero_weight_slots) {
      auto r = check_slot_zero_weight(m, slot);
      if (!r.pass) return {false, x.name() + ": " + r.witness};
    }
    if (x.tags().total_zero_weight) {
      std::vector<int> all;
      for (int k = 0; k < x.arity(); ++k) all.push_back(k);
      auto r = check_total_zero_weight(m, all);
      if (!r.pass) return {false, x.name() + ": " + r.witness};
    }
  }
  return {};
}

}  // namespace qexch
