#include "qexch/word.hpp"

#include <algorithm>
#include <set>

namespace qexch {

std::string Placement::label() const {
  std::string s = mat->name() + "[";
  for (std::size_t k = 0; k < legs.size(); ++k) s += (k ? "," : "") + leg_name(legs[k]);
  s += "]";
  if (!controls.empty() || !keyed.empty()) {
    s += "(h:";
    bool first = true;
    for (const auto& [leg, m] : controls) {
      s += (first ? "" : "+") + (m == 1 ? std::string() : std::to_string(m) + "*") + leg_name(leg);
      first = false;
    }
    for (const auto& [slot, m] : keyed) {
      s += (first ? "" : "+") + (m == 1 ? std::string() : std::to_string(m) + "*") +
           leg_name(legs[static_cast<std::size_t>(slot)]);
      first = false;
    }
    s += ")";
  }
  return s;
}

Word Word::factor(DynPtr mat, std::vector<LegId> legs) {
  if (static_cast<int>(legs.size()) != mat->arity()) throw LegError(mat->name() + ": slot count mismatch");
  Word w;
  w.factors_.push_back(Placement{std::move(mat), std::move(legs), {}, {}});
  return w;
}

Word& Word::operator*=(const Word& rhs) {
  factors_.insert(factors_.end(), rhs.factors_.begin(), rhs.factors_.end());
  return *this;
}

Word Word::shifted(const std::vector<LegId>& legs, int mult) const {
  Word out = *this;
  for (auto& f : out.factors_) {
    for (LegId leg : legs) {
      auto it = std::find(f.legs.begin(), f.legs.end(), leg);
      if (it == f.legs.end()) {
        f.controls.emplace_back(leg, mult);
        continue;
      }
      int slot = static_cast<int>(it - f.legs.begin());
      if (!f.mat->slot_zero_weight(slot))
        throw ShiftModeError(f.label() + ": shift keyed on own leg " + leg_name(leg) +
                             " without zero weight needs an explicit SL/SC mode");
      f.keyed.emplace_back(slot, mult);
    }
  }
  return out;
}

std::vector<LegId> Word::support() const {
  std::set<LegId> s;
  for (const auto& f : factors_) {
    s.insert(f.legs.begin(), f.legs.end());
    for (const auto& c : f.controls) s.insert(c.first);
  }
  return {s.begin(), s.end()};
}

std::string Word::provenance() const {
  if (factors_.empty()) return "Id";
  std::string s;
  for (std::size_t k = 0; k < factors_.size(); ++k) s += (k ? " " : "") + factors_[k].label();
  return s;
}

namespace {

class CompiledFactor {
 public:
  CompiledFactor(const Placement& p, const IndexSet& target, const MultiIndex& ti, const LambdaPoint& lambda)
      : p_(p), lambda_(lambda), n_(p.mat->n()) {
    std::size_t sub = 1;
    for (LegId leg : p.legs) {
      std::size_t pos = target.position(leg);
      if (target[pos].dim != n_) throw LegError(p.label() + ": leg dimension mismatch");
      slot_pos_.push_back(pos);
      if (target.spectral(pos)) spectral_.push_back(*target.spectral(pos));
      sub *= static_cast<std::size_t>(n_);
    }
    if (p.mat->spectral() && spectral_.size() != p.legs.size())
      throw LegError(p.label() + ": spectral parameters missing on target legs");
    sub_ = sub;
    for (const auto& [leg, m] : p.controls) ctrl_.emplace_back(target.position(leg), m);
    for (const auto& [slot, m] : p.keyed) ctrl_.emplace_back(slot_pos_[static_cast<std::size_t>(slot)], m);
    sub_stride_.assign(slot_pos_.size(), 1);
    for (std::size_t k = slot_pos_.size(); k-- > 1;) sub_stride_[k - 1] = sub_stride_[k] * static_cast<std::size_t>(n_);
    offsets_.resize(sub_);
    for (std::size_t s = 0; s < sub_; ++s) {
      std::size_t off = 0;
      for (std::size_t k = 0; k < slot_pos_.size(); ++k)
        off += ((s / sub_stride_[k]) % static_cast<std::size_t>(n_)) * ti.stride(slot_pos_[k]);
      offsets_[s] = off;
    }
    if (ctrl_.empty() || !p.mat->lambda_dependent()) fixed_ = &at(std::vector<int>(static_cast<std::size_t>(n_), 0));
  }

  void apply(const MultiIndex& ti, const std::vector<ExactScalar>& v, std::vector<ExactScalar>& out) {
    for (auto& x : out) x = ExactScalar();
    std::vector<int> mu(static_cast<std::size_t>(n_));
    for (std::size_t c = 0; c < v.size(); ++c) {
      if (v[c].is_zero()) continue;
      std::size_t base = c, cs = 0;
      for (std::size_t k = 0; k < slot_pos_.size(); ++k) {
        auto d = static_cast<std::size_t>(ti.digit(c, slot_pos_[k]));
        base -= d * ti.stride(slot_pos_[k]);
        cs += d * sub_stride_[k];
      }
      const Matrix* x = fixed_;
      if (!x) {
        std::fill(mu.begin(), mu.end(), 0);
        for (const auto& [pos, m] : ctrl_) mu[static_cast<std::size_t>(ti.digit(c, pos))] += m;
        x = &at(mu);
      }
      for (std::size_t rs = 0; rs < sub_; ++rs) {
        const ExactScalar& e = (*x)(rs, cs);
        if (!e.is_zero()) out[base + offsets_[rs]].add_product(e, v[c]);
      }
    }
  }

 private:
  const Matrix& at(const std::vector<int>& mu) {
    auto it = cache_.find(mu);
    if (it == cache_.end())
      it = cache_.emplace(mu, p_.mat->eval(lambda_.shifted(mu, p_.mat->params().gamma), spectral_)).first;
    return it->second;
  }

  const Placement& p_;
  const LambdaPoint& lambda_;
  int n_;
  std::vector<std::size_t> slot_pos_;
  std::vector<std::pair<std::size_t, int>> ctrl_;
  std::vector<std::size_t> sub_stride_;
  std::vector<std::size_t> offsets_;
  std::size_t sub_ = 1;
  Spectral spectral_;
  std::map<std::vector<int>, Matrix> cache_;
  const Matrix* fixed_ = nullptr;
};

class CompiledWord {
 public:
  CompiledWord(const Word& w, const IndexSet& target, const LambdaPoint& lambda) : ti_(target) {
    factors_.reserve(w.size());
    for (const auto& p : w.factors()) factors_.emplace_back(p, target, ti_, lambda);
  }

  // column j of the word
  std::vector<ExactScalar> column(std::size_t j) {
    std::vector<ExactScalar> v(ti_.size()), tmp(ti_.size());
    v[j] = ExactScalar(1);
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
      it->apply(ti_, v, tmp);
      std::swap(v, tmp);
    }
    return v;
  }

  std::size_t dim() const { return ti_.size(); }

 private:
  MultiIndex ti_;
  std::vector<CompiledFactor> factors_;
};

}  // namespace

Matrix evaluate(const Word& w, const IndexSet& target, const LambdaPoint& lambda) {
  CompiledWord cw(w, target, lambda);
  Matrix out(target);
  for (std::size_t j = 0; j < cw.dim(); ++j) {
    auto col = cw.column(j);
    for (std::size_t i = 0; i < col.size(); ++i)
      if (!col[i].is_zero()) out(i, j) = std::move(col[i]);
  }
  return out;
}

std::string WordMismatch::to_string() const {
  return "entry (" + std::to_string(row) + "," + std::to_string(col) + "): lhs " + lhs.to_string() + " rhs " +
         rhs.to_string();
}

std::optional<WordMismatch> compare_words(const Word& lhs, const Word& rhs, const IndexSet& target,
                                          const LambdaPoint& lambda) {
  CompiledWord l(lhs, target, lambda), r(rhs, target, lambda);
  for (std::size_t j = 0; j < l.dim(); ++j) {
    auto a = l.column(j), b = r.column(j);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return WordMismatch{i, j, a[i], b[i]};
  }
  return std::nullopt;
}

DynPtr word_as_dynamical(const Word& w, const IndexSet& legs, std::string name,
                         std::function<Matrix(const Matrix&)> transform) {
  int n = legs.empty() ? 2 : legs[0].dim;
  DynParams params;
  params.n = n;
  bool spectral = false, dependent = false;
  for (const auto& f : w.factors()) {
    params = f.mat->params();
    spectral = spectral || f.mat->spectral();
    dependent = dependent || f.mat->lambda_dependent();
  }
  auto arity = static_cast<int>(legs.size());
  return make_dynamical(
      std::move(name), arity, params,
      [w, legs, transform](const LambdaPoint& l, const Spectral& sp) {
        IndexSet target = sp.empty() ? legs : legs.with_spectral(sp);
        Matrix m = evaluate(w, target, l);
        if (transform) m = transform(m);
        return m;
      },
      {}, dependent, spectral);
}

}  // namespace qexch
