#include "qexch/legs.hpp"

#include <algorithm>
#include <set>

#include "qexch/errors.hpp"

namespace qexch {

std::string leg_name(LegId id) {
  if (id >= 200) return std::to_string(id - 200) + "''";
  if (id >= 100) return std::to_string(id - 100) + "'";
  return std::to_string(id);
}

IndexSet::IndexSet(std::vector<LegLabel> labels)
    : labels_(std::move(labels)), spectral_(labels_.size()) {
  std::set<LegId> seen;
  for (const auto& l : labels_) {
    if (l.dim <= 0) throw LegError("leg " + leg_name(l.id) + " has non-positive dimension");
    if (!seen.insert(l.id).second) throw LegError("duplicate leg label " + leg_name(l.id));
  }
}

IndexSet::IndexSet(std::vector<LegLabel> labels, std::vector<std::optional<ExactScalar>> spectral)
    : IndexSet(std::move(labels)) {
  if (spectral.size() != labels_.size()) throw LegError("spectral metadata length mismatch");
  spectral_ = std::move(spectral);
}

IndexSet IndexSet::range(LegId first, int count, int n) {
  std::vector<LegLabel> labels;
  for (int k = 0; k < count; ++k) labels.push_back({first + k, n});
  return IndexSet(std::move(labels));
}

std::vector<LegId> IndexSet::ids() const {
  std::vector<LegId> out;
  for (const auto& l : labels_) out.push_back(l.id);
  return out;
}

bool IndexSet::has_spectral() const {
  return std::any_of(spectral_.begin(), spectral_.end(), [](const auto& s) { return s.has_value(); });
}

IndexSet IndexSet::with_spectral(const std::vector<ExactScalar>& values) const {
  if (values.size() != labels_.size()) throw LegError("spectral value count mismatch");
  std::vector<std::optional<ExactScalar>> sp(values.begin(), values.end());
  return IndexSet(labels_, std::move(sp));
}

IndexSet IndexSet::without_spectral() const { return IndexSet(labels_); }

bool IndexSet::contains(LegId id) const {
  return std::any_of(labels_.begin(), labels_.end(), [id](const LegLabel& l) { return l.id == id; });
}

std::size_t IndexSet::position(LegId id) const {
  for (std::size_t k = 0; k < labels_.size(); ++k)
    if (labels_[k].id == id) return k;
  throw LegError("unknown leg " + leg_name(id) + " in " + to_string());
}

std::size_t IndexSet::dimension() const {
  std::size_t d = 1;
  for (const auto& l : labels_) d *= static_cast<std::size_t>(l.dim);
  return d;
}

IndexSet IndexSet::reversed() const {
  return IndexSet(std::vector<LegLabel>(labels_.rbegin(), labels_.rend()),
                  std::vector<std::optional<ExactScalar>>(spectral_.rbegin(), spectral_.rend()));
}

IndexSet IndexSet::head_drop() const {
  if (labels_.empty()) throw LegError("head_drop of an empty index set");
  return IndexSet(std::vector<LegLabel>(labels_.begin() + 1, labels_.end()),
                  std::vector<std::optional<ExactScalar>>(spectral_.begin() + 1, spectral_.end()));
}

IndexSet IndexSet::tail_drop() const {
  if (labels_.empty()) throw LegError("tail_drop of an empty index set");
  return IndexSet(std::vector<LegLabel>(labels_.begin(), labels_.end() - 1),
                  std::vector<std::optional<ExactScalar>>(spectral_.begin(), spectral_.end() - 1));
}

IndexSet IndexSet::first() const {
  if (labels_.empty()) throw LegError("first of an empty index set");
  return IndexSet({labels_.front()}, {spectral_.front()});
}

IndexSet IndexSet::last() const {
  if (labels_.empty()) throw LegError("last of an empty index set");
  return IndexSet({labels_.back()}, {spectral_.back()});
}

IndexSet IndexSet::concat(const IndexSet& other) const {
  auto labels = labels_;
  auto sp = spectral_;
  labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
  sp.insert(sp.end(), other.spectral_.begin(), other.spectral_.end());
  return IndexSet(std::move(labels), std::move(sp));
}

IndexSet IndexSet::subset(const std::vector<LegId>& ids) const {
  std::vector<LegLabel> labels;
  std::vector<std::optional<ExactScalar>> sp;
  for (LegId id : ids) {
    std::size_t p = position(id);
    labels.push_back(labels_[p]);
    sp.push_back(spectral_[p]);
  }
  return IndexSet(std::move(labels), std::move(sp));
}

IndexSet IndexSet::before(LegId id) const {
  std::size_t p = position(id);
  return IndexSet(std::vector<LegLabel>(labels_.begin(), labels_.begin() + p),
                  std::vector<std::optional<ExactScalar>>(spectral_.begin(), spectral_.begin() + p));
}

IndexSet IndexSet::after(LegId id) const {
  std::size_t p = position(id) + 1;
  return IndexSet(std::vector<LegLabel>(labels_.begin() + p, labels_.end()),
                  std::vector<std::optional<ExactScalar>>(spectral_.begin() + p, spectral_.end()));
}

bool IndexSet::disjoint(const IndexSet& other) const {
  return std::none_of(labels_.begin(), labels_.end(),
                      [&](const LegLabel& l) { return other.contains(l.id); });
}

bool IndexSet::same_legs(const IndexSet& other) const { return labels_ == other.labels_; }

std::string IndexSet::to_string() const {
  std::string out = "(";
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    if (k) out += ",";
    out += leg_name(labels_[k].id);
  }
  return out + ")";
}

MultiIndex::MultiIndex(const IndexSet& legs) {
  for (const auto& l : legs.labels()) dims_.push_back(l.dim);
  strides_.assign(dims_.size(), 1);
  for (std::size_t k = dims_.size(); k-- > 0;) {
    strides_[k] = total_;
    total_ *= static_cast<std::size_t>(dims_[k]);
  }
}

std::vector<int> MultiIndex::digits(std::size_t flat) const {
  std::vector<int> out(dims_.size());
  for (std::size_t k = 0; k < dims_.size(); ++k) out[k] = digit(flat, k);
  return out;
}

std::size_t MultiIndex::flat(const std::vector<int>& digits) const {
  std::size_t f = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) f += strides_[k] * static_cast<std::size_t>(digits[k]);
  return f;
}

}  // namespace qexch
