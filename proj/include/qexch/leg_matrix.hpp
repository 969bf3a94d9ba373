#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <map>
#include <vector>

#include "qexch/errors.hpp"
#include "qexch/exact_scalar.hpp"
#include "qexch/legs.hpp"

namespace qexch {

namespace scalar_ops {

template <class S>
bool is_zero(const S& s) {
  return s == S(0);
}
inline bool is_zero(const ExactScalar& s) { return s.is_zero(); }

template <class S>
void add_product(S& acc, const S& a, const S& b) {
  acc += a * b;
}
inline void add_product(ExactScalar& acc, const ExactScalar& a, const ExactScalar& b) {
  acc.add_product(a, b);
}

}  // namespace scalar_ops

// Dense square operator on an ordered tensor product of labeled legs.
template <class Scalar>
class LegMatrix {
 public:
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  LegMatrix() = default;
  explicit LegMatrix(IndexSet legs) : legs_(std::move(legs)) {
    auto d = static_cast<Eigen::Index>(legs_.dimension());
    m_ = Dense::Constant(d, d, Scalar(0));
  }
  LegMatrix(IndexSet legs, Dense m) : legs_(std::move(legs)), m_(std::move(m)) {
    auto d = static_cast<Eigen::Index>(legs_.dimension());
    if (m_.rows() != d || m_.cols() != d) throw LegError("entry array does not match leg dimensions");
  }

  static LegMatrix identity(IndexSet legs) {
    LegMatrix out(std::move(legs));
    for (Eigen::Index k = 0; k < out.m_.rows(); ++k) out.m_(k, k) = Scalar(1);
    return out;
  }

  const IndexSet& legs() const { return legs_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Dense& dense() const { return m_; }
  Dense& dense() { return m_; }

  Scalar& operator()(std::size_t r, std::size_t c) {
    return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  const Scalar& operator()(std::size_t r, std::size_t c) const {
    return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  // same entries, legs renamed (spectral metadata kept by position)
  LegMatrix with_legs(IndexSet legs) const {
    if (legs.dimension() != legs_.dimension()) throw LegError("relabel changes dimension");
    return LegMatrix(std::move(legs), m_);
  }

  bool is_zero() const {
    for (Eigen::Index c = 0; c < m_.cols(); ++c)
      for (Eigen::Index r = 0; r < m_.rows(); ++r)
        if (!scalar_ops::is_zero(m_(r, c))) return false;
    return true;
  }

 private:
  IndexSet legs_;
  Dense m_;
};

namespace detail {

inline void require_same_legs(const IndexSet& a, const IndexSet& b, const char* what) {
  if (!a.same_legs(b))
    throw LegError(std::string(what) + ": leg mismatch " + a.to_string() + " vs " + b.to_string());
}

inline std::vector<std::size_t> positions(const IndexSet& legs, const std::vector<LegId>& ids) {
  std::vector<std::size_t> out;
  for (LegId id : ids) out.push_back(legs.position(id));
  return out;
}

}  // namespace detail

template <class S>
LegMatrix<S> operator+(const LegMatrix<S>& x, const LegMatrix<S>& y) {
  detail::require_same_legs(x.legs(), y.legs(), "add");
  LegMatrix<S> out = x;
  for (std::size_t c = 0; c < x.dim(); ++c)
    for (std::size_t r = 0; r < x.dim(); ++r)
      if (!scalar_ops::is_zero(y(r, c))) out(r, c) += y(r, c);
  return out;
}

template <class S>
LegMatrix<S> operator-(const LegMatrix<S>& x, const LegMatrix<S>& y) {
  detail::require_same_legs(x.legs(), y.legs(), "sub");
  LegMatrix<S> out = x;
  for (std::size_t c = 0; c < x.dim(); ++c)
    for (std::size_t r = 0; r < x.dim(); ++r)
      if (!scalar_ops::is_zero(y(r, c))) out(r, c) -= y(r, c);
  return out;
}

template <class S>
LegMatrix<S> scalar_mul(const S& s, const LegMatrix<S>& x) {
  LegMatrix<S> out(x.legs());
  if (scalar_ops::is_zero(s)) return out;
  for (std::size_t c = 0; c < x.dim(); ++c)
    for (std::size_t r = 0; r < x.dim(); ++r)
      if (!scalar_ops::is_zero(x(r, c))) out(r, c) = s * x(r, c);
  return out;
}

// Zero-skipping exact product.
template <class S>
LegMatrix<S> operator*(const LegMatrix<S>& x, const LegMatrix<S>& y) {
  detail::require_same_legs(x.legs(), y.legs(), "mul");
  const std::size_t d = x.dim();
  LegMatrix<S> out(x.legs());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      const S& ykj = y(k, j);
      if (scalar_ops::is_zero(ykj)) continue;
      for (std::size_t i = 0; i < d; ++i) {
        const S& xik = x(i, k);
        if (!scalar_ops::is_zero(xik)) scalar_ops::add_product(out(i, j), xik, ykj);
      }
    }
  }
  return out;
}

template <class S>
bool operator==(const LegMatrix<S>& x, const LegMatrix<S>& y) {
  if (!x.legs().same_legs(y.legs())) return false;
  for (std::size_t c = 0; c < x.dim(); ++c)
    for (std::size_t r = 0; r < x.dim(); ++r)
      if (!(x(r, c) == y(r, c))) return false;
  return true;
}

template <class S>
LegMatrix<S> commutator(const LegMatrix<S>& x, const LegMatrix<S>& y) {
  return x * y - y * x;
}

// Exact Gauss-Jordan elimination, first nonzero pivot.
template <class S>
LegMatrix<S> inverse(const LegMatrix<S>& x) {
  const std::size_t d = x.dim();
  auto a = x.dense();
  LegMatrix<S> inv = LegMatrix<S>::identity(x.legs());
  auto& b = inv.dense();
  for (std::size_t col = 0; col < d; ++col) {
    auto c = static_cast<Eigen::Index>(col);
    Eigen::Index piv = -1;
    for (Eigen::Index r = c; r < static_cast<Eigen::Index>(d); ++r)
      if (!scalar_ops::is_zero(a(r, c))) {
        piv = r;
        break;
      }
    if (piv < 0) throw SingularMatrix(col);
    if (piv != c) {
      a.row(piv).swap(a.row(c));
      b.row(piv).swap(b.row(c));
    }
    S pinv = S(1) / a(c, c);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(d); ++k) {
      if (!scalar_ops::is_zero(a(c, k))) a(c, k) = a(c, k) * pinv;
      if (!scalar_ops::is_zero(b(c, k))) b(c, k) = b(c, k) * pinv;
    }
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(d); ++r) {
      if (r == c || scalar_ops::is_zero(a(r, c))) continue;
      S f = a(r, c);
      for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(d); ++k) {
        if (!scalar_ops::is_zero(a(c, k))) a(r, k) -= f * a(c, k);
        if (!scalar_ops::is_zero(b(c, k))) b(r, k) -= f * b(c, k);
      }
    }
  }
  return inv;
}

template <class S>
LegMatrix<S> kron(const LegMatrix<S>& x, const LegMatrix<S>& y) {
  if (!x.legs().disjoint(y.legs()))
    throw LegError("kron: overlapping labels " + x.legs().to_string() + " " + y.legs().to_string());
  LegMatrix<S> out(x.legs().concat(y.legs()));
  const std::size_t dy = y.dim();
  for (std::size_t xc = 0; xc < x.dim(); ++xc)
    for (std::size_t xr = 0; xr < x.dim(); ++xr) {
      if (scalar_ops::is_zero(x(xr, xc))) continue;
      for (std::size_t yc = 0; yc < dy; ++yc)
        for (std::size_t yr = 0; yr < dy; ++yr)
          if (!scalar_ops::is_zero(y(yr, yc))) out(xr * dy + yr, xc * dy + yc) = x(xr, xc) * y(yr, yc);
    }
  return out;
}

// X tensored with identity on the legs of target it does not act on.
template <class S>
LegMatrix<S> embed(const LegMatrix<S>& x, const IndexSet& target) {
  const auto pos = detail::positions(target, x.legs().ids());
  for (std::size_t k = 0; k < pos.size(); ++k)
    if (target[pos[k]].dim != x.legs()[k].dim) throw LegError("embed: leg dimension mismatch");
  MultiIndex ti(target), si(x.legs());
  LegMatrix<S> out(target);
  for (std::size_t a = 0; a < ti.size(); ++a) {
    std::size_t base = a, as = 0;
    for (std::size_t k = 0; k < pos.size(); ++k) {
      int dg = ti.digit(a, pos[k]);
      base -= static_cast<std::size_t>(dg) * ti.stride(pos[k]);
      as += static_cast<std::size_t>(dg) * si.stride(k);
    }
    for (std::size_t bs = 0; bs < si.size(); ++bs) {
      const S& v = x(as, bs);
      if (scalar_ops::is_zero(v)) continue;
      std::size_t b = base;
      for (std::size_t k = 0; k < pos.size(); ++k)
        b += static_cast<std::size_t>(si.digit(bs, k)) * ti.stride(pos[k]);
      out(a, b) = v;
    }
  }
  return out;
}

// Reorder legs to `order` (a permutation of X's leg ids); conjugation by the permutation operator.
template <class S>
LegMatrix<S> permute_legs(const LegMatrix<S>& x, const std::vector<LegId>& order) {
  if (order.size() != x.legs().size()) throw LegError("permute_legs: permutation domain mismatch");
  IndexSet target = x.legs().subset(order);
  return embed(x, target);
}

// Rename legs: ids[k] replaces the k-th leg id; dimensions and spectral metadata move along.
template <class S>
LegMatrix<S> relabel(const LegMatrix<S>& x, const std::vector<LegId>& ids) {
  if (ids.size() != x.legs().size()) throw LegError("relabel: id count mismatch");
  std::vector<LegLabel> labels;
  std::vector<std::optional<ExactScalar>> sp;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    labels.push_back({ids[k], x.legs()[k].dim});
    sp.push_back(x.legs().spectral(k));
  }
  return x.with_legs(IndexSet(std::move(labels), std::move(sp)));
}

// X^pi on two legs: the same legs, with the roles of the two spaces exchanged (P X P).
template <class S>
LegMatrix<S> exchange_roles(const LegMatrix<S>& x) {
  if (x.legs().size() != 2) throw LegError("exchange_roles needs two legs");
  auto ids = x.legs().ids();
  return permute_legs(relabel(x, {ids[1], ids[0]}), ids);
}

template <class S>
LegMatrix<S> partial_transpose(const LegMatrix<S>& x, const std::vector<LegId>& legs) {
  const auto pos = detail::positions(x.legs(), legs);
  MultiIndex mi(x.legs());
  LegMatrix<S> out(x.legs());
  for (std::size_t b = 0; b < mi.size(); ++b)
    for (std::size_t a = 0; a < mi.size(); ++a) {
      if (scalar_ops::is_zero(x(a, b))) continue;
      std::size_t a2 = a, b2 = b;
      for (std::size_t p : pos) {
        auto da = static_cast<std::size_t>(mi.digit(a, p)), db = static_cast<std::size_t>(mi.digit(b, p));
        a2 = a2 - da * mi.stride(p) + db * mi.stride(p);
        b2 = b2 - db * mi.stride(p) + da * mi.stride(p);
      }
      out(a2, b2) = x(a, b);
    }
  return out;
}

template <class S>
LegMatrix<S> transpose(const LegMatrix<S>& x) {
  return LegMatrix<S>(x.legs(), x.dense().transpose());
}

// Sum over diagonal entries of the legs in `legs`; result lives on the remaining legs.
template <class S>
LegMatrix<S> partial_trace(const LegMatrix<S>& x, const std::vector<LegId>& legs) {
  const auto pos = detail::positions(x.legs(), legs);
  std::vector<LegId> keep;
  for (const auto& l : x.legs().labels())
    if (std::find(legs.begin(), legs.end(), l.id) == legs.end()) keep.push_back(l.id);
  IndexSet rest = x.legs().subset(keep);
  const auto kpos = detail::positions(x.legs(), keep);
  MultiIndex mi(x.legs()), ri(rest);
  LegMatrix<S> out(rest);
  for (std::size_t b = 0; b < mi.size(); ++b)
    for (std::size_t a = 0; a < mi.size(); ++a) {
      bool diag = true;
      for (std::size_t p : pos)
        if (mi.digit(a, p) != mi.digit(b, p)) {
          diag = false;
          break;
        }
      if (!diag || scalar_ops::is_zero(x(a, b))) continue;
      std::size_t ra = 0, rb = 0;
      for (std::size_t k = 0; k < kpos.size(); ++k) {
        ra += static_cast<std::size_t>(mi.digit(a, kpos[k])) * ri.stride(k);
        rb += static_cast<std::size_t>(mi.digit(b, kpos[k])) * ri.stride(k);
      }
      out(ra, rb) += x(a, b);
    }
  return out;
}

template <class S>
S trace(const LegMatrix<S>& x) {
  S t(0);
  for (std::size_t k = 0; k < x.dim(); ++k) t += x(k, k);
  return t;
}

// Permutation operator exchanging two legs of `legs`.
template <class S>
LegMatrix<S> swap_operator(const IndexSet& legs, LegId i, LegId j) {
  const std::size_t pi = legs.position(i), pj = legs.position(j);
  MultiIndex mi(legs);
  LegMatrix<S> out(legs);
  for (std::size_t a = 0; a < mi.size(); ++a) {
    auto d = mi.digits(a);
    std::swap(d[pi], d[pj]);
    out(mi.flat(d), a) = S(1);
  }
  return out;
}

// Elementary matrix E_ij on a single leg of dimension n.
template <class S>
LegMatrix<S> elementary(LegLabel leg, int i, int j) {
  LegMatrix<S> out(IndexSet({leg}));
  out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = S(1);
  return out;
}

using Matrix = LegMatrix<ExactScalar>;

// First entry where x and y differ, if any.
struct EntryWitness {
  std::size_t row = 0;
  std::size_t col = 0;
  ExactScalar lhs;
  ExactScalar rhs;
  std::string to_string() const {
    return "entry (" + std::to_string(row) + "," + std::to_string(col) + "): " + lhs.to_string() + " vs " +
           rhs.to_string();
  }
};

inline std::optional<EntryWitness> first_difference(const Matrix& x, const Matrix& y) {
  detail::require_same_legs(x.legs(), y.legs(), "compare");
  for (std::size_t r = 0; r < x.dim(); ++r)
    for (std::size_t c = 0; c < x.dim(); ++c)
      if (x(r, c) != y(r, c)) return EntryWitness{r, c, x(r, c), y(r, c)};
  return std::nullopt;
}

// Returns c if x == c*y (y nonzero), nullopt otherwise.
inline std::optional<ExactScalar> proportionality(const Matrix& x, const Matrix& y) {
  detail::require_same_legs(x.legs(), y.legs(), "proportionality");
  std::optional<ExactScalar> c;
  for (std::size_t r = 0; r < x.dim(); ++r)
    for (std::size_t k = 0; k < x.dim(); ++k) {
      if (y(r, k).is_zero()) {
        if (!x(r, k).is_zero()) return std::nullopt;
        continue;
      }
      ExactScalar q = x(r, k) / y(r, k);
      if (!c) c = q;
      else if (*c != q) return std::nullopt;
    }
  return c;
}

}  // namespace qexch
