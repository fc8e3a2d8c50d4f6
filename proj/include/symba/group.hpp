#pragma once

// Finitely generated group universes: canonical element encodings, the group
// law, and the finite-subset combinatorics (balls, products, symmetrization).

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "symba/error.hpp"

namespace symba {

// Canonical encoding of a group element. Meaning depends on the group kind:
//   free_abelian(d)  d integer coordinates
//   free(k)          reduced word; generator i is letter i+1, its inverse -(i+1)
//   finite           one table index
//   symmetric(n)     image array of the permutation
//   product          concatenation of [length, component code...] per factor
struct Elem {
  std::vector<std::int64_t> code;

  Elem() = default;
  explicit Elem(std::vector<std::int64_t> c) : code(std::move(c)) {}
  Elem(std::initializer_list<std::int64_t> c) : code(c) {}

  friend bool operator==(const Elem&, const Elem&) = default;

  // Shortlex on the code; this is the canonical total order of every subset.
  friend std::strong_ordering operator<=>(const Elem& a, const Elem& b) {
    if (a.code.size() != b.code.size()) return a.code.size() <=> b.code.size();
    return std::lexicographical_compare_three_way(a.code.begin(), a.code.end(), b.code.begin(),
                                                  b.code.end());
  }
};

struct ElemHash {
  std::size_t operator()(const Elem& e) const noexcept {
    std::uint64_t h = 1469598103934665603ull ^ e.code.size();
    for (auto v : e.code) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

inline std::string to_string(const Elem& e) {
  std::string s = "(";
  for (std::size_t i = 0; i < e.code.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(e.code[i]);
  }
  return s + ")";
}

enum class GroupKind { free_abelian, free, finite, symmetric, product };

using CayleyTable = std::vector<std::vector<std::uint32_t>>;

class Group {
 public:
  // The trivial group Z^0.
  Group() : d_(free_abelian(0).d_) {}

  static Group free_abelian(std::size_t rank) {
    auto d = std::make_shared<Data>();
    d->kind = GroupKind::free_abelian;
    d->rank = rank;
    for (std::size_t i = 0; i < rank; ++i) {
      Elem g(std::vector<std::int64_t>(rank, 0));
      g.code[i] = 1;
      d->generators.push_back(g);
    }
    return Group(finish(std::move(d)));
  }

  static Group free(std::size_t rank) {
    auto d = std::make_shared<Data>();
    d->kind = GroupKind::free;
    d->rank = rank;
    for (std::size_t i = 0; i < rank; ++i) {
      d->generators.push_back(Elem{static_cast<std::int64_t>(i + 1)});
    }
    return Group(finish(std::move(d)));
  }

  // Group given by its Cayley table. Without explicit generators a canonical
  // generating set is chosen greedily in index order.
  static Group finite(CayleyTable table,
                      std::optional<std::vector<std::uint32_t>> generators = std::nullopt) {
    auto d = std::make_shared<Data>();
    d->kind = GroupKind::finite;
    validate_table(table, d->identity_index, d->inverse);
    d->rank = table.size();
    d->table = std::move(table);
    if (generators) {
      for (auto g : *generators) {
        if (g >= d->rank) fail(Errc::invalid_input, "finite group generator out of range");
        d->generators.push_back(Elem{static_cast<std::int64_t>(g)});
      }
    } else {
      greedy_generators(*d);
    }
    return Group(finish(std::move(d)));
  }

  static Group cyclic(std::uint32_t n) {
    if (n == 0) fail(Errc::invalid_input, "cyclic group of order 0");
    CayleyTable t(n, std::vector<std::uint32_t>(n));
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = 0; j < n; ++j) t[i][j] = (i + j) % n;
    return finite(std::move(t));
  }

  static Group trivial() { return cyclic(1); }

  // Full symmetric group on {0..n-1}; (p*q)(i) = p(q(i)).
  static Group symmetric(std::size_t degree) {
    auto d = std::make_shared<Data>();
    d->kind = GroupKind::symmetric;
    d->rank = degree;
    if (degree >= 2) {
      std::vector<std::int64_t> swap01(degree), cycle(degree);
      std::iota(swap01.begin(), swap01.end(), 0);
      std::swap(swap01[0], swap01[1]);
      for (std::size_t i = 0; i < degree; ++i) cycle[i] = static_cast<std::int64_t>((i + 1) % degree);
      d->generators.emplace_back(swap01);
      if (degree > 2) d->generators.emplace_back(cycle);
    }
    return Group(finish(std::move(d)));
  }

  static Group product(std::vector<Group> factors) {
    auto d = std::make_shared<Data>();
    d->kind = GroupKind::product;
    d->rank = factors.size();
    d->factors = std::move(factors);
    Group tmp(d);
    for (std::size_t i = 0; i < d->factors.size(); ++i) {
      for (const auto& g : d->factors[i].generators()) {
        std::vector<Elem> parts;
        for (std::size_t j = 0; j < d->factors.size(); ++j) {
          parts.push_back(j == i ? g : d->factors[j].identity());
        }
        d->generators.push_back(tmp.join(parts));
      }
    }
    return Group(finish(std::move(d)));
  }

  GroupKind kind() const { return d_->kind; }

  // Rank (free kinds), degree (symmetric), order (finite) or factor count (product).
  std::size_t rank() const { return d_->rank; }

  const std::vector<Group>& factors() const { return d_->factors; }
  const CayleyTable& table() const { return d_->table; }

  const std::vector<Elem>& generators() const { return d_->generators; }

  // Generators together with their inverses, canonical order, identity removed.
  const std::vector<Elem>& steps() const { return d_->steps; }

  Elem identity() const {
    switch (d_->kind) {
      case GroupKind::free_abelian: return Elem(std::vector<std::int64_t>(d_->rank, 0));
      case GroupKind::free: return Elem{};
      case GroupKind::finite: return Elem{static_cast<std::int64_t>(d_->identity_index)};
      case GroupKind::symmetric: {
        std::vector<std::int64_t> p(d_->rank);
        std::iota(p.begin(), p.end(), 0);
        return Elem(std::move(p));
      }
      case GroupKind::product: {
        std::vector<Elem> parts;
        for (const auto& f : d_->factors) parts.push_back(f.identity());
        return join(parts);
      }
    }
    fail(Errc::internal, "unknown group kind");
  }

  Elem mul(const Elem& a, const Elem& b) const {
    validate(a);
    validate(b);
    return mul_unchecked(a, b);
  }

  Elem inv(const Elem& a) const {
    validate(a);
    return inv_unchecked(a);
  }

  // Group law on encodings already known to be valid.
  Elem mul_unchecked(const Elem& a, const Elem& b) const {
    switch (d_->kind) {
      case GroupKind::free_abelian: {
        Elem r = a;
        for (std::size_t i = 0; i < r.code.size(); ++i) r.code[i] += b.code[i];
        return r;
      }
      case GroupKind::free: {
        Elem r = a;
        for (auto letter : b.code) {
          if (!r.code.empty() && r.code.back() == -letter) {
            r.code.pop_back();
          } else {
            r.code.push_back(letter);
          }
        }
        return r;
      }
      case GroupKind::finite:
        return Elem{static_cast<std::int64_t>(
            d_->table[static_cast<std::size_t>(a.code[0])][static_cast<std::size_t>(b.code[0])])};
      case GroupKind::symmetric: {
        Elem r = a;
        for (std::size_t i = 0; i < r.code.size(); ++i)
          r.code[i] = a.code[static_cast<std::size_t>(b.code[i])];
        return r;
      }
      case GroupKind::product: {
        auto pa = split(a), pb = split(b);
        for (std::size_t i = 0; i < pa.size(); ++i) pa[i] = d_->factors[i].mul_unchecked(pa[i], pb[i]);
        return join(pa);
      }
    }
    fail(Errc::internal, "unknown group kind");
  }

  Elem inv_unchecked(const Elem& a) const {
    switch (d_->kind) {
      case GroupKind::free_abelian: {
        Elem r = a;
        for (auto& v : r.code) v = -v;
        return r;
      }
      case GroupKind::free: {
        Elem r;
        r.code.reserve(a.code.size());
        for (auto it = a.code.rbegin(); it != a.code.rend(); ++it) r.code.push_back(-*it);
        return r;
      }
      case GroupKind::finite:
        return Elem{static_cast<std::int64_t>(d_->inverse[static_cast<std::size_t>(a.code[0])])};
      case GroupKind::symmetric: {
        Elem r = a;
        for (std::size_t i = 0; i < a.code.size(); ++i)
          r.code[static_cast<std::size_t>(a.code[i])] = static_cast<std::int64_t>(i);
        return r;
      }
      case GroupKind::product: {
        auto pa = split(a);
        for (std::size_t i = 0; i < pa.size(); ++i) pa[i] = d_->factors[i].inv_unchecked(pa[i]);
        return join(pa);
      }
    }
    fail(Errc::internal, "unknown group kind");
  }

  bool is_valid(const Elem& a) const {
    switch (d_->kind) {
      case GroupKind::free_abelian: return a.code.size() == d_->rank;
      case GroupKind::free: {
        for (std::size_t i = 0; i < a.code.size(); ++i) {
          auto l = a.code[i];
          if (l == 0 || static_cast<std::size_t>(l < 0 ? -l : l) > d_->rank) return false;
          if (i > 0 && a.code[i - 1] == -l) return false;
        }
        return true;
      }
      case GroupKind::finite:
        return a.code.size() == 1 && a.code[0] >= 0 &&
               static_cast<std::size_t>(a.code[0]) < d_->rank;
      case GroupKind::symmetric: {
        if (a.code.size() != d_->rank) return false;
        std::vector<bool> seen(d_->rank, false);
        for (auto v : a.code) {
          if (v < 0 || static_cast<std::size_t>(v) >= d_->rank || seen[static_cast<std::size_t>(v)])
            return false;
          seen[static_cast<std::size_t>(v)] = true;
        }
        return true;
      }
      case GroupKind::product: {
        auto parts = try_split(a);
        if (!parts) return false;
        for (std::size_t i = 0; i < parts->size(); ++i)
          if (!d_->factors[i].is_valid((*parts)[i])) return false;
        return true;
      }
    }
    return false;
  }

  void validate(const Elem& a) const {
    if (!is_valid(a)) fail(Errc::invalid_input, "malformed element encoding " + to_string(a));
  }

  bool is_finite() const {
    switch (d_->kind) {
      case GroupKind::free_abelian:
      case GroupKind::free: return d_->rank == 0;
      case GroupKind::finite:
      case GroupKind::symmetric: return true;
      case GroupKind::product:
        return std::all_of(d_->factors.begin(), d_->factors.end(),
                           [](const Group& f) { return f.is_finite(); });
    }
    return false;
  }

  // Group order when finite and representable in 64 bits.
  std::optional<std::uint64_t> order() const {
    switch (d_->kind) {
      case GroupKind::free_abelian:
      case GroupKind::free:
        if (d_->rank == 0) return 1;
        return std::nullopt;
      case GroupKind::finite: return d_->rank;
      case GroupKind::symmetric: {
        std::uint64_t r = 1;
        for (std::uint64_t i = 2; i <= d_->rank; ++i) {
          if (r > std::numeric_limits<std::uint64_t>::max() / i) return std::nullopt;
          r *= i;
        }
        return r;
      }
      case GroupKind::product: {
        std::uint64_t r = 1;
        for (const auto& f : d_->factors) {
          auto o = f.order();
          if (!o) return std::nullopt;
          if (*o != 0 && r > std::numeric_limits<std::uint64_t>::max() / *o) return std::nullopt;
          r *= *o;
        }
        return r;
      }
    }
    return std::nullopt;
  }

  // Product encoding helpers.
  Elem join(const std::vector<Elem>& parts) const {
    Elem r;
    for (const auto& p : parts) {
      r.code.push_back(static_cast<std::int64_t>(p.code.size()));
      r.code.insert(r.code.end(), p.code.begin(), p.code.end());
    }
    return r;
  }

  std::vector<Elem> split(const Elem& a) const {
    auto parts = try_split(a);
    if (!parts) fail(Errc::invalid_input, "malformed product element " + to_string(a));
    return *parts;
  }

  friend bool operator==(const Group& a, const Group& b) {
    if (a.d_ == b.d_) return true;
    const Data& x = *a.d_;
    const Data& y = *b.d_;
    if (x.kind != y.kind || x.rank != y.rank) return false;
    if (x.kind == GroupKind::finite && (x.table != y.table || x.generators != y.generators))
      return false;
    return x.factors == y.factors;
  }

 private:
  struct Data {
    GroupKind kind = GroupKind::free_abelian;
    std::size_t rank = 0;
    CayleyTable table;
    std::vector<std::uint32_t> inverse;
    std::uint32_t identity_index = 0;
    std::vector<Group> factors;
    std::vector<Elem> generators;
    std::vector<Elem> steps;
  };

  explicit Group(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

  static std::shared_ptr<const Data> finish(std::shared_ptr<Data> d) {
    Group tmp(d);
    std::vector<Elem> steps;
    Elem id = tmp.identity();
    for (const auto& g : d->generators) {
      tmp.validate(g);
      steps.push_back(g);
      steps.push_back(tmp.inv_unchecked(g));
    }
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    steps.erase(std::remove(steps.begin(), steps.end(), id), steps.end());
    d->steps = std::move(steps);
    return d;
  }

  static void validate_table(const CayleyTable& t, std::uint32_t& identity,
                             std::vector<std::uint32_t>& inverse) {
    const std::size_t n = t.size();
    if (n == 0) fail(Errc::invalid_input, "empty multiplication table");
    for (const auto& row : t) {
      if (row.size() != n) fail(Errc::invalid_input, "multiplication table is not square");
      std::vector<bool> seen(n, false);
      for (auto v : row) {
        if (v >= n || seen[v]) fail(Errc::invalid_input, "multiplication table row is not a permutation");
        seen[v] = true;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<bool> seen(n, false);
      for (std::size_t i = 0; i < n; ++i) {
        if (seen[t[i][j]]) fail(Errc::invalid_input, "multiplication table column is not a permutation");
        seen[t[i][j]] = true;
      }
    }
    std::optional<std::uint32_t> id;
    for (std::uint32_t e = 0; e < n && !id; ++e) {
      bool ok = true;
      for (std::uint32_t x = 0; x < n && ok; ++x) ok = t[e][x] == x && t[x][e] == x;
      if (ok) id = e;
    }
    if (!id) fail(Errc::invalid_input, "multiplication table has no identity");
    identity = *id;
    // Cubic check; larger tables are accepted on the latin-square test alone.
    if (n <= 256) {
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t c = 0; c < n; ++c)
            if (t[t[a][b]][c] != t[a][t[b][c]])
              fail(Errc::invalid_input, "multiplication table is not associative");
    }
    inverse.assign(n, 0);
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b)
        if (t[a][b] == identity) inverse[a] = b;
  }

  static void greedy_generators(Data& d) {
    const std::size_t n = d.rank;
    std::vector<bool> covered(n, false);
    std::vector<std::uint32_t> gens;
    covered[d.identity_index] = true;
    auto close = [&] {
      std::vector<std::uint32_t> frontier;
      for (std::uint32_t i = 0; i < n; ++i)
        if (covered[i]) frontier.push_back(i);
      while (!frontier.empty()) {
        std::vector<std::uint32_t> next;
        for (auto x : frontier)
          for (auto g : gens) {
            auto y = d.table[x][g];
            if (!covered[y]) {
              covered[y] = true;
              next.push_back(y);
            }
          }
        frontier = std::move(next);
      }
    };
    for (std::uint32_t i = 0; i < n; ++i) {
      if (covered[i]) continue;
      gens.push_back(i);
      close();
    }
    for (auto g : gens) d.generators.push_back(Elem{static_cast<std::int64_t>(g)});
  }

  std::optional<std::vector<Elem>> try_split(const Elem& a) const {
    std::vector<Elem> parts;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < d_->factors.size(); ++i) {
      if (pos >= a.code.size()) return std::nullopt;
      auto len = a.code[pos++];
      if (len < 0 || pos + static_cast<std::size_t>(len) > a.code.size()) return std::nullopt;
      parts.emplace_back(std::vector<std::int64_t>(a.code.begin() + static_cast<std::ptrdiff_t>(pos),
                                                   a.code.begin() + static_cast<std::ptrdiff_t>(pos) + len));
      pos += static_cast<std::size_t>(len);
    }
    if (pos != a.code.size()) return std::nullopt;
    return parts;
  }

  std::shared_ptr<const Data> d_;
};

// Duplicate-free set of elements kept in canonical order, with position lookup.
class FiniteSubset {
 public:
  FiniteSubset() = default;

  explicit FiniteSubset(std::vector<Elem> elems) : elems_(std::move(elems)) {
    std::sort(elems_.begin(), elems_.end());
    elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
    reindex();
  }

  FiniteSubset(std::initializer_list<Elem> elems) : FiniteSubset(std::vector<Elem>(elems)) {}

  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  const Elem& operator[](std::size_t i) const { return elems_[i]; }
  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }
  const std::vector<Elem>& elements() const { return elems_; }

  bool contains(const Elem& e) const { return index_.count(e) != 0; }

  std::optional<std::size_t> find(const Elem& e) const {
    auto it = index_.find(e);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const Elem& e) const {
    auto it = index_.find(e);
    if (it == index_.end()) fail(Errc::invalid_input, "element " + to_string(e) + " not in subset");
    return it->second;
  }

  bool is_subset_of(const FiniteSubset& other) const {
    return std::all_of(elems_.begin(), elems_.end(),
                       [&](const Elem& e) { return other.contains(e); });
  }

  friend bool operator==(const FiniteSubset& a, const FiniteSubset& b) { return a.elems_ == b.elems_; }

 private:
  void reindex() {
    index_.clear();
    index_.reserve(elems_.size());
    for (std::size_t i = 0; i < elems_.size(); ++i) index_.emplace(elems_[i], i);
  }

  std::vector<Elem> elems_;
  std::unordered_map<Elem, std::size_t, ElemHash> index_;
};

inline FiniteSubset set_union(const FiniteSubset& a, const FiniteSubset& b) {
  std::vector<Elem> v(a.begin(), a.end());
  v.insert(v.end(), b.begin(), b.end());
  return FiniteSubset(std::move(v));
}

namespace detail {

inline void check_subset_cap(std::size_t n) {
  if (n > limits().max_subset) {
    fail(Errc::resource_cap,
         "subset of size " + std::to_string(n) + " exceeds cap " + std::to_string(limits().max_subset));
  }
}

inline void validate_subset(const Group& G, const FiniteSubset& S) {
  for (const auto& e : S) G.validate(e);
}

// Products of at most `r` factors from `steps`, starting at the identity.
inline FiniteSubset word_ball(const Group& G, const std::vector<Elem>& steps, std::size_t r) {
  std::unordered_set<Elem, ElemHash> seen;
  std::vector<Elem> all{G.identity()};
  seen.insert(all.front());
  std::vector<Elem> frontier = all;
  for (std::size_t k = 0; k < r && !frontier.empty(); ++k) {
    std::vector<Elem> next;
    for (const auto& x : frontier) {
      for (const auto& s : steps) {
        Elem y = G.mul_unchecked(x, s);
        if (seen.insert(y).second) {
          next.push_back(y);
          all.push_back(y);
          check_subset_cap(all.size());
        }
      }
    }
    frontier = std::move(next);
  }
  return FiniteSubset(std::move(all));
}

}  // namespace detail

inline Elem element_mul(const Group& G, const Elem& a, const Elem& b) { return G.mul(a, b); }
inline Elem element_inv(const Group& G, const Elem& a) { return G.inv(a); }

// All elements of word length <= r with respect to the distinguished generators.
inline FiniteSubset ball(const Group& G, std::size_t r) { return detail::word_ball(G, G.steps(), r); }

inline FiniteSubset set_product(const Group& G, const FiniteSubset& M, const FiniteSubset& N) {
  detail::validate_subset(G, M);
  detail::validate_subset(G, N);
  std::unordered_set<Elem, ElemHash> seen;
  std::vector<Elem> out;
  for (const auto& m : M) {
    for (const auto& n : N) {
      Elem p = G.mul_unchecked(m, n);
      if (seen.insert(p).second) {
        out.push_back(std::move(p));
        detail::check_subset_cap(out.size());
      }
    }
  }
  return FiniteSubset(std::move(out));
}

// M ∪ M⁻¹ ∪ {1}.
inline FiniteSubset symmetrize(const Group& G, const FiniteSubset& M) {
  detail::validate_subset(G, M);
  std::vector<Elem> out{G.identity()};
  for (const auto& m : M) {
    out.push_back(m);
    out.push_back(G.inv_unchecked(m));
  }
  return FiniteSubset(std::move(out));
}

inline FiniteSubset inverse_set(const Group& G, const FiniteSubset& M) {
  std::vector<Elem> out;
  for (const auto& m : M) out.push_back(G.inv(m));
  return FiniteSubset(std::move(out));
}

// Radius-r ball of the subgroup generated by S.
inline FiniteSubset generated_ball(const Group& G, const FiniteSubset& S, std::size_t r) {
  auto X = symmetrize(G, S);
  return detail::word_ball(G, X.elements(), r);
}

// Every element of a finite group, canonical order.
inline FiniteSubset elements(const Group& G) {
  auto ord = G.order();
  if (!G.is_finite() || !ord) fail(Errc::invalid_input, "cannot enumerate an infinite group");
  detail::check_subset_cap(static_cast<std::size_t>(*ord));
  switch (G.kind()) {
    case GroupKind::finite: {
      std::vector<Elem> v;
      for (std::size_t i = 0; i < G.rank(); ++i) v.push_back(Elem{static_cast<std::int64_t>(i)});
      return FiniteSubset(std::move(v));
    }
    case GroupKind::symmetric: {
      std::vector<std::int64_t> p(G.rank());
      std::iota(p.begin(), p.end(), 0);
      std::vector<Elem> v;
      do {
        v.emplace_back(p);
      } while (std::next_permutation(p.begin(), p.end()));
      return FiniteSubset(std::move(v));
    }
    case GroupKind::product: {
      std::vector<std::vector<Elem>> partial{{}};
      for (const auto& f : G.factors()) {
        auto fe = elements(f);
        std::vector<std::vector<Elem>> next;
        for (const auto& p : partial)
          for (const auto& e : fe) {
            auto q = p;
            q.push_back(e);
            next.push_back(std::move(q));
          }
        partial = std::move(next);
      }
      std::vector<Elem> v;
      for (const auto& p : partial) v.push_back(G.join(p));
      return FiniteSubset(std::move(v));
    }
    default: return FiniteSubset({G.identity()});
  }
}

}  // namespace symba
