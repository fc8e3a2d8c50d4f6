#pragma once

// Pointed finite alphabets, optionally carrying a module or group structure,
// and set maps A^m -> A checked against that structure.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "symba/error.hpp"
#include "symba/group.hpp"
#include "symba/modmat.hpp"

namespace symba {

using Symbol = std::uint32_t;

enum class Flavor { plain, module, group };

class Alphabet {
 public:
  static Alphabet plain(std::uint32_t size) {
    if (size < 1) fail(Errc::invalid_input, "alphabet size must be at least 1");
    Alphabet a;
    a.flavor_ = Flavor::plain;
    a.size_ = size;
    return a;
  }

  // (Z/modulus)^dim. Symbols encode vectors in base `modulus`, first
  // component most significant; the zero vector is symbol 0.
  static Alphabet module(std::uint32_t modulus, std::uint32_t dim) {
    if (modulus < 2 || dim < 1) fail(Errc::invalid_input, "module alphabet needs modulus >= 2 and dim >= 1");
    Alphabet a;
    a.flavor_ = Flavor::module;
    a.modulus_ = modulus;
    a.dim_ = dim;
    a.size_ = static_cast<std::uint32_t>(checked_power(modulus, dim, std::uint64_t{1} << 24, "module alphabet"));
    return a;
  }

  static Alphabet group(const Group& g) {
    if (g.kind() != GroupKind::finite) fail(Errc::invalid_input, "group alphabet needs a finite table group");
    Alphabet a;
    a.flavor_ = Flavor::group;
    a.size_ = static_cast<std::uint32_t>(g.rank());
    a.group_ = g;
    a.base_ = static_cast<Symbol>(g.identity().code[0]);
    return a;
  }

  static Alphabet group(CayleyTable table) { return group(Group::finite(std::move(table))); }

  Flavor flavor() const { return flavor_; }
  std::uint32_t size() const { return size_; }
  Symbol basepoint() const { return base_; }
  std::uint32_t modulus() const { return modulus_; }
  std::uint32_t dim() const { return dim_; }
  const Group& structure_group() const { return *group_; }

  bool contains(Symbol s) const { return s < size_; }

  void validate(Symbol s) const {
    if (!contains(s)) fail(Errc::invalid_input, "symbol " + std::to_string(s) + " outside alphabet");
  }

  std::vector<std::uint32_t> components(Symbol s) const {
    std::vector<std::uint32_t> v(dim_);
    for (std::size_t i = dim_; i-- > 0;) {
      v[i] = s % modulus_;
      s /= modulus_;
    }
    return v;
  }

  Symbol from_components(std::span<const std::uint32_t> v) const {
    if (v.size() != dim_) fail(Errc::invalid_input, "vector length does not match module dimension");
    Symbol s = 0;
    for (auto c : v) {
      if (c >= modulus_) fail(Errc::invalid_input, "vector component not reduced");
      s = s * modulus_ + c;
    }
    return s;
  }

  Symbol add(Symbol a, Symbol b) const {
    auto x = components(a), y = components(b);
    for (std::size_t i = 0; i < dim_; ++i) x[i] = (x[i] + y[i]) % modulus_;
    return from_components(x);
  }

  Symbol scale(std::uint32_t c, Symbol a) const {
    auto x = components(a);
    for (auto& v : x) v = static_cast<std::uint32_t>(std::uint64_t{v} * c % modulus_);
    return from_components(x);
  }

  Symbol group_mul(Symbol a, Symbol b) const { return group_->table()[a][b]; }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    if (a.flavor_ != b.flavor_ || a.size_ != b.size_ || a.modulus_ != b.modulus_ || a.dim_ != b.dim_)
      return false;
    if (a.flavor_ == Flavor::group) return *a.group_ == *b.group_;
    return true;
  }

 private:
  Flavor flavor_ = Flavor::plain;
  std::uint32_t size_ = 1;
  std::uint32_t modulus_ = 0;
  std::uint32_t dim_ = 0;
  Symbol base_ = 0;
  std::optional<Group> group_;
};

// A set map A^m -> A, either as a full lookup table (mixed radix, leftmost
// coordinate most significant) or, over a module alphabet, as m matrices
// with map(x) = sum_k C_k x_k.
class StructuredMap {
 public:
  static StructuredMap table(std::size_t arity, std::vector<Symbol> entries, const Alphabet& A) {
    auto expected = checked_power(A.size(), arity, limits().max_scan, "rule table");
    if (entries.size() != expected) {
      fail(Errc::invalid_input, "table has " + std::to_string(entries.size()) + " entries, expected " +
                                    std::to_string(expected));
    }
    for (auto s : entries) A.validate(s);
    StructuredMap m;
    m.arity_ = arity;
    m.data_ = std::move(entries);
    return m;
  }

  static StructuredMap matrices(std::vector<ModMatrix> coeffs, const Alphabet& A) {
    if (A.flavor() != Flavor::module) fail(Errc::invalid_input, "matrix maps need a module alphabet");
    for (const auto& c : coeffs) {
      if (c.rows() != A.dim() || c.cols() != A.dim() || c.modulus() != A.modulus())
        fail(Errc::invalid_input, "coefficient matrix shape does not match the module");
    }
    StructuredMap m;
    m.arity_ = coeffs.size();
    m.data_ = std::move(coeffs);
    return m;
  }

  std::size_t arity() const { return arity_; }
  bool is_table() const { return std::holds_alternative<std::vector<Symbol>>(data_); }
  bool is_matrix() const { return !is_table(); }
  const std::vector<Symbol>& entries() const { return std::get<std::vector<Symbol>>(data_); }
  const std::vector<ModMatrix>& coefficients() const { return std::get<std::vector<ModMatrix>>(data_); }

  Symbol eval(std::span<const Symbol> args, const Alphabet& A) const {
    if (args.size() != arity_) fail(Errc::invalid_input, "map applied to wrong number of arguments");
    if (is_table()) {
      std::uint64_t idx = 0;
      for (auto s : args) idx = idx * A.size() + s;
      return entries()[idx];
    }
    const auto& cs = coefficients();
    const std::uint64_t n = A.modulus();
    std::vector<std::uint64_t> out(A.dim(), 0);
    for (std::size_t k = 0; k < arity_; ++k) {
      if (args[k] == 0) continue;
      auto x = A.components(args[k]);
      for (std::size_t i = 0; i < A.dim(); ++i)
        for (std::size_t j = 0; j < A.dim(); ++j) out[i] = (out[i] + cs[k](i, j) * x[j]) % n;
    }
    std::vector<std::uint32_t> o(out.begin(), out.end());
    return A.from_components(o);
  }

  StructuredMap to_table(const Alphabet& A) const {
    if (is_table()) return *this;
    auto total = checked_power(A.size(), arity_, limits().max_scan, "rule table expansion");
    std::vector<Symbol> entries(total);
    std::vector<Symbol> args(arity_, 0);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      entries[idx] = eval(args, A);
      for (std::size_t k = arity_; k-- > 0;) {
        if (++args[k] < A.size()) break;
        args[k] = 0;
      }
    }
    return table(arity_, std::move(entries), A);
  }

  friend bool operator==(const StructuredMap&, const StructuredMap&) = default;

 private:
  std::size_t arity_ = 0;
  std::variant<std::vector<Symbol>, std::vector<ModMatrix>> data_;
};

namespace detail {

// Calls fn(args, index) for every args in A^n in table order; stops early when fn returns false.
template <class Fn>
bool for_each_word(std::size_t n, std::uint32_t q, std::uint64_t cap, const char* what, Fn&& fn) {
  auto total = checked_power(q, n, cap, what);
  std::vector<Symbol> args(n, 0);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    if (!fn(static_cast<const std::vector<Symbol>&>(args), idx)) return false;
    for (std::size_t k = n; k-- > 0;) {
      if (++args[k] < q) break;
      args[k] = 0;
    }
  }
  return true;
}

}  // namespace detail

inline bool verify_pointed(const StructuredMap& map, const Alphabet& A) {
  if (map.is_matrix()) return true;
  std::vector<Symbol> base(map.arity(), A.basepoint());
  return map.eval(base, A) == A.basepoint();
}

// Homomorphism check against the alphabet's module or group structure.
inline bool verify_structure(const StructuredMap& map, const Alphabet& A) {
  if (A.flavor() == Flavor::plain) fail(Errc::invalid_input, "plain alphabets carry no structure to verify");
  if (map.is_matrix()) return true;
  const std::size_t m = map.arity();
  const auto& t = map.entries();
  const std::uint32_t q = A.size();
  checked_power(q, 2 * m, limits().max_scan, "structure check");
  auto combine = [&](Symbol a, Symbol b) { return A.flavor() == Flavor::module ? A.add(a, b) : A.group_mul(a, b); };
  std::vector<Symbol> z(m);
  bool ok = detail::for_each_word(m, q, limits().max_scan, "structure check", [&](const auto& x, std::uint64_t ix) {
    return detail::for_each_word(m, q, limits().max_scan, "structure check", [&](const auto& y, std::uint64_t iy) {
      for (std::size_t k = 0; k < m; ++k) z[k] = combine(x[k], y[k]);
      return map.eval(z, A) == combine(t[ix], t[iy]);
    });
  });
  if (!ok || A.flavor() == Flavor::group) return ok;
  // Scalar compatibility.
  return detail::for_each_word(m, q, limits().max_scan, "structure check", [&](const auto& x, std::uint64_t ix) {
    for (std::uint32_t c = 0; c < A.modulus(); ++c) {
      for (std::size_t k = 0; k < m; ++k) z[k] = A.scale(c, x[k]);
      if (map.eval(z, A) != A.scale(c, t[ix])) return false;
    }
    return true;
  });
}

struct MapClassification {
  bool injective = false;
  bool surjective = false;
  bool bijective = false;
};

// Injectivity/surjectivity of a total endomap of {0..n-1} given by its table.
inline MapClassification finite_map_classify(std::span<const std::uint64_t> map) {
  const std::size_t n = map.size();
  std::vector<bool> hit(n, false);
  bool injective = true;
  std::size_t distinct = 0;
  for (auto v : map) {
    if (v >= n) fail(Errc::invalid_input, "endomap value outside its carrier");
    if (hit[v]) {
      injective = false;
    } else {
      hit[v] = true;
      ++distinct;
    }
  }
  MapClassification c;
  c.injective = injective;
  c.surjective = distinct == n;
  c.bijective = c.injective && c.surjective;
  return c;
}

// First pair i < j with map[i] == map[j], scanning j in increasing order.
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> find_collision(std::span<const std::uint64_t> map) {
  std::vector<std::int64_t> first(map.size(), -1);
  for (std::uint64_t j = 0; j < map.size(); ++j) {
    auto v = map[j];
    if (first[v] >= 0) return std::make_pair(static_cast<std::uint64_t>(first[v]), j);
    first[v] = static_cast<std::int64_t>(j);
  }
  return std::nullopt;
}

}  // namespace symba
