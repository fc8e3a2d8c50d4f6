#pragma once

// Exact arithmetic in (Z/n)[G] and in d×d matrices over it. With the
// convention τ(x)(g) = Σ_m C_m x(gm), composition σ∘τ is the product D·C.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "symba/alphabet.hpp"
#include "symba/ca.hpp"
#include "symba/group.hpp"
#include "symba/modmat.hpp"

namespace symba {

class GroupRingElement {
 public:
  GroupRingElement(Group G, std::uint64_t modulus) : G_(std::move(G)), mod_(modulus) {
    if (modulus < 2) fail(Errc::invalid_input, "group ring modulus must be at least 2");
  }

  static GroupRingElement delta(const Group& G, std::uint64_t modulus, const Elem& g, std::uint64_t c = 1) {
    GroupRingElement x(G, modulus);
    x.add_term(g, c);
    return x;
  }

  static GroupRingElement scalar(const Group& G, std::uint64_t modulus, std::uint64_t c) {
    return delta(G, modulus, G.identity(), c);
  }

  const Group& group() const { return G_; }
  std::uint64_t modulus() const { return mod_; }
  const std::map<Elem, std::uint64_t>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  std::uint64_t coef(const Elem& g) const {
    auto it = terms_.find(g);
    return it == terms_.end() ? 0 : it->second;
  }

  void add_term(const Elem& g, std::uint64_t c) {
    G_.validate(g);
    c %= mod_;
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(g, c);
    if (!fresh) {
      it->second = (it->second + c) % mod_;
      if (it->second == 0) terms_.erase(it);
    }
  }

  friend GroupRingElement operator+(const GroupRingElement& x, const GroupRingElement& y) {
    check_same(x, y);
    GroupRingElement r = x;
    for (const auto& [g, c] : y.terms_) r.add_term(g, c);
    return r;
  }

  GroupRingElement operator-() const {
    GroupRingElement r(G_, mod_);
    for (const auto& [g, c] : terms_) r.terms_.emplace(g, mod_ - c);
    return r;
  }

  friend GroupRingElement operator-(const GroupRingElement& x, const GroupRingElement& y) { return x + (-y); }

  // (xy)(h) = Σ_{ab = h} x(a) y(b).
  friend GroupRingElement operator*(const GroupRingElement& x, const GroupRingElement& y) {
    check_same(x, y);
    GroupRingElement r(x.G_, x.mod_);
    for (const auto& [a, ca] : x.terms_)
      for (const auto& [b, cb] : y.terms_) r.add_term(x.G_.mul_unchecked(a, b), ca * cb);
    return r;
  }

  friend bool operator==(const GroupRingElement& x, const GroupRingElement& y) {
    return x.mod_ == y.mod_ && x.G_ == y.G_ && x.terms_ == y.terms_;
  }

 private:
  static void check_same(const GroupRingElement& x, const GroupRingElement& y) {
    if (x.mod_ != y.mod_ || !(x.G_ == y.G_)) fail(Errc::invalid_input, "group ring elements over different rings");
  }

  Group G_;
  std::uint64_t mod_;
  std::map<Elem, std::uint64_t> terms_;
};

inline GroupRingElement gr_mul(const GroupRingElement& x, const GroupRingElement& y) { return x * y; }

class GroupRingMatrix {
 public:
  GroupRingMatrix(Group G, std::uint64_t modulus, std::size_t dim)
      : G_(std::move(G)), mod_(modulus), dim_(dim), entries_(dim * dim, GroupRingElement(G_, modulus)) {}

  static GroupRingMatrix identity(const Group& G, std::uint64_t modulus, std::size_t dim) {
    GroupRingMatrix m(G, modulus, dim);
    for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = GroupRingElement::scalar(G, modulus, 1);
    return m;
  }

  const Group& group() const { return G_; }
  std::uint64_t modulus() const { return mod_; }
  std::size_t dim() const { return dim_; }

  GroupRingElement& at(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  const GroupRingElement& at(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

  // Union of the entries' supports.
  FiniteSubset support() const {
    std::vector<Elem> s;
    for (const auto& e : entries_)
      for (const auto& [g, c] : e.terms()) s.push_back(g);
    return FiniteSubset(std::move(s));
  }

  friend bool operator==(const GroupRingMatrix& a, const GroupRingMatrix& b) {
    return a.dim_ == b.dim_ && a.mod_ == b.mod_ && a.entries_ == b.entries_;
  }

 private:
  Group G_;
  std::uint64_t mod_;
  std::size_t dim_;
  std::vector<GroupRingElement> entries_;
};

inline GroupRingMatrix matrix_mul(const GroupRingMatrix& X, const GroupRingMatrix& Y) {
  if (X.dim() != Y.dim() || X.modulus() != Y.modulus() || !(X.group() == Y.group()))
    fail(Errc::invalid_input, "group ring matrices do not match");
  GroupRingMatrix R(X.group(), X.modulus(), X.dim());
  for (std::size_t i = 0; i < X.dim(); ++i)
    for (std::size_t j = 0; j < X.dim(); ++j) {
      GroupRingElement s(X.group(), X.modulus());
      for (std::size_t k = 0; k < X.dim(); ++k) s = s + X.at(i, k) * Y.at(k, j);
      R.at(i, j) = std::move(s);
    }
  return R;
}

inline bool is_identity(const GroupRingMatrix& X) {
  return X == GroupRingMatrix::identity(X.group(), X.modulus(), X.dim());
}

// Coefficient matrices of a linear rule; table maps must pass verify_structure.
inline std::vector<ModMatrix> linear_coefficients(const CellularAutomaton& tau) {
  const auto& A = tau.alphabet();
  if (A.flavor() != Flavor::module) fail(Errc::invalid_input, "linear CA needs a module alphabet");
  if (tau.map().is_matrix()) return tau.map().coefficients();
  if (!verify_structure(tau.map(), A)) fail(Errc::invalid_input, "rule table is not linear");
  const std::size_t d = A.dim();
  std::vector<ModMatrix> cs;
  std::vector<Symbol> args(tau.memory().size(), 0);
  for (std::size_t k = 0; k < args.size(); ++k) {
    ModMatrix c(d, d, A.modulus());
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<std::uint32_t> e(d, 0);
      e[j] = 1;
      args[k] = A.from_components(e);
      auto col = A.components(tau.map().eval(args, A));
      for (std::size_t i = 0; i < d; ++i) c.set(i, j, col[i]);
    }
    args[k] = 0;
    cs.push_back(std::move(c));
  }
  return cs;
}

inline GroupRingMatrix from_linear_ca(const CellularAutomaton& tau) {
  const auto& A = tau.alphabet();
  auto cs = linear_coefficients(tau);
  GroupRingMatrix X(tau.universe(), A.modulus(), A.dim());
  for (std::size_t k = 0; k < cs.size(); ++k)
    for (std::size_t i = 0; i < A.dim(); ++i)
      for (std::size_t j = 0; j < A.dim(); ++j) X.at(i, j).add_term(tau.memory()[k], cs[k](i, j));
  return X;
}

// Memory is the support of X ({1_G} for the zero matrix).
inline CellularAutomaton to_linear_ca(const GroupRingMatrix& X, const Group& G, const Alphabet& A) {
  if (A.flavor() != Flavor::module || A.modulus() != X.modulus() || A.dim() != X.dim())
    fail(Errc::invalid_input, "alphabet does not match the group ring matrix");
  if (!(G == X.group())) fail(Errc::invalid_input, "universe does not match the group ring matrix");
  auto memory = X.support();
  if (memory.empty()) memory = FiniteSubset{G.identity()};
  std::vector<ModMatrix> cs;
  for (const auto& m : memory) {
    ModMatrix c(A.dim(), A.dim(), A.modulus());
    for (std::size_t i = 0; i < A.dim(); ++i)
      for (std::size_t j = 0; j < A.dim(); ++j) c.set(i, j, X.at(i, j).coef(m));
    cs.push_back(std::move(c));
  }
  return CellularAutomaton(G, A, LocalRule(memory, StructuredMap::matrices(std::move(cs), A)));
}

inline CellularAutomaton to_linear_ca(const GroupRingMatrix& X) {
  return to_linear_ca(X, X.group(), Alphabet::module(static_cast<std::uint32_t>(X.modulus()), static_cast<std::uint32_t>(X.dim())));
}

// Some D with D·C = I whose entries are supported in ball(r), or nullopt.
inline std::optional<GroupRingMatrix> one_sided_inverse_solve(const GroupRingMatrix& C, std::size_t r) {
  const auto& G = C.group();
  const std::uint64_t p = C.modulus();
  require_prime(p);
  const std::size_t d = C.dim();
  auto B = ball(G, r);
  auto U = set_union(set_product(G, B, C.support()), FiniteSubset{G.identity()});
  const std::size_t unknowns = d * B.size();
  const std::size_t equations = d * U.size();
  if (unknowns > limits().max_matrix_dim || equations > limits().max_matrix_dim)
    fail(Errc::resource_cap, "inverse system of size " + std::to_string(equations) + "x" + std::to_string(unknowns));
  // Row i of D·C: Σ_k Σ_g D_ik(g) C_kj(h) at gh. Every row of D shares the
  // coefficient matrix K[(j,u),(k,g)] and differs only in the right-hand side.
  ModMatrix K(equations, unknowns, p);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j < d; ++j)
      for (const auto& [h, c] : C.at(k, j).terms())
        for (std::size_t g = 0; g < B.size(); ++g) {
          auto u = U.index_of(G.mul_unchecked(B[g], h));
          K.add_to(j * U.size() + u, k * B.size() + g, c);
        }
  ModMatrix rhs(equations, d, p);
  const auto one = U.index_of(G.identity());
  for (std::size_t i = 0; i < d; ++i) rhs.set(i * U.size() + one, i, 1);
  auto sol = solve(K, rhs);
  if (!sol) return std::nullopt;
  GroupRingMatrix D(G, p, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t g = 0; g < B.size(); ++g) D.at(i, k).add_term(B[g], (*sol)(k * B.size() + g, i));
  if (!is_identity(matrix_mul(D, C))) fail(Errc::internal, "solved inverse does not satisfy D·C = I");
  return D;
}

struct InvertibleSample {
  GroupRingMatrix matrix;
  GroupRingMatrix inverse;
};

// Product of random elementary factors I + c·δ_g·E_ij (i != j) and diagonal
// unit monomials c·δ_g, g ∈ ball(r); the inverse is built factor by factor.
inline InvertibleSample random_invertible_matrix(std::uint64_t seed, const Group& G, std::size_t d, std::size_t r,
                                                 std::uint64_t modulus, std::size_t factors = 5) {
  require_prime(modulus);
  if (d < 1) fail(Errc::invalid_input, "dimension must be positive");
  std::mt19937_64 rng(seed);
  auto draw = [&](std::uint64_t n) { return rng() % n; };
  auto B = ball(G, r);
  auto M = GroupRingMatrix::identity(G, modulus, d);
  auto Minv = M;
  for (std::size_t f = 0; f < factors; ++f) {
    const Elem& g = B[draw(B.size())];
    const auto c = 1 + draw(modulus - 1);
    auto F = GroupRingMatrix::identity(G, modulus, d);
    auto Finv = F;
    if (d >= 2 && draw(3) != 0) {
      const auto i = draw(d);
      auto j = draw(d - 1);
      if (j >= i) ++j;
      F.at(i, j) = GroupRingElement::delta(G, modulus, g, c);
      Finv.at(i, j) = GroupRingElement::delta(G, modulus, g, modulus - c);
    } else {
      const auto i = draw(d);
      F.at(i, i) = GroupRingElement::delta(G, modulus, g, c);
      Finv.at(i, i) = GroupRingElement::delta(G, modulus, G.inv(g), inv_mod_prime(c, modulus));
    }
    M = matrix_mul(M, F);
    Minv = matrix_mul(Finv, Minv);
  }
  return {M, Minv};
}

}  // namespace symba
