#pragma once

// Shared builders and brute-force oracles for the test suites. The oracles
// only use the group law and StructuredMap::eval, never the window machinery
// they are used to check.

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "symba/symba.hpp"

namespace fixtures {

using namespace symba;

inline Elem z(std::int64_t k) { return Elem{k}; }
inline Elem z2(std::int64_t a, std::int64_t b) { return Elem{a, b}; }

// Free group letters: a = 1, b = 2, inverses negative.
inline Elem word(std::initializer_list<std::int64_t> letters) { return Elem(std::vector<std::int64_t>(letters)); }

inline FiniteSubset zrange(std::int64_t lo, std::int64_t hi) {
  std::vector<Elem> v;
  for (auto k = lo; k <= hi; ++k) v.push_back(z(k));
  return FiniteSubset(v);
}

inline StructuredMap identity_map(const Alphabet& A) {
  std::vector<Symbol> t(A.size());
  for (Symbol s = 0; s < A.size(); ++s) t[s] = s;
  return StructuredMap::table(1, t, A);
}

// τ(c)(g) = c(g·s).
inline CellularAutomaton shift_ca(const Group& G, const Alphabet& A, const Elem& s) {
  return CellularAutomaton(G, A, LocalRule(FiniteSubset{s}, identity_map(A)));
}

inline CellularAutomaton identity_ca(const Group& G, const Alphabet& A) { return shift_ca(G, A, G.identity()); }

// τ(c)(g) = c(g) + c(g+1) mod 2 over Z.
inline CellularAutomaton xor_ca(const Alphabet& A = Alphabet::plain(2)) {
  return CellularAutomaton(Group::free_abelian(1), A, LocalRule(zrange(0, 1), StructuredMap::table(2, {0, 1, 1, 0}, A)));
}

inline GroupRingElement gr(const Group& G, std::uint64_t p, std::initializer_list<std::pair<Elem, std::uint64_t>> terms) {
  GroupRingElement x(G, p);
  for (const auto& [g, c] : terms) x.add_term(g, c);
  return x;
}

// C = [[0,1],[1,t]] and D = [[t,1],[1,0]] over Z/2[Z], t = δ_1.
inline GroupRingMatrix pair_C() {
  auto Z = Group::free_abelian(1);
  GroupRingMatrix C(Z, 2, 2);
  C.at(0, 1) = gr(Z, 2, {{z(0), 1}});
  C.at(1, 0) = gr(Z, 2, {{z(0), 1}});
  C.at(1, 1) = gr(Z, 2, {{z(1), 1}});
  return C;
}

inline GroupRingMatrix pair_D() {
  auto Z = Group::free_abelian(1);
  GroupRingMatrix D(Z, 2, 2);
  D.at(0, 0) = gr(Z, 2, {{z(1), 1}});
  D.at(0, 1) = gr(Z, 2, {{z(0), 1}});
  D.at(1, 0) = gr(Z, 2, {{z(0), 1}});
  return D;
}

inline ModMatrix mat2(std::uint64_t p, std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  ModMatrix m(2, 2, p);
  m.set(0, 0, a);
  m.set(0, 1, b);
  m.set(1, 0, c);
  m.set(1, 1, d);
  return m;
}

// The same pair written directly as matrix-family rules on memory {0, 1}.
inline CellularAutomaton pair_tau() {
  auto A = Alphabet::module(2, 2);
  return CellularAutomaton(Group::free_abelian(1), A,
                           LocalRule(zrange(0, 1), StructuredMap::matrices({mat2(2, 0, 1, 1, 0), mat2(2, 0, 0, 0, 1)}, A)));
}

inline CellularAutomaton pair_sigma() {
  auto A = Alphabet::module(2, 2);
  return CellularAutomaton(Group::free_abelian(1), A,
                           LocalRule(zrange(0, 1), StructuredMap::matrices({mat2(2, 0, 1, 1, 0), mat2(2, 1, 0, 0, 0)}, A)));
}

// Enumerates all assignments W -> A as maps, first element most significant.
inline void for_each_assignment(const FiniteSubset& W, std::uint32_t q,
                                const std::function<bool(const std::map<Elem, Symbol>&)>& fn) {
  std::vector<Symbol> digits(W.size(), 0);
  while (true) {
    std::map<Elem, Symbol> x;
    for (std::size_t i = 0; i < W.size(); ++i) x[W[i]] = digits[i];
    if (!fn(x)) return;
    std::size_t k = W.size();
    while (k > 0) {
      if (++digits[k - 1] < q) break;
      digits[k - 1] = 0;
      --k;
    }
    if (k == 0) return;
  }
}

// Value of τ(c) at g read straight from the definition, for c given on enough cells.
inline Symbol eval_at(const CellularAutomaton& tau, const std::function<Symbol(const Elem&)>& c, const Elem& g) {
  std::vector<Symbol> args;
  for (const auto& m : tau.memory()) args.push_back(c(tau.universe().mul(g, m)));
  return tau.map().eval(args, tau.alphabet());
}

// σ∘τ = Id on every pattern over E ∪ E·M_σ·M_τ, checked cell by cell.
inline bool brute_force_left_inverse(const CellularAutomaton& sigma, const CellularAutomaton& tau, const FiniteSubset& E) {
  const auto& G = tau.universe();
  auto W = set_union(set_product(G, set_product(G, E, sigma.memory()), tau.memory()), E);
  bool ok = true;
  for_each_assignment(W, tau.alphabet().size(), [&](const std::map<Elem, Symbol>& x) {
    auto c = [&](const Elem& h) { return x.at(h); };
    auto tc = [&](const Elem& h) { return eval_at(tau, c, h); };
    for (const auto& g : E) {
      if (eval_at(sigma, tc, g) != x.at(g)) {
        ok = false;
        return false;
      }
    }
    return true;
  });
  return ok;
}

// Every pattern over E·M_σ·M_τ gets the same value under σ∘τ and under ρ.
inline bool same_action(const CellularAutomaton& rho, const CellularAutomaton& sigma, const CellularAutomaton& tau,
                        const FiniteSubset& E) {
  const auto& G = tau.universe();
  auto W = set_union(set_product(G, set_product(G, E, sigma.memory()), tau.memory()), set_product(G, E, rho.memory()));
  bool ok = true;
  for_each_assignment(W, tau.alphabet().size(), [&](const std::map<Elem, Symbol>& x) {
    auto c = [&](const Elem& h) { return x.at(h); };
    auto tc = [&](const Elem& h) { return eval_at(tau, c, h); };
    for (const auto& g : E) {
      if (eval_at(sigma, tc, g) != eval_at(rho, c, g)) {
        ok = false;
        return false;
      }
    }
    return true;
  });
  return ok;
}

// Two CAs agree on every pattern over E·(M_a ∪ M_b).
inline bool same_ca_action(const CellularAutomaton& a, const CellularAutomaton& b, const FiniteSubset& E) {
  const auto& G = a.universe();
  auto W = set_product(G, E, set_union(a.memory(), b.memory()));
  bool ok = true;
  for_each_assignment(W, a.alphabet().size(), [&](const std::map<Elem, Symbol>& x) {
    auto c = [&](const Elem& h) { return x.at(h); };
    for (const auto& g : E)
      if (eval_at(a, c, g) != eval_at(b, c, g)) {
        ok = false;
        return false;
      }
    return true;
  });
  return ok;
}

inline CellularAutomaton random_table_ca(std::mt19937_64& rng, const Group& G, const Alphabet& A,
                                         const std::vector<Elem>& pool, std::size_t max_size) {
  std::vector<Elem> mem;
  while (mem.empty()) {
    for (const auto& e : pool)
      if (rng() % 2 == 0 && mem.size() < max_size) mem.push_back(e);
  }
  FiniteSubset M(mem);
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < M.size(); ++i) n *= A.size();
  std::vector<Symbol> t(n);
  for (auto& s : t) s = static_cast<Symbol>(rng() % A.size());
  return CellularAutomaton(G, A, LocalRule(M, StructuredMap::table(M.size(), t, A)));
}

// τ = π∘shift_s and σ = π⁻¹∘shift_{s⁻¹} for a random permutation π of A, so σ∘τ = Id.
inline std::pair<CellularAutomaton, CellularAutomaton> inverse_pair(std::mt19937_64& rng, const Group& G,
                                                                    const Alphabet& A, const Elem& s) {
  std::vector<Symbol> perm(A.size()), inv(A.size());
  for (Symbol i = 0; i < A.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  for (Symbol i = 0; i < A.size(); ++i) inv[perm[i]] = i;
  CellularAutomaton tau(G, A, LocalRule(FiniteSubset{s}, StructuredMap::table(1, perm, A)));
  CellularAutomaton sigma(G, A, LocalRule(FiniteSubset{G.inv(s)}, StructuredMap::table(1, inv, A)));
  return {sigma, tau};
}

// Pattern with the given values listed in canonical domain order.
inline Pattern pattern(const FiniteSubset& D, std::vector<Symbol> values) { return Pattern{D, std::move(values)}; }

}  // namespace fixtures
