#pragma once

// Left-invertibility at bounded radius through determinacy tables, inverse
// rule synthesis, and restriction of a CA to the subgroup its memory generates.

#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "symba/ca.hpp"
#include "symba/modmat.hpp"

namespace symba {

// Two patterns over N·M with the same image under τ_N^+ but different values at 1_G.
struct Witness {
  Pattern x;
  Pattern y;
};

struct DeterminacyResult {
  std::optional<Witness> witness;
  std::optional<LocalRule> rule;

  bool determined() const { return rule.has_value(); }
};

namespace detail {

inline Pattern decode_pattern(const FiniteSubset& domain, std::uint64_t index, std::uint32_t q) {
  Pattern p{domain, std::vector<Symbol>(domain.size())};
  for (std::size_t k = domain.size(); k-- > 0;) {
    p.values[k] = static_cast<Symbol>(index % q);
    index /= q;
  }
  return p;
}

inline DeterminacyResult determinacy_linear(const CellularAutomaton& tau, const FiniteSubset& N,
                                            const detail::WindowPlan& plan) {
  const auto& A = tau.alphabet();
  const auto& G = tau.universe();
  require_prime(A.modulus());
  const std::size_t d = A.dim();
  const std::size_t rows = d * N.size();
  const std::size_t cols = d * plan.outer.size();
  if (rows > limits().max_matrix_dim || cols > limits().max_matrix_dim) {
    fail(Errc::resource_cap, "determinacy system of size " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  const auto& cs = tau.map().coefficients();
  ModMatrix T(rows, cols, A.modulus());
  for (std::size_t g = 0; g < N.size(); ++g)
    for (std::size_t m = 0; m < plan.mem; ++m) {
      const std::size_t cell = plan.pos[g * plan.mem + m];
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) T.add_to(g * d + i, cell * d + j, cs[m](i, j));
    }
  const std::size_t one = plan.outer.index_of(G.identity());
  ModMatrix P(d, cols, A.modulus());
  for (std::size_t i = 0; i < d; ++i) P.set(i, one * d + i, 1);

  // η·T = π  ⟺  Tᵀ·ηᵀ = πᵀ.
  auto sol = solve(T.transpose(), P.transpose());
  DeterminacyResult res;
  if (sol) {
    auto eta = sol->transpose();
    std::vector<ModMatrix> blocks;
    for (std::size_t n = 0; n < N.size(); ++n) {
      ModMatrix b(d, d, A.modulus());
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) b.set(i, j, eta(i, n * d + j));
      blocks.push_back(std::move(b));
    }
    res.rule = LocalRule(N, StructuredMap::matrices(std::move(blocks), A));
    return res;
  }
  // Infeasible: some kernel vector of T is not killed by π.
  for (const auto& v : kernel_basis(T)) {
    bool visible = false;
    for (std::size_t i = 0; i < d; ++i) visible = visible || v[one * d + i] != 0;
    if (!visible) continue;
    Pattern x{plan.outer, std::vector<Symbol>(plan.outer.size(), 0)};
    Pattern y{plan.outer, std::vector<Symbol>(plan.outer.size(), 0)};
    for (std::size_t c = 0; c < plan.outer.size(); ++c) {
      std::vector<std::uint32_t> comp(d);
      for (std::size_t i = 0; i < d; ++i) comp[i] = static_cast<std::uint32_t>(v[c * d + i]);
      y.values[c] = A.from_components(comp);
    }
    res.witness = Witness{std::move(x), std::move(y)};
    return res;
  }
  fail(Errc::internal, "linear determinacy system infeasible without a visible kernel vector");
}

}  // namespace detail

// Decides whether x(1_G) is determined by τ_N^+(x) over A^{NM}. The memory
// of τ and N are symmetrized first so that 1_G ∈ NM.
inline DeterminacyResult determinacy_check(const CellularAutomaton& tau_in, const FiniteSubset& N_in) {
  const auto& G = tau_in.universe();
  const auto& A = tau_in.alphabet();
  auto tau = extend_memory(tau_in, symmetrize(G, tau_in.memory()));
  auto N = symmetrize(G, N_in);
  auto plan = detail::make_plan(G, N, tau.memory());

  if (A.flavor() == Flavor::module && tau.map().is_matrix()) return detail::determinacy_linear(tau, N, plan);

  auto image_count = checked_power(A.size(), N.size(), limits().max_scan, "determinacy image table");
  checked_power(A.size(), plan.outer.size(), limits().max_scan, "determinacy scan");
  auto mu = tau.map().to_table(A);
  detail::WindowEvaluator ev(plan, mu, A);
  const std::size_t one = plan.outer.index_of(G.identity());
  constexpr std::uint64_t unseen = ~std::uint64_t{0};
  std::vector<std::uint64_t> first(image_count, unseen);
  std::vector<Symbol> at_one(image_count, A.basepoint());
  std::vector<Symbol> y;
  DeterminacyResult res;
  detail::for_each_word(plan.outer.size(), A.size(), limits().max_scan, "determinacy scan",
                        [&](const auto& x, std::uint64_t xi) {
                          ev.apply(x, y);
                          std::uint64_t key = 0;
                          for (auto s : y) key = key * A.size() + s;
                          if (first[key] == unseen) {
                            first[key] = xi;
                            at_one[key] = x[one];
                            return true;
                          }
                          if (at_one[key] == x[one]) return true;
                          res.witness = Witness{detail::decode_pattern(plan.outer, first[key], A.size()),
                                                detail::decode_pattern(plan.outer, xi, A.size())};
                          return false;
                        });
  if (res.witness) return res;
  // Off the image of τ_N^+ the rule takes the basepoint (already the fill of at_one).
  res.rule = LocalRule(N, StructuredMap::table(N.size(), std::move(at_one), A));
  return res;
}

struct SynthesisResult {
  std::optional<CellularAutomaton> inverse;
  std::size_t radius = 0;
  std::optional<Witness> last_witness;
};

// Tries N = ball(r) for r = 0..r_max and returns the first left inverse found.
inline SynthesisResult synthesize_left_inverse(const CellularAutomaton& tau, std::size_t r_max) {
  SynthesisResult out;
  for (std::size_t r = 0; r <= r_max; ++r) {
    auto det = determinacy_check(tau, ball(tau.universe(), r));
    out.radius = r;
    if (det.determined()) {
      CellularAutomaton sigma(tau.universe(), tau.alphabet(), *det.rule);
      if (!check_left_inverse(sigma, tau)) {
        fail(Errc::internal, "synthesized rule failed the left-inverse certificate at radius " + std::to_string(r));
      }
      out.inverse = std::move(sigma);
      out.last_witness.reset();
      return out;
    }
    out.last_witness = std::move(det.witness);
  }
  return out;
}

struct RestrictedCA {
  CellularAutomaton ca;
  // Injective homomorphism H -> G identifying H with ⟨M⟩.
  std::function<Elem(const Elem&)> to_parent;
};

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Row-echelon basis of the lattice spanned by `vecs`, with pivot columns.
inline std::pair<std::vector<std::vector<std::int64_t>>, std::vector<std::size_t>> lattice_basis(
    std::vector<std::vector<std::int64_t>> rows, std::size_t dim) {
  std::vector<std::vector<std::int64_t>> basis;
  std::vector<std::size_t> pivots;
  for (std::size_t col = 0; col < dim; ++col) {
    // Euclid on column `col` among the remaining rows.
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][col] == 0) continue;
        if (best == rows.size() || std::llabs(rows[i][col]) < std::llabs(rows[best][col])) best = i;
      }
      if (best == rows.size()) break;
      bool reduced = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == best || rows[i][col] == 0) continue;
        auto q = floor_div(rows[i][col], rows[best][col]);
        for (std::size_t j = 0; j < dim; ++j) rows[i][j] -= q * rows[best][j];
        if (rows[i][col] != 0) reduced = false;
      }
      if (reduced) {
        auto r = rows[best];
        if (r[col] < 0)
          for (auto& v : r) v = -v;
        basis.push_back(std::move(r));
        pivots.push_back(col);
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(best));
        break;
      }
    }
  }
  return {basis, pivots};
}

inline std::vector<std::int64_t> lattice_coords(std::vector<std::int64_t> v,
                                                const std::vector<std::vector<std::int64_t>>& basis,
                                                const std::vector<std::size_t>& pivots) {
  std::vector<std::int64_t> c(basis.size(), 0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    auto p = pivots[i];
    if (v[p] % basis[i][p] != 0) fail(Errc::internal, "vector outside its own lattice");
    c[i] = v[p] / basis[i][p];
    for (std::size_t j = 0; j < v.size(); ++j) v[j] -= c[i] * basis[i][j];
  }
  for (auto x : v)
    if (x != 0) fail(Errc::internal, "lattice coordinate residue");
  return c;
}

inline RestrictedCA restrict_finite(const CellularAutomaton& tau) {
  const auto& G = tau.universe();
  auto sub = generated_ball(G, tau.memory(), G.order().value_or(0));
  const auto& els = sub.elements();
  CayleyTable table(els.size(), std::vector<std::uint32_t>(els.size()));
  for (std::size_t i = 0; i < els.size(); ++i)
    for (std::size_t j = 0; j < els.size(); ++j)
      table[i][j] = static_cast<std::uint32_t>(sub.index_of(G.mul_unchecked(els[i], els[j])));
  auto H = Group::finite(std::move(table));
  std::vector<Elem> renamed;
  for (const auto& m : tau.memory()) renamed.push_back(Elem{static_cast<std::int64_t>(sub.index_of(m))});
  auto rule = rename_memory(tau.rule(), renamed, tau.alphabet());
  return {CellularAutomaton(H, tau.alphabet(), rule),
          [sub](const Elem& h) { return sub[static_cast<std::size_t>(h.code.at(0))]; }};
}

}  // namespace detail

// The same local rule over H = ⟨M⟩, with H re-encoded as a standalone group.
inline RestrictedCA restrict_to_memory_subgroup(const CellularAutomaton& tau) {
  const auto& G = tau.universe();
  const auto& M = tau.memory();
  const auto& A = tau.alphabet();
  const Elem one = G.identity();

  if (std::all_of(M.begin(), M.end(), [&](const Elem& m) { return m == one; })) {
    auto H = Group::trivial();
    std::vector<Elem> renamed(M.size(), H.identity());
    return {CellularAutomaton(H, A, rename_memory(tau.rule(), renamed, A)), [one](const Elem&) { return one; }};
  }

  switch (G.kind()) {
    case GroupKind::free_abelian: {
      std::vector<std::vector<std::int64_t>> rows;
      for (const auto& m : M) rows.push_back(m.code);
      auto [basis, pivots] = detail::lattice_basis(rows, G.rank());
      std::vector<Elem> renamed;
      for (const auto& m : M) renamed.emplace_back(detail::lattice_coords(m.code, basis, pivots));
      auto H = Group::free_abelian(basis.size());
      auto to_parent = [basis, dim = G.rank()](const Elem& h) {
        Elem g(std::vector<std::int64_t>(dim, 0));
        for (std::size_t i = 0; i < basis.size(); ++i)
          for (std::size_t j = 0; j < dim; ++j) g.code[j] += h.code.at(i) * basis[i][j];
        return g;
      };
      return {CellularAutomaton(H, A, rename_memory(tau.rule(), renamed, A)), to_parent};
    }
    case GroupKind::free: {
      std::set<std::int64_t> letters;
      for (const auto& m : M)
        for (auto l : m.code) letters.insert(std::llabs(l));
      // Powers of a single generator: ⟨a^g⟩ with g the gcd of the exponents.
      if (letters.size() == 1) {
        const std::int64_t a = *letters.begin();
        std::int64_t step = 0;
        for (const auto& m : M) step = std::gcd(step, static_cast<std::int64_t>(m.code.size()));
        std::vector<Elem> renamed;
        for (const auto& m : M) {
          const std::int64_t len = static_cast<std::int64_t>(m.code.size());
          renamed.push_back(Elem{m.code.empty() ? 0 : (m.code[0] > 0 ? len : -len) / step});
        }
        auto H = Group::free_abelian(1);
        auto to_parent = [a, step](const Elem& h) {
          const std::int64_t k = h.code.at(0) * step;
          return Elem(std::vector<std::int64_t>(static_cast<std::size_t>(std::llabs(k)), k < 0 ? -a : a));
        };
        return {CellularAutomaton(H, A, rename_memory(tau.rule(), renamed, A)), to_parent};
      }
      // Free factor on the letters used, when each of them lies in M ∪ M⁻¹.
      for (auto l : letters) {
        if (!M.contains(Elem{l}) && !M.contains(Elem{-l})) {
          fail(Errc::unsupported_subgroup, "memory subgroup of the free group is not a recognised free factor");
        }
      }
      std::vector<std::int64_t> order(letters.begin(), letters.end());
      std::map<std::int64_t, std::int64_t> rename;
      for (std::size_t i = 0; i < order.size(); ++i) rename[order[i]] = static_cast<std::int64_t>(i + 1);
      std::vector<Elem> renamed;
      for (const auto& m : M) {
        Elem h;
        for (auto l : m.code) h.code.push_back(l > 0 ? rename[l] : -rename[-l]);
        renamed.push_back(std::move(h));
      }
      auto H = Group::free(order.size());
      auto to_parent = [order](const Elem& h) {
        Elem g;
        for (auto l : h.code) {
          auto src = order.at(static_cast<std::size_t>(std::llabs(l) - 1));
          g.code.push_back(l > 0 ? src : -src);
        }
        return g;
      };
      return {CellularAutomaton(H, A, rename_memory(tau.rule(), renamed, A)), to_parent};
    }
    case GroupKind::product: {
      std::optional<std::size_t> support;
      bool single = true;
      for (const auto& m : M) {
        auto parts = G.split(m);
        for (std::size_t i = 0; i < parts.size(); ++i) {
          if (parts[i] == G.factors()[i].identity()) continue;
          if (support && *support != i) single = false;
          support = i;
        }
      }
      if (single && support) {
        const std::size_t f = *support;
        std::vector<Elem> projected;
        for (const auto& m : M) projected.push_back(G.split(m)[f]);
        CellularAutomaton factor_ca(G.factors()[f], A, rename_memory(tau.rule(), projected, A));
        auto inner = restrict_to_memory_subgroup(factor_ca);
        auto to_parent = [G, f, inner_map = inner.to_parent](const Elem& h) {
          std::vector<Elem> parts;
          for (std::size_t i = 0; i < G.factors().size(); ++i)
            parts.push_back(i == f ? inner_map(h) : G.factors()[i].identity());
          return G.join(parts);
        };
        return {inner.ca, to_parent};
      }
      if (G.is_finite()) return detail::restrict_finite(tau);
      fail(Errc::unsupported_subgroup, "memory spans several infinite factors of a product");
    }
    case GroupKind::finite:
    case GroupKind::symmetric: return detail::restrict_finite(tau);
  }
  fail(Errc::unsupported_subgroup, "unrecognised universe");
}

}  // namespace symba
