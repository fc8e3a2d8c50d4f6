#pragma once

// Cellular automata over group universes: induced maps on finite windows,
// memory extension, composition and the one-sided inverse criterion.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symba/alphabet.hpp"
#include "symba/error.hpp"
#include "symba/group.hpp"
#include "symba/modmat.hpp"

namespace symba {

// Memory set M together with a map A^M -> A whose coordinates follow the
// canonical order of M.
class LocalRule {
 public:
  LocalRule(FiniteSubset memory, StructuredMap map) : memory_(std::move(memory)), map_(std::move(map)) {
    if (map_.arity() != memory_.size()) {
      fail(Errc::invalid_input, "rule arity " + std::to_string(map_.arity()) + " does not match memory size " +
                                    std::to_string(memory_.size()));
    }
  }

  const FiniteSubset& memory() const { return memory_; }
  const StructuredMap& map() const { return map_; }

 private:
  FiniteSubset memory_;
  StructuredMap map_;
};

class CellularAutomaton {
 public:
  CellularAutomaton(Group universe, Alphabet alphabet, LocalRule rule)
      : universe_(std::move(universe)), alphabet_(std::move(alphabet)), rule_(std::move(rule)) {
    for (const auto& m : rule_.memory()) universe_.validate(m);
    if (rule_.map().is_matrix()) {
      StructuredMap::matrices(rule_.map().coefficients(), alphabet_);
    } else {
      for (auto s : rule_.map().entries()) alphabet_.validate(s);
    }
    pointed_ = verify_pointed(rule_.map(), alphabet_);
  }

  const Group& universe() const { return universe_; }
  const Alphabet& alphabet() const { return alphabet_; }
  const LocalRule& rule() const { return rule_; }
  const FiniteSubset& memory() const { return rule_.memory(); }
  const StructuredMap& map() const { return rule_.map(); }

  // Whether the rule fixes the basepoint; recorded, not enforced.
  bool pointed() const { return pointed_; }

  // Whether the rule respects the alphabet's structure (always true for plain alphabets).
  bool structured() const {
    if (alphabet_.flavor() == Flavor::plain) return true;
    return verify_structure(rule_.map(), alphabet_);
  }

 private:
  Group universe_;
  Alphabet alphabet_;
  LocalRule rule_;
  bool pointed_ = false;
};

struct Pattern {
  FiniteSubset domain;
  std::vector<Symbol> values;

  Symbol at(const Elem& g) const { return values[domain.index_of(g)]; }
};

inline void validate_pattern(const Pattern& p, const Alphabet& A) {
  if (p.values.size() != p.domain.size()) fail(Errc::invalid_input, "pattern value count does not match its domain");
  for (auto s : p.values) A.validate(s);
}

inline bool operator==(const Pattern& a, const Pattern& b) { return a.domain == b.domain && a.values == b.values; }

namespace detail {

inline void require_compatible(const CellularAutomaton& a, const CellularAutomaton& b) {
  if (!(a.universe() == b.universe())) fail(Errc::invalid_input, "cellular automata over different universes");
  if (!(a.alphabet() == b.alphabet())) fail(Errc::invalid_input, "cellular automata over different alphabets");
}

// Positions of every e·m inside the window E·M, row-major in (e, m).
struct WindowPlan {
  FiniteSubset outer;
  std::size_t inner = 0;
  std::size_t mem = 0;
  std::vector<std::size_t> pos;
};

inline WindowPlan make_plan(const Group& G, const FiniteSubset& E, const FiniteSubset& M) {
  WindowPlan p;
  p.outer = set_product(G, E, M);
  p.inner = E.size();
  p.mem = M.size();
  p.pos.reserve(E.size() * M.size());
  for (const auto& e : E)
    for (const auto& m : M) p.pos.push_back(p.outer.index_of(G.mul_unchecked(e, m)));
  return p;
}

// out[i] = μ(m ↦ x[e_i m]).
class WindowEvaluator {
 public:
  WindowEvaluator(const WindowPlan& plan, const StructuredMap& map, const Alphabet& A)
      : plan_(plan), map_(map), A_(A), args_(plan.mem) {}

  void apply(const std::vector<Symbol>& x, std::vector<Symbol>& out) {
    out.resize(plan_.inner);
    for (std::size_t i = 0; i < plan_.inner; ++i) out[i] = at(x, i);
  }

  Symbol at(const std::vector<Symbol>& x, std::size_t i) {
    const std::size_t* pos = plan_.pos.data() + i * plan_.mem;
    if (map_.is_table()) {
      std::uint64_t idx = 0;
      for (std::size_t j = 0; j < plan_.mem; ++j) idx = idx * A_.size() + x[pos[j]];
      return map_.entries()[idx];
    }
    for (std::size_t j = 0; j < plan_.mem; ++j) args_[j] = x[pos[j]];
    return map_.eval(args_, A_);
  }

 private:
  const WindowPlan& plan_;
  const StructuredMap& map_;
  const Alphabet& A_;
  std::vector<Symbol> args_;
};

}  // namespace detail

// τ_E^+ : A^{EM} -> A^E.
inline Pattern induced_map(const CellularAutomaton& tau, const FiniteSubset& E, const Pattern& p) {
  const auto& G = tau.universe();
  validate_pattern(p, tau.alphabet());
  auto plan = detail::make_plan(G, E, tau.memory());
  if (!(plan.outer == p.domain)) fail(Errc::invalid_input, "pattern domain is not E·M");
  detail::WindowEvaluator ev(plan, tau.map(), tau.alphabet());
  Pattern out{E, {}};
  ev.apply(p.values, out.values);
  return out;
}

// Left translate: (g·p)(g e) = p(e).
inline Pattern translate(const Group& G, const Elem& g, const Pattern& p) {
  std::vector<Elem> dom;
  for (const auto& e : p.domain) dom.push_back(G.mul(g, e));
  Pattern out{FiniteSubset(dom), std::vector<Symbol>(p.values.size())};
  for (std::size_t i = 0; i < dom.size(); ++i) out.values[out.domain.index_of(dom[i])] = p.values[i];
  return out;
}

inline Pattern restrict_pattern(const Pattern& p, const FiniteSubset& E) {
  Pattern out{E, {}};
  for (const auto& e : E) out.values.push_back(p.at(e));
  return out;
}

// μ'(p) = μ(p|_M) on a larger memory M'.
inline LocalRule extend_memory(const LocalRule& rule, const FiniteSubset& larger, const Alphabet& A) {
  const auto& M = rule.memory();
  if (!M.is_subset_of(larger)) fail(Errc::invalid_input, "extend_memory: new memory does not contain the old one");
  if (larger == M) return rule;
  std::vector<std::size_t> where;
  for (const auto& m : M) where.push_back(larger.index_of(m));
  if (rule.map().is_matrix()) {
    std::vector<ModMatrix> cs(larger.size(), ModMatrix(A.dim(), A.dim(), A.modulus()));
    for (std::size_t k = 0; k < M.size(); ++k) cs[where[k]] = rule.map().coefficients()[k];
    return LocalRule(larger, StructuredMap::matrices(std::move(cs), A));
  }
  std::vector<Symbol> entries;
  std::vector<Symbol> args(M.size());
  detail::for_each_word(larger.size(), A.size(), limits().max_scan, "extend_memory", [&](const auto& x, std::uint64_t) {
    for (std::size_t k = 0; k < M.size(); ++k) args[k] = x[where[k]];
    entries.push_back(rule.map().eval(args, A));
    return true;
  });
  return LocalRule(larger, StructuredMap::table(larger.size(), std::move(entries), A));
}

inline CellularAutomaton extend_memory(const CellularAutomaton& tau, const FiniteSubset& larger) {
  return CellularAutomaton(tau.universe(), tau.alphabet(), extend_memory(tau.rule(), larger, tau.alphabet()));
}

// Same map with memory elements renamed: renamed[i] replaces memory[i].
inline LocalRule rename_memory(const LocalRule& rule, const std::vector<Elem>& renamed, const Alphabet& A) {
  const auto& M = rule.memory();
  if (renamed.size() != M.size()) fail(Errc::invalid_input, "rename_memory: size mismatch");
  FiniteSubset target(renamed);
  if (target.size() != M.size()) fail(Errc::invalid_input, "rename_memory: renamed elements collide");
  std::vector<std::size_t> where;
  for (const auto& e : renamed) where.push_back(target.index_of(e));
  if (rule.map().is_matrix()) {
    std::vector<ModMatrix> cs(M.size());
    for (std::size_t k = 0; k < M.size(); ++k) cs[where[k]] = rule.map().coefficients()[k];
    return LocalRule(target, StructuredMap::matrices(std::move(cs), A));
  }
  std::vector<Symbol> entries;
  std::vector<Symbol> args(M.size());
  detail::for_each_word(M.size(), A.size(), limits().max_scan, "rename_memory", [&](const auto& x, std::uint64_t) {
    for (std::size_t k = 0; k < M.size(); ++k) args[k] = x[where[k]];
    entries.push_back(rule.map().eval(args, A));
    return true;
  });
  return LocalRule(target, StructuredMap::table(M.size(), std::move(entries), A));
}

// σ∘τ, with memory M_σ·M_τ.
inline CellularAutomaton compose(const CellularAutomaton& sigma, const CellularAutomaton& tau) {
  detail::require_compatible(sigma, tau);
  const auto& G = tau.universe();
  const auto& A = tau.alphabet();
  const auto& Ms = sigma.memory();
  const auto& Mt = tau.memory();
  if (sigma.map().is_matrix() && tau.map().is_matrix()) {
    auto W = set_product(G, Ms, Mt);
    std::vector<ModMatrix> cs(W.size(), ModMatrix(A.dim(), A.dim(), A.modulus()));
    for (std::size_t i = 0; i < Ms.size(); ++i)
      for (std::size_t j = 0; j < Mt.size(); ++j) {
        auto& slot = cs[W.index_of(G.mul_unchecked(Ms[i], Mt[j]))];
        slot = slot + sigma.map().coefficients()[i] * tau.map().coefficients()[j];
      }
    return CellularAutomaton(G, A, LocalRule(W, StructuredMap::matrices(std::move(cs), A)));
  }
  auto plan = detail::make_plan(G, Ms, Mt);
  auto tau_map = tau.map().to_table(A);
  auto sigma_map = sigma.map().to_table(A);
  detail::WindowEvaluator ev(plan, tau_map, A);
  std::vector<Symbol> mid, entries;
  detail::for_each_word(plan.outer.size(), A.size(), limits().max_scan, "compose", [&](const auto& x, std::uint64_t) {
    ev.apply(x, mid);
    entries.push_back(sigma_map.eval(mid, A));
    return true;
  });
  return CellularAutomaton(G, A, LocalRule(plan.outer, StructuredMap::table(plan.outer.size(), std::move(entries), A)));
}

enum class CheckRoute { automatic, exhaustive };

// σ∘τ = Id  ⟺  η∘τ_M^+ = π on A^{M²}, where M = symmetrize(M_σ ∪ M_τ).
inline bool check_left_inverse(const CellularAutomaton& sigma, const CellularAutomaton& tau,
                               CheckRoute route = CheckRoute::automatic) {
  detail::require_compatible(sigma, tau);
  const auto& G = tau.universe();
  const auto& A = tau.alphabet();
  auto M = symmetrize(G, set_union(sigma.memory(), tau.memory()));
  auto eta = extend_memory(sigma.rule(), M, A);
  auto mu = extend_memory(tau.rule(), M, A);
  auto M2 = set_product(G, M, M);
  const Elem one = G.identity();

  if (route == CheckRoute::automatic && eta.map().is_matrix() && mu.map().is_matrix()) {
    // Linear maps agree iff they agree on basis vectors. Evaluating η∘τ_M^+
    // on the basis vectors sitting at cell h gives Σ_{g n = h} η_g C_n, which
    // must be the identity at h = 1 and zero elsewhere.
    const std::size_t d = A.dim();
    std::vector<ModMatrix> response(M2.size(), ModMatrix(d, d, A.modulus()));
    for (std::size_t i = 0; i < M.size(); ++i) {
      const auto& Dg = eta.map().coefficients()[i];
      if (Dg.is_zero()) continue;
      for (std::size_t j = 0; j < M.size(); ++j) {
        const auto& Cn = mu.map().coefficients()[j];
        if (Cn.is_zero()) continue;
        auto& slot = response[M2.index_of(G.mul_unchecked(M[i], M[j]))];
        slot = slot + Dg * Cn;
      }
    }
    const auto I = ModMatrix::identity(d, A.modulus());
    for (std::size_t h = 0; h < M2.size(); ++h) {
      if (M2[h] == one ? !(response[h] == I) : !response[h].is_zero()) return false;
    }
    return true;
  }

  auto eta_t = eta.map().to_table(A);
  auto mu_t = mu.map().to_table(A);
  auto plan = detail::make_plan(G, M, M);
  detail::WindowEvaluator ev(plan, mu_t, A);
  const std::size_t one_pos = plan.outer.index_of(one);
  std::vector<Symbol> y;
  return detail::for_each_word(plan.outer.size(), A.size(), limits().max_scan, "check_left_inverse",
                               [&](const auto& x, std::uint64_t) {
                                 ev.apply(x, y);
                                 return eta_t.eval(y, A) == x[one_pos];
                               });
}

// τ∘σ = Id  ⟺  μ∘σ_M^+ = π.
inline bool check_right_inverse(const CellularAutomaton& sigma, const CellularAutomaton& tau,
                                CheckRoute route = CheckRoute::automatic) {
  return check_left_inverse(tau, sigma, route);
}

// Iterates τ on a finite window; each step keeps {g : gM ⊆ domain}.
inline Pattern evolve(const CellularAutomaton& tau, const Pattern& p, std::size_t steps) {
  validate_pattern(p, tau.alphabet());
  const auto& G = tau.universe();
  Pattern cur = p;
  for (std::size_t s = 0; s < steps; ++s) {
    auto candidates = set_product(G, cur.domain, inverse_set(G, tau.memory()));
    std::vector<Elem> keep;
    for (const auto& g : candidates) {
      bool inside = true;
      for (const auto& m : tau.memory()) {
        if (!cur.domain.contains(G.mul_unchecked(g, m))) {
          inside = false;
          break;
        }
      }
      if (inside) keep.push_back(g);
    }
    if (keep.empty()) {
      fail(Errc::empty_window, "window became empty after " + std::to_string(s) + " of " + std::to_string(steps) + " steps");
    }
    FiniteSubset E(std::move(keep));
    auto plan = detail::make_plan(G, E, tau.memory());
    auto window = restrict_pattern(cur, plan.outer);
    detail::WindowEvaluator ev(plan, tau.map(), tau.alphabet());
    Pattern next{E, {}};
    ev.apply(window.values, next.values);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace symba
