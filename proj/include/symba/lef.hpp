#pragma once

// LEF embeddings of finite subsets into finite groups and the transport of a
// CA to an endomap of A^F, inverted there and pulled back to a local rule.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "symba/alphabet.hpp"
#include "symba/ca.hpp"
#include "symba/group.hpp"
#include "symba/modmat.hpp"

namespace symba {

// φ: S -> F with phi[i] the image of subset[i].
struct LefEmbedding {
  Group source;
  FiniteSubset subset;
  Group target;
  std::vector<Elem> phi;

  const Elem& image(const Elem& a) const { return phi[subset.index_of(a)]; }
};

struct EmbeddingParams {
  enum class Kind { automatic, modular, ball_action, identity, product };
  Kind kind = Kind::automatic;
  std::optional<std::int64_t> modulus;  // modular
  std::optional<std::size_t> radius;    // ball_action
  std::vector<EmbeddingParams> factors; // product
};

struct EmbeddingReport {
  bool ok = false;
  std::optional<std::pair<Elem, Elem>> collision;        // a != b with φ(a) = φ(b)
  std::optional<std::pair<Elem, Elem>> hom_failure;      // φ(ab) != φ(a)φ(b)
  std::string message;
};

// Injectivity of φ on M² and φ(ab) = φ(a)φ(b) for a, b ∈ M.
inline EmbeddingReport verify_embedding_report(const LefEmbedding& e, const FiniteSubset& M) {
  const auto& G = e.source;
  auto M2 = set_product(G, M, M);
  if (!M2.is_subset_of(e.subset)) fail(Errc::invalid_input, "verify_embedding: M² is not inside the embedded subset");
  EmbeddingReport r;
  std::unordered_map<Elem, Elem, ElemHash> seen;
  for (const auto& a : M2) {
    const auto& fa = e.image(a);
    if (!e.target.is_valid(fa)) {
      r.message = "image of " + to_string(a) + " is not an element of the target";
      return r;
    }
    auto [it, fresh] = seen.emplace(fa, a);
    if (!fresh) {
      r.collision = std::make_pair(it->second, a);
      r.message = "φ" + to_string(it->second) + " = φ" + to_string(a);
      return r;
    }
  }
  for (const auto& a : M)
    for (const auto& b : M) {
      if (!(e.image(G.mul_unchecked(a, b)) == e.target.mul_unchecked(e.image(a), e.image(b)))) {
        r.hom_failure = std::make_pair(a, b);
        r.message = "φ(ab) != φ(a)φ(b) for a = " + to_string(a) + ", b = " + to_string(b);
        return r;
      }
    }
  r.ok = true;
  return r;
}

inline bool verify_embedding(const LefEmbedding& e, const FiniteSubset& M) { return verify_embedding_report(e, M).ok; }

namespace detail {

inline std::int64_t max_abs_coordinate(const FiniteSubset& S) {
  std::int64_t m = 0;
  for (const auto& s : S)
    for (auto v : s.code) m = std::max(m, v < 0 ? -v : v);
  return m;
}

// Reduction Z^d -> (Z/N)^d, taken as-is (no injectivity check).
inline LefEmbedding modular_embedding(const Group& G, const FiniteSubset& S, std::int64_t N) {
  if (N < 1) fail(Errc::parameter, "modulus must be positive");
  const std::size_t d = G.rank();
  auto cyc = Group::cyclic(static_cast<std::uint32_t>(N));
  Group F = d == 1 ? cyc : Group::product(std::vector<Group>(d, cyc));
  LefEmbedding e{G, S, F, {}};
  for (const auto& s : S) {
    std::vector<Elem> parts;
    for (auto v : s.code) parts.push_back(Elem{((v % N) + N) % N});
    e.phi.push_back(d == 1 ? parts[0] : F.join(parts));
  }
  return e;
}

inline std::optional<std::pair<Elem, Elem>> first_collision(const LefEmbedding& e) {
  std::unordered_map<Elem, Elem, ElemHash> seen;
  for (std::size_t i = 0; i < e.subset.size(); ++i) {
    auto [it, fresh] = seen.emplace(e.phi[i], e.subset[i]);
    if (!fresh) return std::make_pair(it->second, e.subset[i]);
  }
  return std::nullopt;
}

// Each generator's partial left translation of ball(R+1) completed to a
// permutation by matching leftover points in canonical order.
inline LefEmbedding ball_action_embedding(const Group& G, const FiniteSubset& S, std::size_t R) {
  for (const auto& s : S) {
    if (s.code.size() > R) fail(Errc::parameter, "element " + to_string(s) + " is outside the radius-" + std::to_string(R) + " ball");
  }
  auto X = ball(G, R + 1);
  const std::size_t n = X.size();
  auto F = Group::symmetric(n);
  std::unordered_map<std::int64_t, Elem> perm_of_letter;
  for (std::size_t gi = 0; gi < G.rank(); ++gi) {
    const auto letter = static_cast<std::int64_t>(gi + 1);
    Elem s{letter};
    std::vector<std::int64_t> p(n, -1);
    std::vector<bool> hit(n, false);
    std::vector<std::size_t> free_dom;
    for (std::size_t i = 0; i < n; ++i) {
      auto y = X.find(G.mul_unchecked(s, X[i]));
      if (y) {
        p[i] = static_cast<std::int64_t>(*y);
        hit[*y] = true;
      } else {
        free_dom.push_back(i);
      }
    }
    std::vector<std::size_t> free_rng;
    for (std::size_t i = 0; i < n; ++i)
      if (!hit[i]) free_rng.push_back(i);
    for (std::size_t k = 0; k < free_dom.size(); ++k) p[free_dom[k]] = static_cast<std::int64_t>(free_rng[k]);
    Elem perm(p);
    perm_of_letter[letter] = perm;
    perm_of_letter[-letter] = F.inv_unchecked(perm);
  }
  LefEmbedding e{G, S, F, {}};
  for (const auto& w : S) {
    Elem img = F.identity();
    for (auto l : w.code) img = F.mul_unchecked(img, perm_of_letter.at(l));
    e.phi.push_back(std::move(img));
  }
  return e;
}

inline FiniteSubset project(const Group& G, const FiniteSubset& S, std::size_t factor) {
  std::vector<Elem> out;
  for (const auto& s : S) out.push_back(G.split(s)[factor]);
  return FiniteSubset(std::move(out));
}

}  // namespace detail

// Builds φ on S for the universe's kind and verifies it against S itself
// (injectivity on S; partial homomorphism on the pairs of S whose product stays in S).
inline LefEmbedding build_embedding(const Group& G, const FiniteSubset& S, const EmbeddingParams& params = {}) {
  for (const auto& s : S) G.validate(s);
  using K = EmbeddingParams::Kind;
  LefEmbedding e;
  switch (G.kind()) {
    case GroupKind::free_abelian: {
      if (params.kind != K::automatic && params.kind != K::modular)
        fail(Errc::parameter, "free abelian universes use the modular embedding");
      std::int64_t N = 0;
      if (params.modulus) {
        N = *params.modulus;
        e = detail::modular_embedding(G, S, N);
        if (auto c = detail::first_collision(e)) {
          fail(Errc::parameter, "reduction mod " + std::to_string(N) + " is not injective: " + to_string(c->first) +
                                    " and " + to_string(c->second) + " collide");
        }
      } else {
        // Smallest N that is injective on S; N = 2·max|coord| + 1 always is.
        const auto bound = 2 * detail::max_abs_coordinate(S) + 1;
        for (N = 1; N <= bound; ++N) {
          e = detail::modular_embedding(G, S, N);
          if (!detail::first_collision(e)) break;
        }
      }
      break;
    }
    case GroupKind::free: {
      if (params.kind != K::automatic && params.kind != K::ball_action)
        fail(Errc::parameter, "free universes use the ball-action embedding");
      std::size_t R = 0;
      for (const auto& s : S) R = std::max(R, s.code.size());
      if (params.radius) R = *params.radius;
      e = detail::ball_action_embedding(G, S, R);
      break;
    }
    case GroupKind::finite:
    case GroupKind::symmetric: {
      if (params.kind != K::automatic && params.kind != K::identity)
        fail(Errc::parameter, "finite universes use the identity embedding");
      e = LefEmbedding{G, S, G, S.elements()};
      break;
    }
    case GroupKind::product: {
      if (params.kind != K::automatic && params.kind != K::product)
        fail(Errc::parameter, "product universes use a product of embeddings");
      if (params.kind == K::product && params.factors.size() != G.factors().size())
        fail(Errc::parameter, "product embedding needs one parameter set per factor");
      std::vector<LefEmbedding> parts;
      std::vector<Group> targets;
      for (std::size_t i = 0; i < G.factors().size(); ++i) {
        auto Si = detail::project(G, S, i);
        parts.push_back(build_embedding(G.factors()[i], Si, params.kind == K::product ? params.factors[i] : EmbeddingParams{}));
        targets.push_back(parts.back().target);
      }
      e.source = G;
      e.subset = S;
      e.target = Group::product(targets);
      for (const auto& s : S) {
        auto comps = G.split(s);
        std::vector<Elem> img;
        for (std::size_t i = 0; i < comps.size(); ++i) img.push_back(parts[i].image(comps[i]));
        e.phi.push_back(e.target.join(img));
      }
      break;
    }
  }
  if (auto c = detail::first_collision(e)) {
    fail(Errc::construction_bug, "embedding not injective on its subset: " + to_string(c->first) + ", " + to_string(c->second));
  }
  for (const auto& a : S)
    for (const auto& b : S) {
      auto ab = S.find(G.mul_unchecked(a, b));
      if (ab && !(e.phi[*ab] == e.target.mul_unchecked(e.image(a), e.image(b)))) {
        fail(Errc::construction_bug, "embedding breaks φ(ab) = φ(a)φ(b) at " + to_string(a) + ", " + to_string(b));
      }
    }
  return e;
}

// An F-equivariant endomap of A^F: either a table over configuration indices
// (mixed radix over F in canonical order, first element most significant) or
// a (d|F|)×(d|F|) matrix acting on stacked component vectors.
struct ConfigMap {
  std::variant<std::vector<std::uint64_t>, ModMatrix> data;

  bool is_table() const { return std::holds_alternative<std::vector<std::uint64_t>>(data); }
  const std::vector<std::uint64_t>& table() const { return std::get<std::vector<std::uint64_t>>(data); }
  const ModMatrix& matrix() const { return std::get<ModMatrix>(data); }
};

// The finite group F enumerated, with index tables for multiplication.
struct ConfigSpace {
  Group F;
  FiniteSubset elems;
  Alphabet A;
  std::size_t one = 0;

  ConfigSpace(Group f, Alphabet a) : F(std::move(f)), elems(elements(F)), A(std::move(a)), one(elems.index_of(F.identity())) {}

  std::size_t mul(std::size_t i, std::size_t j) const { return elems.index_of(F.mul_unchecked(elems[i], elems[j])); }
  std::size_t inv(std::size_t i) const { return elems.index_of(F.inv_unchecked(elems[i])); }
};

namespace detail {

inline std::vector<Symbol> decode_config(std::uint64_t idx, std::size_t n, std::uint32_t q) {
  std::vector<Symbol> v(n);
  for (std::size_t k = n; k-- > 0;) {
    v[k] = static_cast<Symbol>(idx % q);
    idx /= q;
  }
  return v;
}

inline std::uint64_t encode_config(const std::vector<Symbol>& v, std::uint32_t q) {
  std::uint64_t idx = 0;
  for (auto s : v) idx = idx * q + s;
  return idx;
}

inline void require_embedded_memory(const LefEmbedding& e, const FiniteSubset& M) {
  if (!verify_embedding(e, M)) fail(Errc::parameter, "embedding does not verify for the memory set");
}

}  // namespace detail

// α(x)(h) = μ(m ↦ x(h·φ(m))).
inline ConfigMap transport_endomap(const CellularAutomaton& tau, const LefEmbedding& e) {
  const auto& G = tau.universe();
  const auto& A = tau.alphabet();
  const auto& M = tau.memory();
  if (!(symmetrize(G, M) == M)) fail(Errc::invalid_input, "transport needs a symmetric memory containing 1_G");
  detail::require_embedded_memory(e, M);
  ConfigSpace cs(e.target, A);
  const std::size_t nF = cs.elems.size();
  std::vector<std::size_t> E;
  for (const auto& m : M) E.push_back(cs.elems.index_of(e.image(m)));
  std::vector<std::size_t> reads(nF * M.size());
  for (std::size_t h = 0; h < nF; ++h)
    for (std::size_t k = 0; k < M.size(); ++k) reads[h * M.size() + k] = cs.mul(h, E[k]);

  if (tau.map().is_matrix()) {
    const std::size_t d = A.dim();
    if (d * nF > limits().max_matrix_dim) fail(Errc::resource_cap, "transport matrix dimension exceeds cap");
    ModMatrix T(d * nF, d * nF, A.modulus());
    for (std::size_t h = 0; h < nF; ++h)
      for (std::size_t k = 0; k < M.size(); ++k) {
        const auto& C = tau.map().coefficients()[k];
        const auto col = reads[h * M.size() + k];
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j) T.add_to(h * d + i, col * d + j, C(i, j));
      }
    return ConfigMap{std::move(T)};
  }
  auto total = checked_power(A.size(), nF, limits().max_transport_table, "transport table");
  auto mu = tau.map().to_table(A);
  std::vector<std::uint64_t> table(total);
  std::vector<Symbol> out(nF), args(M.size());
  detail::for_each_word(nF, A.size(), limits().max_transport_table, "transport table", [&](const auto& x, std::uint64_t xi) {
    for (std::size_t h = 0; h < nF; ++h) {
      for (std::size_t k = 0; k < M.size(); ++k) args[k] = x[reads[h * M.size() + k]];
      out[h] = mu.eval(args, A);
    }
    table[xi] = detail::encode_config(out, A.size());
    return true;
  });
  return ConfigMap{std::move(table)};
}

// Two configurations with the same image; indices into A^F (y is zero for matrices).
struct CollisionWitness {
  std::vector<Symbol> x;
  std::vector<Symbol> y;
};

class NotInvertible : public Error {
 public:
  NotInvertible(const std::string& what, CollisionWitness w) : Error(Errc::not_invertible, what), witness_(std::move(w)) {}
  const CollisionWitness& witness() const { return witness_; }

 private:
  CollisionWitness witness_;
};

inline ConfigMap invert_transport(const ConfigMap& alpha, const ConfigSpace& cs) {
  const auto& A = cs.A;
  const std::size_t nF = cs.elems.size();
  if (alpha.is_table()) {
    const auto& t = alpha.table();
    auto cls = finite_map_classify(t);
    if (!cls.bijective) {
      auto c = find_collision(t);
      throw NotInvertible("transported endomap is not injective",
                          {detail::decode_config(c->first, nF, A.size()), detail::decode_config(c->second, nF, A.size())});
    }
    std::vector<std::uint64_t> inv(t.size());
    for (std::uint64_t i = 0; i < t.size(); ++i) inv[t[i]] = i;
    return ConfigMap{std::move(inv)};
  }
  const auto& T = alpha.matrix();
  auto inv = inverse(T);
  if (!inv) {
    auto ker = kernel_basis(T);
    CollisionWitness w{std::vector<Symbol>(nF, 0), std::vector<Symbol>(nF, 0)};
    const std::size_t d = A.dim();
    for (std::size_t h = 0; h < nF; ++h) {
      std::vector<std::uint32_t> comp(d);
      for (std::size_t i = 0; i < d; ++i) comp[i] = static_cast<std::uint32_t>(ker.at(0)[h * d + i]);
      w.x[h] = A.from_components(comp);
    }
    throw NotInvertible("transported matrix is singular", std::move(w));
  }
  return ConfigMap{std::move(*inv)};
}

// ν(x) = γ(ι(δ_E(x)))(1_F): place x on φ(M), basepoint elsewhere, apply γ, read at 1_F.
inline LocalRule extract_local_rule(const ConfigMap& gamma, const LefEmbedding& e, const FiniteSubset& M, const ConfigSpace& cs) {
  const auto& A = cs.A;
  const std::size_t nF = cs.elems.size();
  std::vector<std::size_t> E;
  for (const auto& m : M) E.push_back(cs.elems.index_of(e.image(m)));
  if (!gamma.is_table()) {
    const std::size_t d = A.dim();
    const auto& Gm = gamma.matrix();
    std::vector<ModMatrix> coeffs;
    for (std::size_t k = 0; k < M.size(); ++k) {
      ModMatrix c(d, d, A.modulus());
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) c.set(i, j, Gm(cs.one * d + i, E[k] * d + j));
      coeffs.push_back(std::move(c));
    }
    return LocalRule(M, StructuredMap::matrices(std::move(coeffs), A));
  }
  const auto& g = gamma.table();
  std::vector<Symbol> entries;
  std::vector<Symbol> config(nF);
  detail::for_each_word(M.size(), A.size(), limits().max_scan, "extract_local_rule", [&](const auto& x, std::uint64_t) {
    std::fill(config.begin(), config.end(), A.basepoint());
    for (std::size_t k = 0; k < M.size(); ++k) config[E[k]] = x[k];
    auto out = detail::decode_config(g[detail::encode_config(config, A.size())], nF, A.size());
    entries.push_back(out[cs.one]);
    return true;
  });
  return LocalRule(M, StructuredMap::table(M.size(), std::move(entries), A));
}

// α(h·x) = h·α(x) for all h ∈ F, with (h·x)(k) = x(h⁻¹k). Exhaustive.
inline bool check_equivariance(const ConfigMap& alpha, const ConfigSpace& cs) {
  const std::size_t nF = cs.elems.size();
  const auto& A = cs.A;
  std::vector<std::vector<std::size_t>> src(nF, std::vector<std::size_t>(nF));
  for (std::size_t h = 0; h < nF; ++h) {
    auto hinv = cs.inv(h);
    for (std::size_t k = 0; k < nF; ++k) src[h][k] = cs.mul(hinv, k);
  }
  if (!alpha.is_table()) {
    // P_h α = α P_h with (P_h v)[k] = v[h⁻¹k], entrywise.
    const auto& T = alpha.matrix();
    const std::size_t d = A.dim();
    for (std::size_t h = 0; h < nF; ++h)
      for (std::size_t k = 0; k < nF; ++k)
        for (std::size_t l = 0; l < nF; ++l)
          for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
              if (T(src[h][k] * d + i, src[h][l] * d + j) != T(k * d + i, l * d + j)) return false;
    return true;
  }
  const auto& t = alpha.table();
  auto act = [&](std::size_t h, const std::vector<Symbol>& x) {
    std::vector<Symbol> y(nF);
    for (std::size_t k = 0; k < nF; ++k) y[k] = x[src[h][k]];
    return y;
  };
  for (std::uint64_t xi = 0; xi < t.size(); ++xi) {
    auto x = detail::decode_config(xi, nF, A.size());
    auto ax = detail::decode_config(t[xi], nF, A.size());
    for (std::size_t h = 0; h < nF; ++h) {
      if (t[detail::encode_config(act(h, x), A.size())] != detail::encode_config(act(h, ax), A.size())) return false;
    }
  }
  return true;
}

// first∘second == Id on A^F.
inline bool composes_to_identity(const ConfigMap& first, const ConfigMap& second) {
  if (first.is_table() != second.is_table()) fail(Errc::invalid_input, "mixed endomap representations");
  if (!first.is_table()) {
    const auto& a = first.matrix();
    return a * second.matrix() == ModMatrix::identity(a.rows(), a.modulus());
  }
  const auto& a = first.table();
  const auto& b = second.table();
  for (std::uint64_t i = 0; i < b.size(); ++i)
    if (a[b[i]] != i) return false;
  return true;
}

struct TransportReport {
  MapClassification alpha_class;
  bool alpha_equivariant = false;
  bool certified_left = false;
  bool certified_right = false;
  std::optional<bool> beta_alpha_identity;  // only with a hint
};

struct TransportResult {
  FiniteSubset memory;
  ConfigMap alpha;
  ConfigMap gamma;
  std::optional<ConfigMap> beta;
  CellularAutomaton nu;
  TransportReport report;
};

// Transport τ to A^F, invert there, and pull the inverse back to a local rule ν
// on M = symmetrize(M_τ ∪ M_hint). ν is certified by both one-sided checks.
inline TransportResult transport_inverse_pipeline(const CellularAutomaton& tau,
                                                  const std::optional<CellularAutomaton>& sigma_hint,
                                                  const LefEmbedding& e) {
  const auto& G = tau.universe();
  const auto& A = tau.alphabet();
  FiniteSubset joint = tau.memory();
  if (sigma_hint) {
    detail::require_compatible(*sigma_hint, tau);
    joint = set_union(joint, sigma_hint->memory());
  }
  auto M = symmetrize(G, joint);
  auto tau_ext = extend_memory(tau, M);
  auto alpha = transport_endomap(tau_ext, e);
  ConfigSpace cs(e.target, A);

  TransportReport rep;
  if (alpha.is_table()) {
    rep.alpha_class = finite_map_classify(alpha.table());
  } else {
    const bool full = rank(alpha.matrix()) == alpha.matrix().rows();
    rep.alpha_class = {full, full, full};
  }
  rep.alpha_equivariant = check_equivariance(alpha, cs);

  std::optional<ConfigMap> beta;
  if (sigma_hint) {
    beta = transport_endomap(extend_memory(*sigma_hint, M), e);
    rep.beta_alpha_identity = composes_to_identity(*beta, alpha);
  }

  auto gamma = invert_transport(alpha, cs);
  auto nu_rule = extract_local_rule(gamma, e, M, cs);
  CellularAutomaton nu(G, A, nu_rule);
  rep.certified_left = check_left_inverse(nu, tau);
  rep.certified_right = check_right_inverse(nu, tau);
  if (!(rep.certified_left && rep.certified_right)) {
    if (rep.beta_alpha_identity.value_or(false)) {
      fail(Errc::internal, "extracted rule failed certification although the hint inverts τ");
    }
    fail(Errc::not_invertible,
         "extracted rule is not an inverse of τ; τ is not reversible with an inverse whose memory lies in M");
  }
  return TransportResult{M, std::move(alpha), std::move(gamma), std::move(beta), std::move(nu), rep};
}

struct DirectFinitenessReport {
  bool left = false;
  bool right = false;
  bool theorem_consistent = false;
};

inline DirectFinitenessReport direct_finiteness(const CellularAutomaton& sigma, const CellularAutomaton& tau) {
  DirectFinitenessReport r;
  r.left = check_left_inverse(sigma, tau);
  r.right = check_right_inverse(sigma, tau);
  r.theorem_consistent = !r.left || r.right;
  return r;
}

}  // namespace symba
