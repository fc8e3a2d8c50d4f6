// Acceptance gate: one PASS/FAIL line per criterion. Every check is exact;
// the only tolerances are the wall-clock limits below.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "fixtures.hpp"

using namespace symba;
using fixtures::z;
using fixtures::zrange;

namespace {

constexpr double kLimitMs[] = {30000, 1000, 1000, 60000, 10000, 5000, 0};

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Pipeline runs from criteria 2 and 3, audited by criterion 7.
struct PipelineRun {
  std::string name;
  CellularAutomaton tau;
  std::optional<CellularAutomaton> hint;
  LefEmbedding embedding;
  TransportResult result;
};
std::vector<PipelineRun> g_runs;

void expect(Outcome& o, bool cond, const std::string& what) {
  if (!cond && o.pass) {
    o.pass = false;
    o.detail = what;
  }
}

PipelineRun run_pipeline(const std::string& name, const CellularAutomaton& tau, const std::optional<CellularAutomaton>& hint,
                         std::int64_t N) {
  const auto& G = tau.universe();
  auto M = symmetrize(G, hint ? set_union(tau.memory(), hint->memory()) : tau.memory());
  EmbeddingParams p;
  p.kind = EmbeddingParams::Kind::modular;
  p.modulus = N;
  auto e = build_embedding(G, set_product(G, M, M), p);
  auto res = transport_inverse_pipeline(tau, hint, e);
  return PipelineRun{name, tau, hint, e, std::move(res)};
}

// 1. check_left_inverse against brute-force windows.
Outcome criterion_1() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  auto Z = Group::free_abelian(1);
  auto F2 = Group::free(2);
  int pairs = 0, positives = 0;
  auto trial = [&](const Group& G, const Alphabet& A, const std::vector<Elem>& pool, const FiniteSubset& E) {
    CellularAutomaton sigma = fixtures::identity_ca(G, A), tau = sigma;
    const int kind = pairs % 4;
    if (kind < 3) {
      std::tie(sigma, tau) = fixtures::inverse_pair(rng, G, A, pool[rng() % pool.size()]);
      if (kind > 0) {
        // Wider memory for σ with an unused coordinate; kind 2 also corrupts one entry.
        const auto& extra = pool[rng() % pool.size()];
        sigma = extend_memory(sigma, set_union(sigma.memory(), FiniteSubset{extra}));
        if (kind == 2) {
          auto entries = sigma.map().entries();
          auto& s = entries[rng() % entries.size()];
          s = (s + 1 + rng() % (A.size() - 1)) % A.size();
          sigma = CellularAutomaton(G, A, LocalRule(sigma.memory(), StructuredMap::table(sigma.memory().size(), entries, A)));
        }
      }
    } else {
      sigma = fixtures::random_table_ca(rng, G, A, pool, 3);
      tau = fixtures::random_table_ca(rng, G, A, pool, 3);
    }
    const bool fast = check_left_inverse(sigma, tau);
    const bool brute = fixtures::brute_force_left_inverse(sigma, tau, E);
    expect(o, fast == brute, "disagreement at pair " + std::to_string(pairs));
    positives += brute;
    ++pairs;
  };
  // Z: every pattern over ball(2)·M_σ·M_τ.
  for (int i = 0; i < 120; ++i) trial(Z, Alphabet::plain(2 + i % 2), ball(Z, 1).elements(), ball(Z, 2));
  // free(2): σ∘τ = Id is decided at 1_G by equivariance. With |A| = 3 the
  // memories stay on the a-axis so 3^|window| remains enumerable.
  std::vector<Elem> axis{F2.identity(), Elem{1}, Elem{-1}};
  for (int i = 0; i < 80; ++i) {
    if (i % 2 == 0) {
      trial(F2, Alphabet::plain(2), ball(F2, 1).elements(), FiniteSubset{F2.identity()});
    } else {
      trial(F2, Alphabet::plain(3), axis, FiniteSubset{F2.identity()});
    }
  }
  expect(o, pairs >= 200, "too few pairs");
  o.detail = o.pass ? std::to_string(pairs) + " pairs, " + std::to_string(positives) + " left-invertible, 100% agreement" : o.detail;
  return o;
}

// 2. Shift synthesis and transport.
Outcome criterion_2() {
  Outcome o;
  auto Z = Group::free_abelian(1);
  auto A = Alphabet::plain(2);
  auto shift = fixtures::shift_ca(Z, A, z(1));
  auto syn = synthesize_left_inverse(shift, 2);
  expect(o, syn.inverse.has_value(), "synthesis found nothing");
  if (!o.pass) return o;
  expect(o, syn.radius == 1, "radius " + std::to_string(syn.radius));
  expect(o, check_left_inverse(*syn.inverse, shift) && check_right_inverse(*syn.inverse, shift), "synthesized rule fails a check");
  for (std::int64_t N : {5, 8}) {
    for (const auto& hint : {std::optional<CellularAutomaton>{}, std::optional<CellularAutomaton>{*syn.inverse}}) {
      auto run = run_pipeline("shift mod " + std::to_string(N) + (hint ? " with hint" : ""), shift, hint, N);
      const auto& nu = run.result.nu;
      expect(o, check_left_inverse(nu, shift) && check_right_inverse(nu, shift), run.name + ": ν fails a check");
      g_runs.push_back(std::move(run));
    }
  }
  if (o.pass) o.detail = "inverse at radius 1; ν certified for N = 5, 8";
  return o;
}

// 3. The linear pair C = [[0,1],[1,t]].
Outcome criterion_3() {
  Outcome o;
  auto C = fixtures::pair_C();
  auto D = one_sided_inverse_solve(C, 1);
  expect(o, D.has_value(), "no inverse at r = 1");
  if (!o.pass) return o;
  expect(o, is_identity(matrix_mul(*D, C)), "D·C != I");
  expect(o, is_identity(matrix_mul(C, *D)), "C·D != I");
  auto tau = to_linear_ca(C);
  auto sigma = to_linear_ca(*D);
  expect(o, check_left_inverse(sigma, tau) && check_right_inverse(sigma, tau), "CA checks fail");
  auto run = run_pipeline("pair mod 8 with hint", tau, sigma, 8);
  expect(o, check_left_inverse(run.result.nu, tau) && check_right_inverse(run.result.nu, tau), "transported ν fails a check");
  g_runs.push_back(std::move(run));
  if (o.pass) o.detail = "D found at r = 1, D·C = C·D = I, CA checks and transport pass";
  return o;
}

// 4. Seeded invertible matrices: left inverses are right inverses.
Outcome criterion_4() {
  Outcome o;
  const Group groups[] = {Group::free_abelian(1), Group::free(2)};
  int solved = 0;
  try {
    for (int i = 0; i < 100; ++i) {
      const auto& G = groups[i % 2];
      const std::size_t d = 1 + (i / 2) % 2;
      const std::size_t r = (i / 4) % 2;
      const std::uint64_t p = (i / 8) % 2 ? 3 : 2;
      auto s = random_invertible_matrix(7000 + i, G, d, r, p);
      const auto& C = s.matrix;
      const auto tag = "instance " + std::to_string(i);
      std::vector<GroupRingMatrix> lefts{s.inverse};
      if (auto Ds = one_sided_inverse_solve(C, 1)) {
        lefts.push_back(*Ds);
        ++solved;
      }
      for (const auto& D : lefts) {
        if (!is_identity(matrix_mul(D, C))) continue;
        expect(o, is_identity(matrix_mul(C, D)), tag + ": D·C = I but C·D != I");
        expect(o, check_right_inverse(to_linear_ca(D), to_linear_ca(C)), tag + ": check_right_inverse fails");
      }
      expect(o, is_identity(matrix_mul(lefts.front(), C)), tag + ": constructed inverse is not a left inverse");
    }
  } catch (const std::exception& e) {
    expect(o, false, std::string("exception: ") + e.what());
  }
  if (o.pass) o.detail = "100 instances, " + std::to_string(solved) + " also solved at r = 1";
  return o;
}

// 5. XOR negative control.
Outcome criterion_5() {
  Outcome o;
  auto tau = fixtures::xor_ca();
  const auto& G = tau.universe();
  auto syn = synthesize_left_inverse(tau, 4);
  expect(o, !syn.inverse, "XOR synthesized an inverse");
  expect(o, syn.last_witness.has_value(), "no witness");
  if (syn.last_witness) {
    // Independent re-check: equal images on ball(4), different values at 0.
    const auto& w = *syn.last_witness;
    auto ext = extend_memory(tau, symmetrize(G, tau.memory()));
    auto N = ball(G, 4);
    expect(o, w.x.domain == set_product(G, N, ext.memory()), "witness domain is not N·M");
    expect(o, induced_map(ext, N, w.x) == induced_map(ext, N, w.y), "witness images differ");
    expect(o, w.x.at(G.identity()) != w.y.at(G.identity()), "witness agrees at the identity");
  }
  GroupRingMatrix one_t(G, 2, 1);
  one_t.at(0, 0) = fixtures::gr(G, 2, {{z(0), 1}, {z(1), 1}});
  for (std::size_t r = 0; r <= 4; ++r) expect(o, !one_sided_inverse_solve(one_t, r), "[1+t] solved at r = " + std::to_string(r));
  if (o.pass) o.detail = "no inverse for r <= 4, witness re-verified, [1+t] unsolvable";
  return o;
}

// 6. Embedding verifier.
Outcome criterion_6() {
  Outcome o;
  auto Z = Group::free_abelian(1);
  auto S = zrange(-2, 2);
  EmbeddingParams p3;
  p3.kind = EmbeddingParams::Kind::modular;
  p3.modulus = 3;
  bool rejected = false;
  try {
    build_embedding(Z, S, p3);
  } catch (const Error& e) {
    rejected = e.code() == Errc::parameter;
  }
  expect(o, rejected, "mod 3 not rejected");
  auto c = detail::first_collision(detail::modular_embedding(Z, S, 3));
  expect(o, c && c->first == z(-2) && c->second == z(1), "collision is not (-2, 1)");
  auto p5 = p3;
  p5.modulus = 5;
  auto e5 = build_embedding(Z, S, p5);
  expect(o, verify_embedding(e5, zrange(-1, 1)), "mod 5 rejected");

  auto F2 = Group::free(2);
  auto B2 = ball(F2, 2);
  auto e = build_embedding(F2, B2);
  expect(o, e.target.kind() == GroupKind::symmetric && e.target.rank() == ball(F2, 3).size(), "target is not Sym(ball(3))");
  // Exhaustive injectivity and partial-hom identity on S = ball(2).
  for (std::size_t i = 0; i < B2.size(); ++i)
    for (std::size_t j = 0; j < B2.size(); ++j) {
      if (i != j) expect(o, !(e.phi[i] == e.phi[j]), "not injective");
      auto ab = F2.mul(B2[i], B2[j]);
      if (B2.contains(ab)) expect(o, e.image(ab) == e.target.mul(e.phi[i], e.phi[j]), "partial hom fails");
    }
  expect(o, verify_embedding(e, ball(F2, 1)), "verify_embedding rejects ball(1)");
  if (o.pass) o.detail = "mod 3 rejected at (-2,1), mod 5 and Sym(53) accepted";
  return o;
}

// 7. Transport invariants over every pipeline run above.
Outcome criterion_7() {
  Outcome o;
  int hinted = 0;
  expect(o, g_runs.size() == 5, "expected 5 pipeline runs, saw " + std::to_string(g_runs.size()));
  for (const auto& run : g_runs) {
    const auto& A = run.tau.alphabet();
    ConfigSpace cs(run.embedding.target, A);
    const auto& alpha = run.result.alpha;
    expect(o, check_equivariance(alpha, cs), run.name + ": α not equivariant");
    expect(o, run.result.report.alpha_equivariant, run.name + ": report disagrees");
    if (!run.hint) continue;
    ++hinted;
    expect(o, run.result.beta.has_value(), run.name + ": no β");
    const auto& beta = *run.result.beta;
    const std::size_t nF = cs.elems.size();
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < nF; ++i) total *= A.size();
    expect(o, total <= (std::uint64_t{1} << 16), run.name + ": configuration space too large");
    if (alpha.is_table()) {
      expect(o, composes_to_identity(beta, alpha), run.name + ": β∘α != Id");
    } else {
      // Apply both matrices to every configuration.
      const std::size_t d = A.dim();
      bool ok = true;
      for (std::uint64_t xi = 0; xi < total && ok; ++xi) {
        auto x = detail::decode_config(xi, nF, A.size());
        std::vector<std::uint64_t> v(nF * d);
        for (std::size_t h = 0; h < nF; ++h) {
          auto comp = A.components(x[h]);
          for (std::size_t k = 0; k < d; ++k) v[h * d + k] = comp[k];
        }
        ok = beta.matrix().apply(alpha.matrix().apply(v)) == v;
      }
      expect(o, ok, run.name + ": β∘α != Id on some configuration");
    }
    expect(o, run.result.report.beta_alpha_identity == true, run.name + ": report disagrees on β∘α");
  }
  if (o.pass) o.detail = std::to_string(g_runs.size()) + " runs equivariant, " + std::to_string(hinted) + " hinted runs with β∘α = Id";
  return o;
}

}  // namespace

int main() {
  const std::function<Outcome()> criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4,
                                               criterion_5, criterion_6, criterion_7};
  int failures = 0;
  for (int i = 0; i < 7; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (kLimitMs[i] > 0 && ms > kLimitMs[i]) {
      o.pass = false;
      o.detail += " (time limit exceeded)";
    }
    failures += !o.pass;
    char limit[32] = "none";
    if (kLimitMs[i] > 0) std::snprintf(limit, sizeof limit, "%.0f ms", kLimitMs[i]);
    std::printf("criterion %d: %s  [%.1f ms, limit %s]  %s\n", i + 1, o.pass ? "PASS" : "FAIL", ms, limit, o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
