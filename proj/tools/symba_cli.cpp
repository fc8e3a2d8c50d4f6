// symba: command-line front end.
//
// Exit codes: 0 property holds / artifact written, 1 property fails (witness in
// the report), 2 invalid input, 3 resource cap, 4 internal error.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "symba/symba.hpp"

namespace {

using namespace symba;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kFails = 1;
constexpr int kInvalid = 2;
constexpr int kCap = 3;
constexpr int kInternal = 4;

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::resource_cap: return kCap;
    case Errc::not_invertible: return kFails;
    case Errc::construction_bug:
    case Errc::internal: return kInternal;
    default: return kInvalid;
  }
}

// FNV-1a over the canonical dumps of every input document.
class Digest {
 public:
  void add(const std::string& s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 1099511628211ull;
    }
    h_ ^= 0xff;
    h_ *= 1099511628211ull;
  }
  void add(const json& j) { add(j.dump()); }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 14695981039346656037ull;
};

struct Run {
  std::string command;
  Digest digest;
  json outcome = json::object();
  json witnesses = json::array();
  json artifacts = json::object();

  json load(const std::string& path) {
    auto j = io::read_json_file(path);
    digest.add(j);
    return j;
  }
  // Inline JSON when the argument looks like a document, a file path otherwise.
  json load_arg(const std::string& arg) {
    const auto first = arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) {
      json j = io::detail::guarded("argument", [&] { return json::parse(arg); });
      digest.add(j);
      return j;
    }
    return load(arg);
  }

  void write(const std::string& path, const json& j, const char* what) {
    io::write_json_file(path, j);
    artifacts[what] = path;
  }
};

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool timing = false;
  std::string report_path;
};

json pattern_json(const CellularAutomaton& ca, const Pattern& p) { return io::to_json(ca.universe(), ca.alphabet(), p); }

// ---- subcommands; each returns the exit code and fills the run record

struct CheckInverseArgs {
  std::string sigma, tau, side = "both", route = "auto";
};

int cmd_check_inverse(Run& run, const CheckInverseArgs& a) {
  auto sigma = io::ca_from_json(run.load(a.sigma));
  auto tau = io::ca_from_json(run.load(a.tau));
  const auto route = a.route == "exhaustive" ? CheckRoute::exhaustive : CheckRoute::automatic;
  bool ok = true;
  if (a.side == "left" || a.side == "both") {
    const bool l = check_left_inverse(sigma, tau, route);
    run.outcome["left"] = l;
    ok = ok && l;
  }
  if (a.side == "right" || a.side == "both") {
    const bool r = check_right_inverse(sigma, tau, route);
    run.outcome["right"] = r;
    ok = ok && r;
  }
  run.outcome["holds"] = ok;
  return ok ? kOk : kFails;
}

struct SynthesizeArgs {
  std::string input, output;
  std::size_t max_radius = 2;
};

int cmd_synthesize(Run& run, const SynthesizeArgs& a) {
  auto tau = io::ca_from_json(run.load(a.input));
  run.digest.add(std::to_string(a.max_radius));
  auto res = synthesize_left_inverse(tau, a.max_radius);
  run.outcome["found"] = res.inverse.has_value();
  if (!res.inverse) {
    if (res.last_witness) {
      run.witnesses.push_back(
          {{"kind", "determinacy"}, {"radius", a.max_radius}, {"pair", io::to_json(tau.universe(), tau.alphabet(), *res.last_witness)}});
    }
    return kFails;
  }
  run.outcome["radius"] = res.radius;
  run.outcome["left"] = check_left_inverse(*res.inverse, tau);
  run.outcome["right"] = check_right_inverse(*res.inverse, tau);
  if (!a.output.empty()) run.write(a.output, io::to_json(*res.inverse), "inverse");
  return kOk;
}

struct TransportArgs {
  std::string ca, sigma, embedding = "{}", out, nu_out;
};

int cmd_transport(Run& run, const TransportArgs& a) {
  auto tau = io::ca_from_json(run.load(a.ca));
  std::optional<CellularAutomaton> hint;
  if (!a.sigma.empty()) hint = io::ca_from_json(run.load(a.sigma));
  auto params = io::embedding_params_from_json(run.load_arg(a.embedding));
  const auto& G = tau.universe();
  auto M = symmetrize(G, hint ? set_union(tau.memory(), hint->memory()) : tau.memory());
  auto e = build_embedding(G, set_product(G, M, M), params);
  run.outcome["target_order"] = *e.target.order();
  try {
    auto res = transport_inverse_pipeline(tau, hint, e);
    const auto& r = res.report;
    run.outcome["alpha"] = io::to_json(r.alpha_class);
    run.outcome["alpha_equivariant"] = r.alpha_equivariant;
    run.outcome["certified_left"] = r.certified_left;
    run.outcome["certified_right"] = r.certified_right;
    if (r.beta_alpha_identity) run.outcome["beta_alpha_identity"] = *r.beta_alpha_identity;
    json result = {{"memory", io::to_json(G, res.memory)},
                   {"embedding", io::to_json(e)},
                   {"report", run.outcome},
                   {"nu", io::to_json(res.nu)}};
    if (!a.out.empty()) run.write(a.out, result, "result");
    if (!a.nu_out.empty()) run.write(a.nu_out, io::to_json(res.nu), "nu");
    return kOk;
  } catch (const NotInvertible& err) {
    run.outcome["invertible"] = false;
    json x = json::array(), y = json::array();
    for (auto s : err.witness().x) x.push_back(io::symbol_to_json(tau.alphabet(), s));
    for (auto s : err.witness().y) y.push_back(io::symbol_to_json(tau.alphabet(), s));
    run.witnesses.push_back({{"kind", "transport_collision"}, {"x", x}, {"y", y}});
    return kFails;
  } catch (const Error& err) {
    if (err.code() != Errc::not_invertible) throw;
    run.outcome["invertible"] = false;
    run.outcome["message"] = err.what();
    return kFails;
  }
}

struct PairArgs {
  std::string sigma, tau, out;
};

int cmd_direct_finiteness(Run& run, const PairArgs& a) {
  auto sigma = io::ca_from_json(run.load(a.sigma));
  auto tau = io::ca_from_json(run.load(a.tau));
  auto r = direct_finiteness(sigma, tau);
  run.outcome["left"] = r.left;
  run.outcome["right"] = r.right;
  run.outcome["theorem_consistent"] = r.theorem_consistent;
  return r.theorem_consistent ? kOk : kFails;
}

int cmd_compose(Run& run, const PairArgs& a) {
  auto sigma = io::ca_from_json(run.load(a.sigma));
  auto tau = io::ca_from_json(run.load(a.tau));
  auto c = compose(sigma, tau);
  run.outcome["memory_size"] = c.memory().size();
  if (!a.out.empty()) run.write(a.out, io::to_json(c), "composite");
  return kOk;
}

struct EvolveArgs {
  std::string ca, pattern, out;
  std::size_t steps = 1;
};

int cmd_evolve(Run& run, const EvolveArgs& a) {
  auto tau = io::ca_from_json(run.load(a.ca));
  auto p = io::pattern_from_json(run.load(a.pattern), tau.universe(), tau.alphabet());
  run.digest.add(std::to_string(a.steps));
  auto q = evolve(tau, p, a.steps);
  run.outcome["domain_size"] = q.domain.size();
  if (a.out.empty()) {
    run.artifacts["pattern"] = pattern_json(tau, q);
  } else {
    run.write(a.out, pattern_json(tau, q), "pattern");
  }
  return kOk;
}

struct EmbeddingArgs {
  std::string universe, memory, embedding = "{}";
};

int cmd_verify_embedding(Run& run, const EmbeddingArgs& a) {
  auto G = io::group_from_json(run.load_arg(a.universe));
  auto M = io::subset_from_json(G, run.load_arg(a.memory));
  auto params = io::embedding_params_from_json(run.load_arg(a.embedding));
  auto S = set_product(G, M, M);
  LefEmbedding e;
  if (params.kind == EmbeddingParams::Kind::modular && params.modulus && G.kind() == GroupKind::free_abelian) {
    // Built unchecked so a colliding modulus is reported as a failed verification.
    e = detail::modular_embedding(G, S, *params.modulus);
  } else {
    e = build_embedding(G, S, params);
  }
  auto rep = verify_embedding_report(e, M);
  run.outcome["ok"] = rep.ok;
  run.outcome["target"] = io::to_json(e.target);
  if (rep.collision)
    run.witnesses.push_back({{"kind", "collision"}, {"a", io::to_json(G, rep.collision->first)}, {"b", io::to_json(G, rep.collision->second)}});
  if (rep.hom_failure)
    run.witnesses.push_back(
        {{"kind", "hom_failure"}, {"a", io::to_json(G, rep.hom_failure->first)}, {"b", io::to_json(G, rep.hom_failure->second)}});
  return rep.ok ? kOk : kFails;
}

struct GroupRingArgs {
  std::string a, b, input, output, universe = R"({"kind":"free_abelian","rank":1})";
  std::size_t radius = 1, dim = 2, factors = 5;
  std::uint64_t modulus = 2;
};

int cmd_gr_mul(Run& run, const GroupRingArgs& g) {
  auto X = io::matrix_from_json(run.load(g.a));
  auto Y = io::matrix_from_json(run.load(g.b));
  auto P = matrix_mul(X, Y);
  run.outcome["identity"] = is_identity(P);
  if (g.output.empty()) {
    run.artifacts["product"] = io::to_json(P);
  } else {
    run.write(g.output, io::to_json(P), "product");
  }
  return kOk;
}

int cmd_gr_solve(Run& run, const GroupRingArgs& g) {
  auto C = io::matrix_from_json(run.load(g.input));
  run.digest.add(std::to_string(g.radius));
  auto D = one_sided_inverse_solve(C, g.radius);
  run.outcome["found"] = D.has_value();
  if (!D) return kFails;
  run.outcome["two_sided"] = is_identity(matrix_mul(C, *D));
  if (!g.output.empty()) run.write(g.output, io::to_json(*D), "inverse");
  return kOk;
}

int cmd_gr_roundtrip(Run& run, const GroupRingArgs& g) {
  auto X = io::matrix_from_json(run.load(g.input));
  auto ca = to_linear_ca(X);
  const bool same = from_linear_ca(ca) == X && io::matrix_from_json(io::to_json(X)) == X;
  run.outcome["roundtrip"] = same;
  if (!g.output.empty()) run.write(g.output, io::to_json(ca), "ca");
  return same ? kOk : kFails;
}

int cmd_gr_random(Run& run, const GroupRingArgs& g, std::uint64_t seed) {
  auto G = io::group_from_json(run.load_arg(g.universe));
  run.digest.add(std::to_string(g.dim) + "/" + std::to_string(g.radius) + "/" + std::to_string(g.modulus) + "/" +
                 std::to_string(g.factors));
  auto s = random_invertible_matrix(seed, G, g.dim, g.radius, g.modulus, g.factors);
  run.outcome["verified"] = is_identity(matrix_mul(s.matrix, s.inverse)) && is_identity(matrix_mul(s.inverse, s.matrix));
  json out = {{"matrix", io::to_json(s.matrix)}, {"inverse", io::to_json(s.inverse)}};
  if (g.output.empty()) {
    run.artifacts["sample"] = out;
  } else {
    run.write(g.output, io::to_json(s.matrix), "matrix");
    run.write(g.output + ".inverse.json", io::to_json(s.inverse), "inverse");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cellular automata over group universes: inverse checks, synthesis and transport"};
  app.require_subcommand(1);
  Globals glob;
  app.add_option("--seed", glob.seed, "Seed for randomized generators")->capture_default_str();
  app.add_option("--threads", glob.threads, "Worker cap (operations run single-threaded)")->capture_default_str();
  app.add_flag("--timing", glob.timing, "Include wall time in the report");
  app.add_option("--report", glob.report_path, "Also write the run report to this file");

  Run run;
  std::function<int()> action;
  auto bind = [&](CLI::App* sub, std::function<int()> fn) {
    sub->callback([&, sub, fn] {
      run.command = sub->get_name();
      action = fn;
    });
  };

  CheckInverseArgs ci;
  auto* s_ci = app.add_subcommand("check-inverse", "Check sigma∘tau = Id and/or tau∘sigma = Id");
  s_ci->add_option("--sigma", ci.sigma)->required()->check(CLI::ExistingFile);
  s_ci->add_option("--tau", ci.tau)->required()->check(CLI::ExistingFile);
  s_ci->add_option("--side", ci.side)->check(CLI::IsMember({"left", "right", "both"}))->capture_default_str();
  s_ci->add_option("--route", ci.route)->check(CLI::IsMember({"auto", "exhaustive"}))->capture_default_str();
  bind(s_ci, [&] { return cmd_check_inverse(run, ci); });

  SynthesizeArgs sy;
  auto* s_sy = app.add_subcommand("synthesize-inverse", "Search for a left inverse with memory ball(r)");
  s_sy->add_option("--input", sy.input)->required()->check(CLI::ExistingFile);
  s_sy->add_option("--max-radius", sy.max_radius)->capture_default_str();
  s_sy->add_option("--output", sy.output, "Inverse rule file");
  bind(s_sy, [&] { return cmd_synthesize(run, sy); });

  TransportArgs tr;
  auto* s_tr = app.add_subcommand("transport", "Invert through a finite-group embedding and pull the rule back");
  s_tr->add_option("--ca", tr.ca)->required()->check(CLI::ExistingFile);
  s_tr->add_option("--sigma", tr.sigma, "Optional inverse hint")->check(CLI::ExistingFile);
  s_tr->add_option("--embedding", tr.embedding, "Embedding parameters (inline JSON or file)")->capture_default_str();
  s_tr->add_option("--out", tr.out, "Result file");
  s_tr->add_option("--nu-out", tr.nu_out, "Extracted rule as a CA file");
  bind(s_tr, [&] { return cmd_transport(run, tr); });

  PairArgs df;
  auto* s_df = app.add_subcommand("direct-finiteness", "Check that a left inverse is also a right inverse");
  s_df->add_option("--sigma", df.sigma)->required()->check(CLI::ExistingFile);
  s_df->add_option("--tau", df.tau)->required()->check(CLI::ExistingFile);
  bind(s_df, [&] { return cmd_direct_finiteness(run, df); });

  PairArgs co;
  auto* s_co = app.add_subcommand("compose", "Write the rule of sigma∘tau");
  s_co->add_option("--sigma", co.sigma)->required()->check(CLI::ExistingFile);
  s_co->add_option("--tau", co.tau)->required()->check(CLI::ExistingFile);
  s_co->add_option("--out", co.out);
  bind(s_co, [&] { return cmd_compose(run, co); });

  EvolveArgs ev;
  auto* s_ev = app.add_subcommand("evolve", "Apply a CA to a finite pattern, shrinking the domain each step");
  s_ev->add_option("--ca", ev.ca)->required()->check(CLI::ExistingFile);
  s_ev->add_option("--pattern", ev.pattern)->required()->check(CLI::ExistingFile);
  s_ev->add_option("--steps", ev.steps)->capture_default_str();
  s_ev->add_option("--out", ev.out);
  bind(s_ev, [&] { return cmd_evolve(run, ev); });

  EmbeddingArgs em;
  auto* s_em = app.add_subcommand("verify-embedding", "Build and verify an embedding of M² into a finite group");
  s_em->add_option("--universe", em.universe)->required();
  s_em->add_option("--memory", em.memory)->required();
  s_em->add_option("--embedding", em.embedding)->capture_default_str();
  bind(s_em, [&] { return cmd_verify_embedding(run, em); });

  GroupRingArgs gr;
  auto* s_gr = app.add_subcommand("groupring", "Matrices over (Z/p)[G]");
  s_gr->require_subcommand(1);
  auto* g_mul = s_gr->add_subcommand("mul", "Product of two matrices");
  g_mul->add_option("--a", gr.a)->required()->check(CLI::ExistingFile);
  g_mul->add_option("--b", gr.b)->required()->check(CLI::ExistingFile);
  g_mul->add_option("--output", gr.output);
  bind(g_mul, [&] { return cmd_gr_mul(run, gr); });
  auto* g_solve = s_gr->add_subcommand("solve", "Find D with D·C = I supported in ball(r)");
  g_solve->add_option("--input", gr.input)->required()->check(CLI::ExistingFile);
  g_solve->add_option("--radius", gr.radius)->capture_default_str();
  g_solve->add_option("--output", gr.output);
  bind(g_solve, [&] { return cmd_gr_solve(run, gr); });
  auto* g_rt = s_gr->add_subcommand("roundtrip", "Matrix to linear CA and back");
  g_rt->add_option("--input", gr.input)->required()->check(CLI::ExistingFile);
  g_rt->add_option("--output", gr.output, "Linear CA file");
  bind(g_rt, [&] { return cmd_gr_roundtrip(run, gr); });
  auto* g_rand = s_gr->add_subcommand("random", "Seeded invertible matrix with its inverse");
  g_rand->add_option("--universe", gr.universe)->capture_default_str();
  g_rand->add_option("--dim", gr.dim)->capture_default_str();
  g_rand->add_option("--radius", gr.radius)->capture_default_str();
  g_rand->add_option("--modulus", gr.modulus)->capture_default_str();
  g_rand->add_option("--factors", gr.factors)->capture_default_str();
  g_rand->add_option("--output", gr.output);
  bind(g_rand, [&] { return cmd_gr_random(run, gr, glob.seed); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }
  if (!action) return kInvalid;
  if (s_gr->parsed()) run.command = "groupring " + run.command;

  const auto t0 = std::chrono::steady_clock::now();
  int rc = kInternal;
  json error;
  try {
    rc = action();
  } catch (const Error& e) {
    rc = exit_code_for(e.code());
    error = {{"code", errc_name(e.code())}, {"message", e.what()}};
  } catch (const std::exception& e) {
    rc = kInternal;
    error = {{"code", "internal"}, {"message", e.what()}};
  }

  run.digest.add(run.command);
  json report = {{"command", run.command},
                 {"inputs_digest", run.digest.hex()},
                 {"seed", glob.seed},
                 {"exit_code", rc},
                 {"outcome", run.outcome},
                 {"witnesses", run.witnesses},
                 {"artifacts", run.artifacts}};
  if (!error.is_null()) report["error"] = error;
  if (glob.timing) {
    report["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  std::cout << report.dump(2) << "\n";
  if (!glob.report_path.empty()) {
    try {
      io::write_json_file(glob.report_path, report);
    } catch (const Error& e) {
      std::cerr << "symba: " << e.what() << "\n";
      return kInvalid;
    }
  }
  if (!error.is_null()) std::cerr << "symba: " << error["message"].get<std::string>() << "\n";
  return rc;
}
