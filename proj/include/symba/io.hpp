#pragma once

// JSON file formats. Keys are emitted in sorted order, so documents are byte-stable.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "symba/alphabet.hpp"
#include "symba/ca.hpp"
#include "symba/group.hpp"
#include "symba/group_ring.hpp"
#include "symba/lef.hpp"
#include "symba/synthesis.hpp"

namespace symba::io {

using nlohmann::json;

namespace detail {

template <class Fn>
auto guarded(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    fail(Errc::invalid_input, std::string(what) + ": " + ex.what());
  }
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(Errc::invalid_input, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

}  // namespace detail

// ---- groups and elements

inline json to_json(const Group& G) {
  switch (G.kind()) {
    case GroupKind::free_abelian: return {{"kind", "free_abelian"}, {"rank", G.rank()}};
    case GroupKind::free: return {{"kind", "free"}, {"rank", G.rank()}};
    case GroupKind::finite: {
      json gens = json::array();
      for (const auto& g : G.generators()) gens.push_back(g.code[0]);
      return {{"kind", "finite"}, {"table", G.table()}, {"generators", gens}};
    }
    case GroupKind::symmetric: return {{"kind", "symmetric"}, {"degree", G.rank()}};
    case GroupKind::product: {
      json fs = json::array();
      for (const auto& f : G.factors()) fs.push_back(to_json(f));
      return {{"kind", "product"}, {"factors", fs}};
    }
  }
  return {};
}

inline Group group_from_json(const json& j) {
  return detail::guarded("universe", [&]() -> Group {
    const auto kind = detail::field(j, "kind").get<std::string>();
    if (kind == "free_abelian") return Group::free_abelian(detail::field(j, "rank").get<std::size_t>());
    if (kind == "free") return Group::free(detail::field(j, "rank").get<std::size_t>());
    if (kind == "symmetric") return Group::symmetric(detail::field(j, "degree").get<std::size_t>());
    if (kind == "cyclic") return Group::cyclic(detail::field(j, "order").get<std::uint32_t>());
    if (kind == "finite") {
      auto table = detail::field(j, "table").get<CayleyTable>();
      if (j.contains("generators")) return Group::finite(std::move(table), j.at("generators").get<std::vector<std::uint32_t>>());
      return Group::finite(std::move(table));
    }
    if (kind == "product") {
      std::vector<Group> fs;
      for (const auto& f : detail::field(j, "factors")) fs.push_back(group_from_json(f));
      return Group::product(std::move(fs));
    }
    fail(Errc::invalid_input, "unknown group kind \"" + kind + "\"");
  });
}

inline json to_json(const Group& G, const Elem& e) {
  switch (G.kind()) {
    case GroupKind::finite: return e.code.at(0);
    case GroupKind::product: {
      json parts = json::array();
      auto comps = G.split(e);
      for (std::size_t i = 0; i < comps.size(); ++i) parts.push_back(to_json(G.factors()[i], comps[i]));
      return parts;
    }
    default: return e.code;
  }
}

inline Elem elem_from_json(const Group& G, const json& j) {
  return detail::guarded("element", [&]() -> Elem {
    Elem e;
    switch (G.kind()) {
      case GroupKind::finite: e = Elem{j.get<std::int64_t>()}; break;
      case GroupKind::product: {
        if (!j.is_array() || j.size() != G.factors().size()) fail(Errc::invalid_input, "product element arity mismatch");
        std::vector<Elem> parts;
        for (std::size_t i = 0; i < j.size(); ++i) parts.push_back(elem_from_json(G.factors()[i], j[i]));
        e = G.join(parts);
        break;
      }
      case GroupKind::free_abelian:
        if (j.is_number_integer() && G.rank() == 1) {
          e = Elem{j.get<std::int64_t>()};
          break;
        }
        [[fallthrough]];
      default: e = Elem(j.get<std::vector<std::int64_t>>());
    }
    G.validate(e);
    return e;
  });
}

inline json to_json(const Group& G, const FiniteSubset& S) {
  json a = json::array();
  for (const auto& e : S) a.push_back(to_json(G, e));
  return a;
}

inline FiniteSubset subset_from_json(const Group& G, const json& j) {
  if (!j.is_array()) fail(Errc::invalid_input, "subset must be an array of elements");
  std::vector<Elem> v;
  for (const auto& x : j) v.push_back(elem_from_json(G, x));
  FiniteSubset S(v);
  if (S.size() != v.size()) fail(Errc::invalid_input, "subset lists an element twice");
  return S;
}

// ---- alphabets, symbols, maps

inline json to_json(const Alphabet& A) {
  switch (A.flavor()) {
    case Flavor::plain: return {{"flavor", "plain"}, {"size", A.size()}};
    case Flavor::module: return {{"flavor", "module"}, {"modulus", A.modulus()}, {"dim", A.dim()}};
    case Flavor::group: return {{"flavor", "group"}, {"table", A.structure_group().table()}};
  }
  return {};
}

inline Alphabet alphabet_from_json(const json& j) {
  return detail::guarded("alphabet", [&]() -> Alphabet {
    const auto flavor = detail::field(j, "flavor").get<std::string>();
    if (flavor == "plain") return Alphabet::plain(detail::field(j, "size").get<std::uint32_t>());
    if (flavor == "module")
      return Alphabet::module(detail::field(j, "modulus").get<std::uint32_t>(), detail::field(j, "dim").get<std::uint32_t>());
    if (flavor == "group") return Alphabet::group(detail::field(j, "table").get<CayleyTable>());
    fail(Errc::invalid_input, "unknown alphabet flavor \"" + flavor + "\"");
  });
}

// Module symbols serialize as component vectors, others as indices.
inline json symbol_to_json(const Alphabet& A, Symbol s) {
  if (A.flavor() == Flavor::module) return A.components(s);
  return s;
}

inline Symbol symbol_from_json(const Alphabet& A, const json& j) {
  return detail::guarded("symbol", [&]() -> Symbol {
    Symbol s = 0;
    if (A.flavor() == Flavor::module && j.is_array()) {
      auto v = j.get<std::vector<std::uint32_t>>();
      s = A.from_components(v);
    } else {
      s = j.get<Symbol>();
    }
    A.validate(s);
    return s;
  });
}

inline json to_json(const StructuredMap& m) {
  if (m.is_table()) return {{"arity", m.arity()}, {"table", m.entries()}};
  json mats = json::array();
  for (const auto& c : m.coefficients()) {
    json rows = json::array();
    for (std::size_t i = 0; i < c.rows(); ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < c.cols(); ++k) row.push_back(c(i, k));
      rows.push_back(row);
    }
    mats.push_back(rows);
  }
  return {{"arity", m.arity()}, {"matrices", mats}};
}

inline StructuredMap map_from_json(const json& j, const Alphabet& A) {
  return detail::guarded("map", [&]() -> StructuredMap {
    const auto arity = detail::field(j, "arity").get<std::size_t>();
    if (j.contains("table")) return StructuredMap::table(arity, j.at("table").get<std::vector<Symbol>>(), A);
    if (j.contains("matrices")) {
      if (A.flavor() != Flavor::module) fail(Errc::invalid_input, "matrix maps need a module alphabet");
      std::vector<ModMatrix> cs;
      for (const auto& mj : j.at("matrices")) {
        auto rows = mj.get<std::vector<std::vector<std::uint64_t>>>();
        ModMatrix c(A.dim(), A.dim(), A.modulus());
        if (rows.size() != A.dim()) fail(Errc::invalid_input, "coefficient matrix has wrong row count");
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].size() != A.dim()) fail(Errc::invalid_input, "coefficient matrix has wrong column count");
          for (std::size_t k = 0; k < rows[i].size(); ++k) c.set(i, k, rows[i][k]);
        }
        cs.push_back(std::move(c));
      }
      if (cs.size() != arity) fail(Errc::invalid_input, "matrix count does not match arity");
      return StructuredMap::matrices(std::move(cs), A);
    }
    fail(Errc::invalid_input, "map needs \"table\" or \"matrices\"");
  });
}

// ---- cellular automata and patterns

inline json to_json(const CellularAutomaton& ca) {
  json flags = {{"pointed", ca.pointed()}};
  if (ca.alphabet().flavor() != Flavor::plain) flags["structured"] = ca.structured();
  return {{"universe", to_json(ca.universe())},
          {"alphabet", to_json(ca.alphabet())},
          {"memory", to_json(ca.universe(), ca.memory())},
          {"map", to_json(ca.map())},
          {"flags", flags}};
}

inline CellularAutomaton ca_from_json(const json& j) {
  return detail::guarded("cellular automaton", [&]() -> CellularAutomaton {
    auto G = group_from_json(detail::field(j, "universe"));
    auto A = alphabet_from_json(detail::field(j, "alphabet"));
    auto M = subset_from_json(G, detail::field(j, "memory"));
    std::vector<Elem> listed;
    for (const auto& x : j.at("memory")) listed.push_back(elem_from_json(G, x));
    // Table coordinate i belongs to the i-th listed element.
    LocalRule positional(M, map_from_json(detail::field(j, "map"), A));
    if (std::equal(listed.begin(), listed.end(), M.begin())) return CellularAutomaton(G, A, positional);
    return CellularAutomaton(G, A, rename_memory(positional, listed, A));
  });
}

inline json to_json(const Group& G, const Alphabet& A, const Pattern& p) {
  json vals = json::array();
  for (auto s : p.values) vals.push_back(symbol_to_json(A, s));
  return {{"domain", to_json(G, p.domain)}, {"values", vals}};
}

inline Pattern pattern_from_json(const json& j, const Group& G, const Alphabet& A) {
  return detail::guarded("pattern", [&]() -> Pattern {
    const auto& dom = detail::field(j, "domain");
    const auto& vals = detail::field(j, "values");
    if (!dom.is_array() || !vals.is_array() || dom.size() != vals.size())
      fail(Errc::invalid_input, "pattern domain and values differ in length");
    std::vector<Elem> listed;
    for (const auto& x : dom) listed.push_back(elem_from_json(G, x));
    Pattern p{FiniteSubset(listed), std::vector<Symbol>(listed.size())};
    if (p.domain.size() != listed.size()) fail(Errc::invalid_input, "pattern domain lists an element twice");
    for (std::size_t i = 0; i < listed.size(); ++i) p.values[p.domain.index_of(listed[i])] = symbol_from_json(A, vals[i]);
    return p;
  });
}

// ---- group ring matrices

inline json to_json(const GroupRingMatrix& X) {
  json rows = json::array();
  for (std::size_t i = 0; i < X.dim(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < X.dim(); ++k) {
      json cell = json::array();
      for (const auto& [g, c] : X.at(i, k).terms()) cell.push_back({{"elem", to_json(X.group(), g)}, {"coef", c}});
      row.push_back(cell);
    }
    rows.push_back(row);
  }
  return {{"modulus", X.modulus()}, {"dim", X.dim()}, {"universe", to_json(X.group())}, {"entries", rows}};
}

inline GroupRingMatrix matrix_from_json(const json& j) {
  return detail::guarded("group ring matrix", [&]() -> GroupRingMatrix {
    auto G = group_from_json(detail::field(j, "universe"));
    const auto p = detail::field(j, "modulus").get<std::uint64_t>();
    const auto d = detail::field(j, "dim").get<std::size_t>();
    const auto& rows = detail::field(j, "entries");
    if (!rows.is_array() || rows.size() != d) fail(Errc::invalid_input, "matrix row count does not match dim");
    GroupRingMatrix X(G, p, d);
    for (std::size_t i = 0; i < d; ++i) {
      if (!rows[i].is_array() || rows[i].size() != d) fail(Errc::invalid_input, "matrix column count does not match dim");
      for (std::size_t k = 0; k < d; ++k)
        for (const auto& t : rows[i][k])
          X.at(i, k).add_term(elem_from_json(G, detail::field(t, "elem")), detail::field(t, "coef").get<std::uint64_t>());
    }
    return X;
  });
}

// ---- embeddings and reports

inline EmbeddingParams embedding_params_from_json(const json& j) {
  return detail::guarded("embedding", [&]() -> EmbeddingParams {
    EmbeddingParams p;
    const auto kind = j.value("kind", std::string("auto"));
    using K = EmbeddingParams::Kind;
    if (kind == "auto") {
      p.kind = K::automatic;
    } else if (kind == "modular") {
      p.kind = K::modular;
      if (j.contains("N")) p.modulus = j.at("N").get<std::int64_t>();
    } else if (kind == "ball_action") {
      p.kind = K::ball_action;
      if (j.contains("R")) p.radius = j.at("R").get<std::size_t>();
    } else if (kind == "identity") {
      p.kind = K::identity;
    } else if (kind == "product") {
      p.kind = K::product;
      for (const auto& f : detail::field(j, "factors")) p.factors.push_back(embedding_params_from_json(f));
    } else {
      fail(Errc::invalid_input, "unknown embedding kind \"" + kind + "\"");
    }
    return p;
  });
}

inline json to_json(const LefEmbedding& e) {
  json phi = json::array();
  for (std::size_t i = 0; i < e.subset.size(); ++i)
    phi.push_back({{"elem", to_json(e.source, e.subset[i])}, {"image", to_json(e.target, e.phi[i])}});
  return {{"target", to_json(e.target)}, {"phi", phi}};
}

inline json to_json(const Group& G, const Alphabet& A, const Witness& w) {
  return {{"x", to_json(G, A, w.x)}, {"y", to_json(G, A, w.y)}};
}

inline json to_json(const MapClassification& c) {
  return {{"injective", c.injective}, {"surjective", c.surjective}, {"bijective", c.bijective}};
}

// ---- files

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::invalid_input, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return detail::guarded("parse", [&] { return json::parse(ss.str()); });
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(Errc::invalid_input, "cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace symba::io
