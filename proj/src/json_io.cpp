#include "qgraph/json_io.hpp"

namespace qgraph {

Json to_json(const TrigMonomial& m) {
  Json factors = Json::array();
  for (const auto& f : m.factors) {
    factors.push_back({{"edge", f.edge}, {"kind", std::string(to_string(f.kind))}, {"exp", f.exp}});
  }
  return {{"mu_power", m.mu_power}, {"factors", std::move(factors)}};
}

Json to_json(const AlphaPolynomial& p) {
  Json out = Json::array();
  for (const auto& [vars, c] : p.terms()) out.push_back({{"vars", vars}, {"value", to_string(c)}});
  return out;
}

Json to_json(const TrigSum& s) {
  Json out = Json::array();
  for (const auto& [m, c] : s.terms()) {
    Json t = to_json(m);
    t["coeff"] = to_json(c);
    out.push_back(std::move(t));
  }
  return out;
}

Json to_json(const CouplingVector& c) {
  Json out = Json::object();
  for (std::size_t i = 0; i < c.size(); ++i) out[c.ids()[i]] = to_string(c[i]);
  return out;
}

Json expansion_json(const SecularExpansion& e) {
  Json classes = Json::array();
  for (const auto& c : e.classes()) {
    classes.push_back({{"weight", to_json(c.weight)},
                       {"weight_text", c.weight.to_string()},
                       {"f", to_json(c.f)},
                       {"c_gamma", to_string(c.c_gamma)},
                       {"g_gamma", to_json(c.g_gamma)}});
  }
  return {{"classes", std::move(classes)}};
}

Json verdict_json(const IsoVerdict& v) {
  Json out = {{"verdict", std::string(to_string(v.verdict))},
              {"used_phi_equality", v.used_phi_equality},
              {"approximate", v.approximate},
              {"length_relations", v.length_relations},
              {"witness", nullptr}};
  if (v.witness) {
    const auto& w = *v.witness;
    Json j = {{"kind", w.kind == Witness::Kind::WeightClass ? "weight-class" : "precondition"},
              {"weight", nullptr},
              {"lhs", to_string(w.lhs)},
              {"rhs", to_string(w.rhs)},
              {"message", w.message}};
    if (w.weight) {
      j["weight"] = to_json(*w.weight);
      j["weight_text"] = w.weight->to_string();
    }
    out["witness"] = std::move(j);
  }
  return out;
}

Json report_json(const UniquenessReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) entries.push_back({{"tag", e.tag}, {"conclusion", e.conclusion}});
  return {{"entries", std::move(entries)},
          {"caveats", r.caveats},
          {"cleaning_candidates", r.cleaning_candidates},
          {"trimmings", r.trimmings}};
}

Json sigma_json(const MarkedGraph& g, const CouplingVector& a, const CouplingVector& b) {
  auto values = [](const SigmaSet& s) {
    Json out = Json::array();
    for (const auto& v : s.sorted()) out.push_back(to_string(v));
    return out;
  };
  const auto sa = sigma_set(g, a);
  const auto sb = sigma_set(g, b);
  return {{"sigma_alpha", values(sa)}, {"sigma_alpha2", values(sb)}, {"equal", sa == sb},
          {"necessary", sigma_necessary(g, a, b)}};
}

Json balance_json(std::string_view vertex, const BalanceSides& s) {
  return {{"vertex", std::string(vertex)}, {"lhs", to_string(s.lhs)}, {"rhs", to_string(s.rhs)}, {"equal", s.equal()}};
}

Json reduction_json(const ReductionResult& r, const CouplingVector* alpha, const CouplingVector* alpha2) {
  Json map = Json::array();
  for (const auto& c : r.coupling_map) {
    map.push_back({{"vertex", c.vertex}, {"rule", std::string(to_string(c.rule))}, {"sources", c.sources}});
  }
  Json out = {{"graph", serialize_graph(r.graph)}, {"coupling_map", std::move(map)}, {"dropped", r.dropped}};
  if (alpha) out["alpha"] = to_json(r.apply(*alpha));
  if (alpha2) out["alpha2"] = to_json(r.apply(*alpha2));
  return out;
}

Json quasigraph_json(const QuasiGraph& q) {
  Json vertices = Json::array();
  for (const auto& v : q.vertices) vertices.push_back({{"id", v.id}, {"type", std::string(to_string(v.type))}});
  Json edges = Json::array();
  for (const auto& e : q.edges) {
    edges.push_back({{"id", e.id},
                     {"u", q.vertices[e.u].id},
                     {"v", q.vertices[e.v].id},
                     {"length", e.length},
                     {"length_text", e.length_text},
                     {"kind", std::string(to_string(e.kind))}});
  }
  return {{"direction", std::string(to_string(q.direction))},
          {"removed_edge", q.removed_edge},
          {"kept_vertex", q.kept_vertex},
          {"eliminated_vertex", q.eliminated_vertex},
          {"quasivertex", q.vertices[q.quasivertex].id},
          {"vertices", std::move(vertices)},
          {"edges", std::move(edges)}};
}

Json search_json(const std::vector<IsoCandidate>& cs) {
  Json out = Json::array();
  for (const auto& c : cs) {
    out.push_back({{"alpha", to_json(c.alpha)}, {"residual", c.residual}, {"exact_verified", c.exact_verified}});
  }
  return {{"candidates", std::move(out)}};
}

Json spectrum_json(const SpectrumWindow& w) {
  Json roots = Json::array();
  for (const auto& r : w.roots) {
    roots.push_back({{"lambda", r.lambda}, {"multiplicity", r.multiplicity}, {"flag", std::string(to_string(r.flag))}});
  }
  return {{"lambda_min", w.lambda_min},
          {"lambda_max", w.lambda_max},
          {"method", std::string(to_string(w.method))},
          {"roots", std::move(roots)}};
}

Json error_json(const Error& e) {
  std::string msg = e.what();
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
  return {{"error", std::string(to_string(e.code()))}, {"message", msg}};
}

}  // namespace qgraph
