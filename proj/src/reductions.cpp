#include "qgraph/reductions.hpp"

#include <algorithm>

#include "qgraph/error.hpp"

namespace qgraph {

std::string_view to_string(CouplingRule r) { return r == CouplingRule::Identity ? "identity" : "sum"; }

std::string_view to_string(QuasiDirection d) {
  return d == QuasiDirection::DeltaPrimeToDelta ? "delta'->delta" : "delta->delta'";
}

std::string_view to_string(QuasiEdgeKind k) {
  switch (k) {
    case QuasiEdgeKind::Regular: return "regular";
    case QuasiEdgeKind::Quasi: return "quasiedge";
    case QuasiEdgeKind::Loop: return "loop";
    case QuasiEdgeKind::QuasiLoopMulti: return "quasiloop-multi";
    case QuasiEdgeKind::QuasiLoopFromLoop: return "quasiloop-loop";
  }
  return "?";
}

CouplingVector ReductionResult::apply(const CouplingVector& alpha) const {
  std::vector<std::string> ids;
  std::vector<Rational> values;
  for (const auto& c : coupling_map) {
    Rational sum = 0;
    for (const auto& s : c.sources) sum += alpha.at(s);
    ids.push_back(c.vertex);
    values.push_back(sum);
  }
  return CouplingVector(std::move(ids), std::move(values), alpha.is_exact());
}

namespace {

// Keeps the vertices with remap[i] set (in source order) and rebuilds the
// graph, translating construction failures into reduction errors.
ReductionResult assemble(const MarkedGraph& g, std::vector<Vertex> vertices, std::vector<Edge> edges,
                         std::vector<CouplingSource> map, std::vector<std::string> dropped,
                         std::vector<std::optional<std::size_t>> remap) {
  if (vertices.empty() || edges.empty()) {
    throw Error(ErrorCode::EmptyResult, "reduction leaves a graph without edges");
  }
  try {
    MarkedGraph out(std::move(vertices), std::move(edges));
    return {std::move(out), std::move(map), std::move(dropped), std::move(remap)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DisconnectedGraph) {
      throw Error(ErrorCode::WouldDisconnect, "reduction of a " + std::to_string(g.vertex_count()) +
                                                 "-vertex graph leaves it disconnected");
    }
    throw;
  }
}

CouplingSource identity(const std::string& id) { return {id, CouplingRule::Identity, {id}}; }

// Reachability on the graph with vertex `skip` removed, started from `from`.
std::size_t reachable_without(const MarkedGraph& g, std::size_t skip, std::size_t from) {
  std::vector<bool> seen(g.vertex_count(), false);
  std::vector<std::size_t> stack{from};
  seen[from] = true;
  seen[skip] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (const auto ei : g.incident(v)) {
      const auto w = g.edge(ei).other(v);
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count;
}

// True when some non-loop edge at v is not a bridge.
bool on_cycle(const MarkedGraph& g, std::size_t v) {
  for (const auto ei : g.incident(v)) {
    const auto& e = g.edge(ei);
    if (e.is_loop()) continue;
    const auto w = e.other(v);
    std::vector<bool> seen(g.vertex_count(), false);
    std::vector<std::size_t> stack{w};
    seen[w] = true;
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      for (const auto fi : g.incident(x)) {
        if (fi == ei) continue;
        const auto y = g.edge(fi).other(x);
        if (y == v) return true;
        if (!seen[y]) {
          seen[y] = true;
          stack.push_back(y);
        }
      }
    }
  }
  return false;
}

std::size_t non_loop_valence(const MarkedGraph& g, std::size_t v) {
  const auto& inc = g.incident(v);
  return static_cast<std::size_t>(
      std::count_if(inc.begin(), inc.end(), [&](std::size_t e) { return !g.edge(e).is_loop(); }));
}

}  // namespace

ReductionResult trim_same_type_edge(const MarkedGraph& g, std::string_view edge_id) {
  const auto ei = g.edge_index(edge_id);
  const auto& removed = g.edge(ei);
  if (removed.is_loop()) throw Error(ErrorCode::IsLoop, "edge '" + removed.id + "' is a loop");
  if (!g.same_type(removed)) {
    throw Error(ErrorCode::NotSameType, "edge '" + removed.id + "' joins a delta and a delta' vertex");
  }
  const auto keep = std::min(removed.u, removed.v);
  const auto gone = std::max(removed.u, removed.v);

  std::vector<std::optional<std::size_t>> remap(g.vertex_count());
  std::vector<Vertex> vertices;
  std::vector<CouplingSource> map;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    if (i == gone) continue;
    remap[i] = vertices.size();
    if (i == keep) {
      const auto& a = g.vertex(keep).id;
      const auto& b = g.vertex(gone).id;
      vertices.push_back({a + "+" + b, g.type(keep)});
      map.push_back({vertices.back().id, CouplingRule::Sum, {a, b}});
    } else {
      vertices.push_back(g.vertex(i));
      map.push_back(identity(g.vertex(i).id));
    }
  }
  remap[gone] = remap[keep];

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    if (i == ei) continue;
    auto e = g.edge(i);
    e.u = *remap[e.u];
    e.v = *remap[e.v];
    edges.push_back(std::move(e));
  }
  return assemble(g, std::move(vertices), std::move(edges), std::move(map), {}, std::move(remap));
}

ReductionResult trim_loop_vertex(const MarkedGraph& g, std::string_view vertex_id) {
  const auto v = g.vertex_index(vertex_id);
  const auto& inc = g.incident(v);
  if (std::none_of(inc.begin(), inc.end(), [&](std::size_t e) { return g.edge(e).is_loop(); })) {
    throw Error(ErrorCode::NoLoopAtVertex, "no loop at '" + std::string(vertex_id) + "'");
  }
  const auto valence = non_loop_valence(g, v);
  if (valence == 0) throw Error(ErrorCode::EmptyResult, "'" + std::string(vertex_id) + "' carries only loops");
  if (valence != 1 && !on_cycle(g, v)) {
    throw Error(ErrorCode::WouldDisconnect,
                "'" + std::string(vertex_id) + "' is neither a boundary vertex nor on a cycle");
  }
  const std::size_t start = v == 0 ? 1 : 0;
  if (reachable_without(g, v, start) != g.vertex_count() - 1) {
    throw Error(ErrorCode::WouldDisconnect, "removing '" + std::string(vertex_id) + "' disconnects the graph");
  }

  std::vector<std::optional<std::size_t>> remap(g.vertex_count());
  std::vector<Vertex> vertices;
  std::vector<CouplingSource> map;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    if (i == v) continue;
    remap[i] = vertices.size();
    vertices.push_back(g.vertex(i));
    map.push_back(identity(g.vertex(i).id));
  }
  std::vector<Edge> edges;
  for (const auto& e0 : g.edges()) {
    if (e0.u == v || e0.v == v) continue;
    auto e = e0;
    e.u = *remap[e.u];
    e.v = *remap[e.v];
    edges.push_back(std::move(e));
  }
  return assemble(g, std::move(vertices), std::move(edges), std::move(map), {g.vertex(v).id}, std::move(remap));
}

ReductionResult clean_vertex(const MarkedGraph& g, std::string_view vertex_id) {
  const auto v = g.vertex_index(vertex_id);
  const auto& inc = g.incident(v);
  if (std::any_of(inc.begin(), inc.end(), [&](std::size_t e) { return g.edge(e).is_loop(); })) {
    throw Error(ErrorCode::LoopAtVertex, "'" + std::string(vertex_id) + "' carries a loop");
  }
  if (inc.size() != 2) {
    throw Error(ErrorCode::WrongValence,
                "'" + std::string(vertex_id) + "' has valence " + std::to_string(g.degree(v)) + ", expected 2");
  }
  const auto& e1 = g.edge(inc[0]);
  const auto& e2 = g.edge(inc[1]);

  std::vector<std::optional<std::size_t>> remap(g.vertex_count());
  std::vector<Vertex> vertices;
  std::vector<CouplingSource> map;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    if (i == v) continue;
    remap[i] = vertices.size();
    vertices.push_back(g.vertex(i));
    map.push_back(identity(g.vertex(i).id));
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    if (i == inc[0] || i == inc[1]) continue;
    auto e = g.edge(i);
    e.u = *remap[e.u];
    e.v = *remap[e.v];
    edges.push_back(std::move(e));
  }
  Edge joined;
  joined.id = e1.id + "+" + e2.id;
  joined.u = *remap[e1.other(v)];
  joined.v = *remap[e2.other(v)];
  joined.length = e1.length + e2.length;
  edges.push_back(std::move(joined));
  return assemble(g, std::move(vertices), std::move(edges), std::move(map), {g.vertex(v).id}, std::move(remap));
}

QuasiGraph quasi_remove_mixed_edge(const MarkedGraph& g, std::string_view edge_id, QuasiDirection direction) {
  const auto ei = g.edge_index(edge_id);
  const auto& removed = g.edge(ei);
  if (removed.is_loop()) throw Error(ErrorCode::IsLoop, "edge '" + removed.id + "' is a loop");
  if (g.same_type(removed)) throw Error(ErrorCode::NotMixedEdge, "edge '" + removed.id + "' is not mixed");

  const auto delta = g.type(removed.u) == VertexType::Delta ? removed.u : removed.v;
  const auto delta_prime = removed.other(delta);
  const bool to_delta = direction == QuasiDirection::DeltaPrimeToDelta;
  const auto keep = to_delta ? delta : delta_prime;
  const auto gone = to_delta ? delta_prime : delta;

  QuasiGraph q;
  q.direction = direction;
  q.removed_edge = removed.id;
  q.kept_vertex = g.vertex(keep).id;
  q.eliminated_vertex = g.vertex(gone).id;
  q.vertex_remap.assign(g.vertex_count(), std::nullopt);
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    if (i == gone) continue;
    q.vertex_remap[i] = q.vertices.size();
    if (i == keep) {
      q.quasivertex = q.vertices.size();
      q.vertices.push_back({g.vertex(keep).id + "+" + g.vertex(gone).id, g.type(keep)});
    } else {
      q.vertices.push_back({g.vertex(i).id, g.type(i)});
    }
  }
  q.vertex_remap[gone] = q.quasivertex;

  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    if (i == ei) continue;
    const auto& e = g.edge(i);
    QuasiEdge out{e.id, *q.vertex_remap[e.u], *q.vertex_remap[e.v], e.length, e.length_text, QuasiEdgeKind::Regular};
    const bool at_gone = e.u == gone || e.v == gone;
    const bool at_keep = e.u == keep || e.v == keep;
    if (e.is_loop()) {
      out.kind = at_gone ? QuasiEdgeKind::QuasiLoopFromLoop : QuasiEdgeKind::Loop;
    } else if (at_gone && at_keep) {
      out.kind = QuasiEdgeKind::QuasiLoopMulti;
    } else if (at_gone) {
      out.kind = QuasiEdgeKind::Quasi;
    }
    // quasiedges and quasiloops start at the quasivertex
    if (out.kind != QuasiEdgeKind::Regular && out.kind != QuasiEdgeKind::Loop && out.u != q.quasivertex) {
      std::swap(out.u, out.v);
    }
    q.edges.push_back(std::move(out));
  }
  return q;
}

Thm00Result thm00_reduce(const MarkedGraph& g, std::string_view edge_id, const CouplingVector& alpha,
                         const CouplingVector& alpha2, std::optional<QuasiDirection> direction) {
  const auto ei = g.edge_index(edge_id);
  const auto& e = g.edge(ei);
  if (e.is_loop() || g.same_type(e)) throw Error(ErrorCode::NotMixedEdge, "edge '" + e.id + "' is not mixed");
  const auto delta = g.type(e.u) == VertexType::Delta ? e.u : e.v;
  const auto delta_prime = e.other(delta);
  auto doubly_zero = [&](std::size_t v) { return alpha[v] == 0 && alpha2[v] == 0; };

  QuasiDirection dir;
  if (direction) {
    dir = *direction;
    const auto endpoint = dir == QuasiDirection::DeltaPrimeToDelta ? delta_prime : delta;
    if (!doubly_zero(endpoint)) {
      throw Error(ErrorCode::EndpointNotDoublyZero,
                  "couplings at '" + g.vertex(endpoint).id + "' are not both zero");
    }
  } else if (doubly_zero(delta_prime)) {
    dir = QuasiDirection::DeltaPrimeToDelta;
  } else if (doubly_zero(delta)) {
    dir = QuasiDirection::DeltaToDeltaPrime;
  } else {
    throw Error(ErrorCode::EndpointNotDoublyZero, "neither endpoint of '" + e.id + "' has both couplings zero");
  }

  auto q = quasi_remove_mixed_edge(g, edge_id, dir);
  const auto keep = g.vertex_index(q.kept_vertex);
  std::vector<Vertex> vertices;
  std::vector<CouplingSource> map;
  for (std::size_t i = 0; i < q.vertices.size(); ++i) {
    if (i == q.quasivertex) {
      vertices.push_back({q.vertices[i].id, g.type(keep)});
      map.push_back({q.vertices[i].id, CouplingRule::Identity, {q.kept_vertex}});
    } else {
      vertices.push_back({q.vertices[i].id, q.vertices[i].type});
      map.push_back(identity(q.vertices[i].id));
    }
  }
  std::vector<Edge> edges;
  for (const auto& qe : q.edges) edges.push_back({qe.id, qe.u, qe.v, qe.length, qe.length_text});
  auto reduction = assemble(g, std::move(vertices), std::move(edges), std::move(map), {q.eliminated_vertex},
                            q.vertex_remap);
  auto a = reduction.apply(alpha);
  auto b = reduction.apply(alpha2);
  return {std::move(reduction), std::move(a), std::move(b), std::move(q)};
}

std::vector<Trimming> admissible_trimmings(const MarkedGraph& g) {
  std::vector<Trimming> out;
  for (const auto& e : g.edges()) {
    if (e.is_loop() || !g.same_type(e)) continue;
    try {
      trim_same_type_edge(g, e.id);
      out.push_back({TrimmingKind::SameTypeEdge, e.id});
    } catch (const Error&) {
    }
  }
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    try {
      trim_loop_vertex(g, g.vertex(v).id);
      out.push_back({TrimmingKind::LoopVertex, g.vertex(v).id});
    } catch (const Error&) {
    }
  }
  return out;
}

ReductionResult apply_trimming(const MarkedGraph& g, const Trimming& t) {
  return t.kind == TrimmingKind::SameTypeEdge ? trim_same_type_edge(g, t.target) : trim_loop_vertex(g, t.target);
}

}  // namespace qgraph
