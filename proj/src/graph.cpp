#include "qgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "qgraph/error.hpp"

namespace qgraph {

std::string_view to_string(VertexType t) { return t == VertexType::Delta ? "delta" : "delta'"; }

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool connected(std::size_t n, const std::vector<Edge>& edges) {
  if (n == 0) return false;
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    auto w = stack.back();
    stack.pop_back();
    for (auto x : adj[w]) {
      if (!seen[x]) {
        seen[x] = true;
        ++count;
        stack.push_back(x);
      }
    }
  }
  return count == n;
}

}  // namespace

MarkedGraph::MarkedGraph(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  if (vertices_.empty()) throw Error(ErrorCode::EmptyGraph, "graph has no vertices");
  if (edges_.empty()) throw Error(ErrorCode::EmptyGraph, "graph has no edges");
  std::set<std::string_view> ids;
  for (const auto& v : vertices_) {
    if (!ids.insert(v.id).second) throw Error(ErrorCode::DuplicateId, "vertex id '" + v.id + "'");
  }
  ids.clear();
  for (const auto& e : edges_) {
    if (!ids.insert(e.id).second) throw Error(ErrorCode::DuplicateId, "edge id '" + e.id + "'");
    if (e.u >= vertices_.size() || e.v >= vertices_.size()) {
      throw Error(ErrorCode::UnknownVertexRef, "edge '" + e.id + "' has an endpoint out of range");
    }
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw Error(ErrorCode::NonPositiveLength, "edge '" + e.id + "' has length " + format_double(e.length));
    }
  }
  if (!connected(vertices_.size(), edges_)) throw Error(ErrorCode::DisconnectedGraph, "graph is not connected");
  incident_.assign(vertices_.size(), {});
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    incident_[edges_[i].u].push_back(i);
    if (!edges_[i].is_loop()) incident_[edges_[i].v].push_back(i);
  }
}

std::size_t MarkedGraph::vertex_index(std::string_view id) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].id == id) return i;
  }
  throw Error(ErrorCode::UnknownVertexRef, "unknown vertex '" + std::string(id) + "'");
}

std::size_t MarkedGraph::edge_index(std::string_view id) const {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].id == id) return i;
  }
  throw Error(ErrorCode::UnknownEdge, "unknown edge '" + std::string(id) + "'");
}

std::size_t MarkedGraph::degree(std::size_t v) const {
  std::size_t d = 0;
  for (auto i : incident_.at(v)) d += edges_[i].is_loop() ? 2 : 1;
  return d;
}

bool MarkedGraph::has_loops() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_loop(); });
}

bool MarkedGraph::is_tree() const {
  if (edges_.size() + 1 != vertices_.size()) return false;
  return !has_loops();  // connected with N-1 edges and no loops rules out multi-edges
}

double MarkedGraph::total_length() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.length;
  return s;
}

GraphBuilder& GraphBuilder::add_vertex(std::string id, VertexType type) {
  vertices_.push_back({std::move(id), type});
  return *this;
}

GraphBuilder& GraphBuilder::add_edge(std::string id, std::string_view u, std::string_view v, double length,
                                     std::string length_text) {
  edges_.push_back({std::move(id), std::string(u), std::string(v), length, std::move(length_text)});
  return *this;
}

MarkedGraph GraphBuilder::build() const {
  auto find = [&](const std::string& id, const std::string& edge) {
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (vertices_[i].id == id) return i;
    }
    throw Error(ErrorCode::UnknownVertexRef, "edge '" + edge + "' references unknown vertex '" + id + "'");
  };
  std::vector<Edge> edges;
  edges.reserve(edges_.size());
  for (const auto& p : edges_) {
    edges.push_back({p.id, find(p.u, p.id), find(p.v, p.id), p.length, p.text});
  }
  return MarkedGraph(vertices_, std::move(edges));
}

// ---------------------------------------------------------------------------

CouplingVector::CouplingVector(const MarkedGraph& g, const std::map<std::string, Rational>& by_id, bool exact)
    : exact_(exact) {
  for (const auto& [id, value] : by_id) {
    (void)value;
    g.vertex_index(id);  // throws UnknownVertexRef
  }
  for (const auto& v : g.vertices()) {
    auto it = by_id.find(v.id);
    if (it == by_id.end()) throw Error(ErrorCode::MissingCoupling, "no coupling for vertex '" + v.id + "'");
    ids_.push_back(v.id);
    values_.push_back(it->second);
  }
}

CouplingVector::CouplingVector(std::vector<std::string> ids, std::vector<Rational> values, bool exact)
    : ids_(std::move(ids)), values_(std::move(values)), exact_(exact) {
  if (ids_.size() != values_.size()) {
    throw Error(ErrorCode::InvalidArgument, "coupling ids and values differ in length");
  }
}

CouplingVector CouplingVector::from_doubles(const MarkedGraph& g, const std::vector<double>& values) {
  if (values.size() != g.vertex_count()) {
    throw Error(ErrorCode::MissingCoupling, "expected one coupling per vertex");
  }
  std::vector<std::string> ids;
  std::vector<Rational> q;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw Error(ErrorCode::InvalidArgument, "non-finite coupling");
    ids.push_back(g.vertex(i).id);
    q.emplace_back(values[i]);
  }
  return CouplingVector(std::move(ids), std::move(q), false);
}

CouplingVector CouplingVector::from_values(const MarkedGraph& g, const std::vector<Rational>& values) {
  if (values.size() != g.vertex_count()) {
    throw Error(ErrorCode::MissingCoupling, "expected one coupling per vertex");
  }
  std::vector<std::string> ids;
  for (const auto& v : g.vertices()) ids.push_back(v.id);
  return CouplingVector(std::move(ids), values, true);
}

const Rational& CouplingVector::at(std::string_view id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == id) return values_[i];
  }
  throw Error(ErrorCode::UnknownVertexRef, "no coupling for vertex '" + std::string(id) + "'");
}

std::vector<double> CouplingVector::to_doubles() const {
  std::vector<double> out;
  out.reserve(values_.size());
  for (const auto& q : values_) out.push_back(q.get_d());
  return out;
}

CouplingVector CouplingVector::rationalized(std::int64_t max_denominator) const {
  if (exact_) return *this;
  std::vector<Rational> q;
  for (const auto& v : values_) q.push_back(rationalize(v.get_d(), max_denominator));
  return CouplingVector(ids_, std::move(q), false);
}

// ---------------------------------------------------------------------------

EdgeClassification classify_edges(const MarkedGraph& g) {
  EdgeClassification c;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const auto& e = g.edge(i);
    if (e.is_loop()) {
      (g.type(e.u) == VertexType::Delta ? c.loops_delta : c.loops_delta_prime).push_back(i);
    } else {
      (g.same_type(e) ? c.same_type : c.mixed).push_back(i);
    }
  }
  return c;
}

std::size_t degree(const MarkedGraph& g, std::string_view vertex_id) { return g.degree(g.vertex_index(vertex_id)); }

namespace {

// Edges whose removal disconnects the graph (multi-edges are never bridges).
std::vector<bool> bridges(const MarkedGraph& g) {
  const auto n = g.vertex_count();
  std::vector<bool> is_bridge(g.edge_count(), false);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  struct Frame {
    std::size_t v;
    std::size_t parent_edge;
    std::size_t next;
  };
  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<Frame> stack{{0, none, 0}};
  disc[0] = low[0] = timer++;
  while (!stack.empty()) {
    auto& f = stack.back();
    const auto& inc = g.incident(f.v);
    if (f.next < inc.size()) {
      auto ei = inc[f.next++];
      const auto& e = g.edge(ei);
      if (e.is_loop() || ei == f.parent_edge) continue;
      auto w = e.other(f.v);
      if (disc[w] < 0) {
        disc[w] = low[w] = timer++;
        stack.push_back({w, ei, 0});
      } else {
        low[f.v] = std::min(low[f.v], disc[w]);
      }
    } else {
      auto done = f;
      stack.pop_back();
      if (!stack.empty()) {
        auto p = stack.back().v;
        low[p] = std::min(low[p], low[done.v]);
        if (low[done.v] > disc[p]) is_bridge[done.parent_edge] = true;
      }
    }
  }
  return is_bridge;
}

// BFS spanning tree from root avoiding `skip`; returns parent edge per vertex.
std::vector<std::size_t> spanning_parents(const MarkedGraph& g, std::size_t root, std::size_t skip) {
  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(g.vertex_count(), none);
  std::vector<bool> seen(g.vertex_count(), false);
  std::queue<std::size_t> q;
  q.push(root);
  seen[root] = true;
  while (!q.empty()) {
    auto v = q.front();
    q.pop();
    for (auto ei : g.incident(v)) {
      const auto& e = g.edge(ei);
      if (ei == skip || e.is_loop()) continue;
      auto w = e.other(v);
      if (!seen[w]) {
        seen[w] = true;
        parent[w] = ei;
        q.push(w);
      }
    }
  }
  return parent;
}

}  // namespace

Marking admissible_marking(const MarkedGraph& g, std::string_view root_id) {
  const auto root = g.vertex_index(root_id);
  const std::size_t none = static_cast<std::size_t>(-1);
  Marking m;
  m.edge_of_vertex.assign(g.vertex_count(), none);
  if (g.is_tree()) {
    auto parent = spanning_parents(g, root, none);
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      if (v != root) m.edge_of_vertex[v] = parent[v];
    }
    m.edge_of_vertex[root] = g.incident(root).front();
    m.is_maximal_tree_marking = true;
    return m;
  }
  auto bridge = bridges(g);
  auto cyclic_edge = [&](std::size_t v) -> std::size_t {
    for (auto ei : g.incident(v)) {
      if (g.edge(ei).is_loop() || !bridge[ei]) return ei;
    }
    return none;
  };
  std::size_t anchor = root;
  std::size_t spare = cyclic_edge(root);
  for (std::size_t v = 0; spare == none && v < g.vertex_count(); ++v) {
    anchor = v;
    spare = cyclic_edge(v);
  }
  auto parent = spanning_parents(g, anchor, spare);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (v != anchor) m.edge_of_vertex[v] = parent[v];
  }
  m.edge_of_vertex[anchor] = spare;
  return m;
}

std::vector<std::vector<int>> rational_independence_heuristic(const MarkedGraph& g, int bound) {
  if (bound < 1) throw Error(ErrorCode::InvalidArgument, "bound must be >= 1");
  const auto n = g.edge_count();
  std::vector<std::vector<int>> found;
  std::vector<int> k(n, -bound);
  while (true) {
    auto first = std::find_if(k.begin(), k.end(), [](int x) { return x != 0; });
    if (first != k.end() && *first > 0) {
      int gcd = 0;
      double sum = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        gcd = std::gcd(gcd, std::abs(k[i]));
        sum += k[i] * g.edge(i).length;
        scale += std::abs(k[i]) * g.edge(i).length;
      }
      if (gcd == 1 && std::abs(sum) < 1e-9 * scale) found.push_back(k);
    }
    std::size_t i = 0;
    while (i < n && k[i] == bound) k[i++] = -bound;
    if (i == n) break;
    ++k[i];
  }
  return found;
}

// ---------------------------------------------------------------------------

double parse_length(std::string_view text) {
  if (text.size() > 6 && text.substr(0, 5) == "sqrt(" && text.back() == ')') {
    auto inner = text.substr(5, text.size() - 6);
    auto q = parse_rational(inner);
    if (q < 0) throw Error(ErrorCode::SyntaxError, "negative argument in '" + std::string(text) + "'");
    return std::sqrt(q.get_d());
  }
  const auto q = parse_rational(text);  // validates the literal
  if (text.find('/') != std::string_view::npos) return q.get_d();
  return std::strtod(std::string(text).c_str(), nullptr);  // correctly rounded, unlike mpq_get_d
}

namespace {

std::vector<std::string> split_line(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::istringstream in{std::string(line)};
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  return tokens;
}

[[noreturn]] void syntax(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::SyntaxError, "line " + std::to_string(line) + ": " + what);
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t lineno = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto tokens = split_line(line);
    if (!tokens.empty()) f(lineno, tokens);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

}  // namespace

MarkedGraph parse_graph(std::string_view text) {
  GraphBuilder builder;
  std::set<std::string> vertex_ids;
  for_each_line(text, [&](std::size_t line, const std::vector<std::string>& t) {
    if (t[0] == "vertex") {
      if (t.size() != 3) syntax(line, "expected 'vertex <id> <delta|delta'>'");
      VertexType type;
      if (t[2] == "delta") {
        type = VertexType::Delta;
      } else if (t[2] == "delta'") {
        type = VertexType::DeltaPrime;
      } else {
        syntax(line, "unknown vertex type '" + t[2] + "'");
      }
      vertex_ids.insert(t[1]);
      builder.add_vertex(t[1], type);
    } else if (t[0] == "edge") {
      if (t.size() != 5) syntax(line, "expected 'edge <id> <u> <v> <length>'");
      for (const auto* end : {&t[2], &t[3]}) {
        if (!vertex_ids.count(*end)) {
          throw Error(ErrorCode::UnknownVertexRef,
                      "line " + std::to_string(line) + ": unknown vertex '" + *end + "'");
        }
      }
      double length;
      try {
        length = parse_length(t[4]);
      } catch (const Error&) {
        syntax(line, "bad length '" + t[4] + "'");
      }
      builder.add_edge(t[1], t[2], t[3], length, t[4]);
    } else {
      syntax(line, "unknown directive '" + t[0] + "'");
    }
  });
  return builder.build();
}

std::string serialize_graph(const MarkedGraph& g) {
  std::ostringstream out;
  for (const auto& v : g.vertices()) out << "vertex " << v.id << ' ' << to_string(v.type) << '\n';
  for (const auto& e : g.edges()) {
    out << "edge " << e.id << ' ' << g.vertex(e.u).id << ' ' << g.vertex(e.v).id << ' '
        << (e.length_text.empty() ? format_double(e.length) : e.length_text) << '\n';
  }
  return out.str();
}

CouplingVector parse_couplings(std::string_view text, const MarkedGraph& g) {
  std::map<std::string, Rational> values;
  for_each_line(text, [&](std::size_t line, const std::vector<std::string>& t) {
    if (t[0] != "coupling" || t.size() != 3) syntax(line, "expected 'coupling <vertex-id> <value>'");
    if (values.count(t[1])) {
      throw Error(ErrorCode::DuplicateId, "line " + std::to_string(line) + ": coupling for '" + t[1] + "' repeated");
    }
    try {
      values.emplace(t[1], parse_rational(t[2]));
    } catch (const Error&) {
      syntax(line, "bad coupling value '" + t[2] + "'");
    }
  });
  return CouplingVector(g, values, true);
}

std::string serialize_couplings(const CouplingVector& c) {
  std::ostringstream out;
  for (std::size_t i = 0; i < c.size(); ++i) out << "coupling " << c.ids()[i] << ' ' << to_string(c[i]) << '\n';
  return out.str();
}

}  // namespace qgraph
