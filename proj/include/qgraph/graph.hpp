#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qgraph/rational.hpp"

namespace qgraph {

enum class VertexType { Delta, DeltaPrime };

std::string_view to_string(VertexType t);

struct Vertex {
  std::string id;
  VertexType type = VertexType::Delta;
};

/// An edge [0, length] running from vertex `u` (x = 0) to vertex `v`
/// (x = length). `u == v` is a loop. The edge id doubles as the formal
/// length symbol used by the symbolic layer.
struct Edge {
  std::string id;
  std::size_t u = 0;
  std::size_t v = 0;
  double length = 1.0;
  std::string length_text;  // literal as written in the graph file

  bool is_loop() const noexcept { return u == v; }
  std::size_t other(std::size_t w) const noexcept { return w == u ? v : u; }
};

/// Connected finite compact metric graph with every vertex marked delta or
/// delta-prime. Immutable after construction; the constructor validates.
class MarkedGraph {
 public:
  MarkedGraph(std::vector<Vertex> vertices, std::vector<Edge> edges);

  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const Vertex& vertex(std::size_t i) const { return vertices_.at(i); }
  const Edge& edge(std::size_t i) const { return edges_.at(i); }
  VertexType type(std::size_t i) const { return vertices_.at(i).type; }

  std::size_t vertex_index(std::string_view id) const;  // UnknownVertexRef
  std::size_t edge_index(std::string_view id) const;    // UnknownEdge

  /// Number of edge endpoints at the vertex; a loop contributes 2.
  std::size_t degree(std::size_t v) const;
  /// Edge indices touching v, each listed once (loops included).
  const std::vector<std::size_t>& incident(std::size_t v) const { return incident_.at(v); }

  bool same_type(const Edge& e) const { return type(e.u) == type(e.v); }
  bool has_loops() const;
  /// Connected, no loops, no multi-edges, |E| = N - 1.
  bool is_tree() const;
  double total_length() const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
};

/// Builds a MarkedGraph from id-based edge descriptions.
class GraphBuilder {
 public:
  GraphBuilder& add_vertex(std::string id, VertexType type);
  GraphBuilder& add_edge(std::string id, std::string_view u, std::string_view v, double length,
                         std::string length_text = {});
  MarkedGraph build() const;

 private:
  struct PendingEdge {
    std::string id, u, v;
    double length;
    std::string text;
  };
  std::vector<Vertex> vertices_;
  std::vector<PendingEdge> edges_;
};

/// One coupling constant per vertex, in the graph's vertex order. Values are
/// stored as rationals; vectors built from binary floats are flagged inexact.
class CouplingVector {
 public:
  CouplingVector() = default;
  CouplingVector(const MarkedGraph& g, const std::map<std::string, Rational>& by_id, bool exact = true);
  CouplingVector(std::vector<std::string> ids, std::vector<Rational> values, bool exact = true);

  static CouplingVector from_doubles(const MarkedGraph& g, const std::vector<double>& values);
  static CouplingVector from_values(const MarkedGraph& g, const std::vector<Rational>& values);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<Rational>& values() const noexcept { return values_; }
  const Rational& operator[](std::size_t i) const { return values_.at(i); }
  const Rational& at(std::string_view id) const;
  bool is_exact() const noexcept { return exact_; }
  std::vector<double> to_doubles() const;

  /// Inexact vectors are snapped to the nearest rational with bounded
  /// denominator; exact vectors are returned unchanged.
  CouplingVector rationalized(std::int64_t max_denominator = 1000000) const;

  bool operator==(const CouplingVector& o) const { return ids_ == o.ids_ && values_ == o.values_; }

 private:
  std::vector<std::string> ids_;
  std::vector<Rational> values_;
  bool exact_ = true;
};

struct EdgeClassification {
  std::vector<std::size_t> same_type;          // non-loop edges, endpoints of equal type
  std::vector<std::size_t> mixed;              // non-loop edges, endpoints of different type
  std::vector<std::size_t> loops_delta;        // loops at delta vertices
  std::vector<std::size_t> loops_delta_prime;  // loops at delta-prime vertices
};

EdgeClassification classify_edges(const MarkedGraph& g);

std::size_t degree(const MarkedGraph& g, std::string_view vertex_id);

struct Marking {
  std::vector<std::size_t> edge_of_vertex;  // edge index marking each vertex
  bool is_maximal_tree_marking = false;
};

/// Marks each vertex with an incident edge so that no non-loop edge marks
/// both of its endpoints. On trees this is impossible; the maximal marking is
/// returned instead, with the edge from `root` to its first neighbour doubly
/// marked.
Marking admissible_marking(const MarkedGraph& g, std::string_view root);

/// Small integer relations sum k_i l_i ~ 0 among edge lengths with
/// |k_i| <= bound. Each relation is reported once, primitive, with its first
/// nonzero entry positive. An empty result is not a proof of independence.
std::vector<std::vector<int>> rational_independence_heuristic(const MarkedGraph& g, int bound);

// Text formats.
MarkedGraph parse_graph(std::string_view text);
std::string serialize_graph(const MarkedGraph& g);
CouplingVector parse_couplings(std::string_view text, const MarkedGraph& g);
std::string serialize_couplings(const CouplingVector& c);

/// Accepts a decimal, `p/q`, or `sqrt(n)` literal.
double parse_length(std::string_view text);

}  // namespace qgraph
