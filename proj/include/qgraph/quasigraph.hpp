#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qgraph/graph.hpp"

namespace qgraph {

/// Which endpoint of the removed mixed edge is eliminated. DeltaPrimeToDelta
/// moves the delta-prime endpoint into the delta endpoint; the quasivertex
/// then carries delta-type rows. DeltaToDeltaPrime is the mirror image.
enum class QuasiDirection { DeltaPrimeToDelta, DeltaToDeltaPrime };

enum class QuasiEdgeKind {
  Regular,            // unchanged edge between ordinary vertices or at the kept vertex
  Quasi,              // former edge of the eliminated vertex, now at the quasivertex
  Loop,               // ordinary loop (including loops of the kept vertex)
  QuasiLoopMulti,     // former parallel copy of the removed edge
  QuasiLoopFromLoop,  // former loop at the eliminated vertex
};

struct QuasiVertex {
  std::string id;
  VertexType type = VertexType::Delta;  // row type; for the quasivertex, the target type
};

struct QuasiEdge {
  std::string id;
  std::size_t u = 0;
  std::size_t v = 0;
  double length = 1.0;
  std::string length_text;
  QuasiEdgeKind kind = QuasiEdgeKind::Regular;

  bool is_loop() const noexcept { return u == v; }
};

/// Result of removing exactly one mixed edge. Never produced by iterating the
/// removal.
struct QuasiGraph {
  std::vector<QuasiVertex> vertices;
  std::vector<QuasiEdge> edges;
  std::size_t quasivertex = 0;
  QuasiDirection direction = QuasiDirection::DeltaPrimeToDelta;
  std::string removed_edge;
  std::string kept_vertex;        // source id of the endpoint that survives
  std::string eliminated_vertex;  // source id of the endpoint glued into it
  std::vector<std::optional<std::size_t>> vertex_remap;  // source index -> new index
};

std::string_view to_string(QuasiDirection d);
std::string_view to_string(QuasiEdgeKind k);

}  // namespace qgraph
