#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/quasigraph.hpp"

namespace qgraph {

enum class CouplingRule { Identity, Sum };

std::string_view to_string(CouplingRule r);

/// How the coupling of one vertex of the reduced graph is formed from the
/// couplings of the source graph.
struct CouplingSource {
  std::string vertex;                // id in the reduced graph
  CouplingRule rule = CouplingRule::Identity;
  std::vector<std::string> sources;  // ids in the source graph
};

struct ReductionResult {
  MarkedGraph graph;
  std::vector<CouplingSource> coupling_map;           // one entry per new vertex, in vertex order
  std::vector<std::string> dropped;                   // source vertices whose coupling is discarded
  std::vector<std::optional<std::size_t>> vertex_remap;  // source index -> new index

  /// Couplings on the reduced graph. Exactness is inherited.
  CouplingVector apply(const CouplingVector& alpha) const;
};

/// Merges the endpoints of a same-type edge; the other parallel edges
/// become loops at the merged vertex "u+v".
ReductionResult trim_same_type_edge(const MarkedGraph& g, std::string_view edge_id);

/// Removes a loop-carrying vertex that is a boundary vertex (one non-loop
/// edge) or lies on a cycle, together with all its edges.
ReductionResult trim_loop_vertex(const MarkedGraph& g, std::string_view vertex_id);

/// Replaces the two edges at a valence-2 vertex by one edge of summed
/// length. The caller is responsible for the both-couplings-zero condition.
ReductionResult clean_vertex(const MarkedGraph& g, std::string_view vertex_id);

QuasiGraph quasi_remove_mixed_edge(const MarkedGraph& g, std::string_view edge_id, QuasiDirection direction);

struct Thm00Result {
  ReductionResult reduction;
  CouplingVector alpha;
  CouplingVector alpha2;
  QuasiGraph quasigraph;  // before the quasivertex is regularized
};

/// Removes a mixed edge with a doubly-zero endpoint. The delta' endpoint is
/// tried first unless `direction` pins the case.
Thm00Result thm00_reduce(const MarkedGraph& g, std::string_view edge_id, const CouplingVector& alpha,
                         const CouplingVector& alpha2, std::optional<QuasiDirection> direction = std::nullopt);

enum class TrimmingKind { SameTypeEdge, LoopVertex };

struct Trimming {
  TrimmingKind kind;
  std::string target;  // edge id or vertex id
};

/// Every trimming the two trim operations accept on `g`.
std::vector<Trimming> admissible_trimmings(const MarkedGraph& g);
ReductionResult apply_trimming(const MarkedGraph& g, const Trimming& t);

}  // namespace qgraph
