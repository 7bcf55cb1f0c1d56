#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qgraph/expansion.hpp"
#include "qgraph/graph.hpp"

namespace qgraph {

enum class Verdict { Isospectral, NotIsospectral, Unsupported };

std::string_view to_string(Verdict v);

struct Witness {
  enum class Kind { WeightClass, Precondition };
  Kind kind = Kind::WeightClass;
  std::optional<TrigMonomial> weight;  // the failing class
  Rational lhs = 0;                    // value for alpha
  Rational rhs = 0;                    // value for alpha2
  std::string message;
};

struct IsoVerdict {
  Verdict verdict = Verdict::Unsupported;
  std::optional<Witness> witness;
  bool used_phi_equality = false;
  bool approximate = false;  // inputs were rationalized from binary floats
  std::vector<std::vector<int>> length_relations;  // small integer relations among lengths, if any
};

/// Exact test: equal numbers of zero couplings at delta' vertices and
/// Phi(alpha) f(alpha) = Phi(alpha2) f(alpha2) for every weight class.
IsoVerdict check_isospectral(const MarkedGraph& g, const CouplingVector& alpha, const CouplingVector& alpha2);
IsoVerdict check_isospectral(const MarkedGraph& g, const SecularExpansion& e, const CouplingVector& alpha,
                             const CouplingVector& alpha2);

/// Same test with the alpha-free parts of each class dropped. Unsupported
/// unless Phi(alpha) = Phi(alpha2).
IsoVerdict check_isospectral_relaxed(const MarkedGraph& g, const CouplingVector& alpha, const CouplingVector& alpha2);
IsoVerdict check_isospectral_relaxed(const MarkedGraph& g, const SecularExpansion& e, const CouplingVector& alpha,
                                     const CouplingVector& alpha2);

struct BalanceSides {
  Rational lhs;
  Rational rhs;
  bool equal() const { return lhs == rhs; }
};

/// alpha_v - sum over neighbours w of nu(w)/alpha_w, for both vectors. nu(w)
/// is the number of edges joining v and w.
BalanceSides balancing_residual(const MarkedGraph& g, std::string_view vertex_id, const CouplingVector& alpha,
                                const CouplingVector& alpha2);

bool sigma_necessary(const MarkedGraph& g, const CouplingVector& alpha, const CouplingVector& alpha2);

enum class A3Variant { DeltaDeltaPrimeDelta, DeltaPrimeDeltaDeltaPrime };

/// The three-vertex chain V1 - V2 - V3 with edges e1, e2 of the given lengths.
MarkedGraph a3_graph(A3Variant variant, double l1 = 1.0, double l2 = 1.4142135623730951);

/// The isospectral pair (a, 2/a, 0) and (0, -2/a, -a). Both variants share
/// it. Throws ZeroParameter for a = 0.
std::pair<CouplingVector, CouplingVector> a3_family(const Rational& a, A3Variant variant);

enum class VertexClass00 { Class00, Class0Bar0, ClassBar00, ClassBar0Bar0 };

std::string_view to_string(VertexClass00 c);

/// Class00: both zero; Class0Bar0: alpha zero only; ClassBar00: alpha2 zero
/// only; ClassBar0Bar0: neither zero.
std::map<std::string, VertexClass00> classify_vertices(const MarkedGraph& g, const CouplingVector& alpha,
                                                       const CouplingVector& alpha2);

struct ReportEntry {
  std::string tag;
  std::string conclusion;
};

struct UniquenessReport {
  std::vector<ReportEntry> entries;
  std::vector<std::string> caveats;
  std::vector<std::string> cleaning_candidates;  // vertices of valence 2 without loops
  std::vector<std::string> trimmings;            // admissible trimmings, "edge:<id>" or "vertex:<id>"
};

/// Theorems whose hypotheses hold for the shape of `g`, with the conclusions
/// they license. Never inspects couplings.
UniquenessReport uniqueness_report(const MarkedGraph& g);

struct SearchConfig {
  std::size_t starts = 48;  // multistarts per zero pattern
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double residual_tol = 1e-10;
  std::int64_t max_denominator = 1000000;
};

struct IsoCandidate {
  CouplingVector alpha;
  double residual = 0.0;        // max over classes of |Phi f(alpha) - Phi f(candidate)| / scale
  bool exact_verified = false;  // check_isospectral passes after rationalization
};

/// Exploratory multistart Levenberg-Marquardt search for couplings with the
/// same Phi f values as `alpha`. Not exhaustive. The first candidate is
/// always `alpha`.
std::vector<IsoCandidate> find_isospectral_numeric(const MarkedGraph& g, const CouplingVector& alpha,
                                                   const SearchConfig& cfg = {});
std::vector<IsoCandidate> find_isospectral_numeric(const MarkedGraph& g, const SecularExpansion& e,
                                                   const CouplingVector& alpha, const SearchConfig& cfg = {});

}  // namespace qgraph
