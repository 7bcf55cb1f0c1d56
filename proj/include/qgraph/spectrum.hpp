#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "qgraph/expansion.hpp"
#include "qgraph/graph.hpp"

namespace qgraph {

enum class SpectrumMethod { Secular, EdgeBasis };

enum class RootFlag { None, Cluster, LoopInvisible, ZeroMode };

std::string_view to_string(SpectrumMethod m);
std::string_view to_string(RootFlag f);

struct SpectralRoot {
  double lambda = 0.0;
  int multiplicity = 1;
  RootFlag flag = RootFlag::None;
};

struct SpectrumWindow {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  SpectrumMethod method = SpectrumMethod::Secular;
  std::vector<SpectralRoot> roots;  // ascending

  /// Roots repeated by multiplicity; flagged roots are skipped unless asked for.
  std::vector<double> expanded(bool include_flagged = false) const;
};

struct SpectrumOptions {
  double mu_step = 0.0;          // 0: pi / (40 * total length)
  double rel_tol = 1e-12;        // bisection stops at this relative bracket width
  double zero_guard = 1e-8;      // |lambda| below this is not scanned
  double cluster_radius = 1e-7;  // roots closer than this (relative) are merged
  std::size_t negative_samples = 0;  // 0: chosen from the window
  unsigned threads = 1;
};

SpectrumWindow eigenvalues_secular(const MarkedGraph& g, const CouplingVector& alpha, double lambda_min,
                                   double lambda_max, const SpectrumOptions& opts = {});
SpectrumWindow eigenvalues_secular(const MarkedGraph& g, const SecularExpansion& e, const CouplingVector& alpha,
                                   double lambda_min, double lambda_max, const SpectrumOptions& opts = {});

/// Roots of the determinant of the edge-wise matching system. Includes
/// eigenvalues carried by loops that the M-matrix cannot see (flagged) and a
/// zero mode found by a rank test at lambda = 0.
SpectrumWindow eigenvalues_edge_basis(const MarkedGraph& g, const CouplingVector& alpha, double lambda_min,
                                      double lambda_max, const SpectrumOptions& opts = {});

/// Row-scaled determinant of the 2|E| x 2|E| matching system at lambda.
double edge_basis_determinant(const MarkedGraph& g, const CouplingVector& alpha, double lambda);

/// Dimension of the kernel of the matching system at lambda = 0.
std::size_t zero_mode_multiplicity(const MarkedGraph& g, const CouplingVector& alpha);

/// Heuristic lower bound B with all eigenvalues >= -B^2.
double negative_spectrum_bound(const MarkedGraph& g, const CouplingVector& alpha);

struct SpectrumComparison {
  bool equal = true;
  double max_deviation = 0.0;
  std::optional<double> first_mismatch;
};

/// Multiset comparison by greedy nearest pairing. Both windows must cover the
/// same interval (WindowMismatch otherwise); the methods may differ. Flagged
/// roots take part like any other root.
SpectrumComparison compare_spectra(const SpectrumWindow& a, const SpectrumWindow& b, double tol);

}  // namespace qgraph
