#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qgraph/graph.hpp"
#include "qgraph/quasigraph.hpp"

namespace qgraph {

struct MOptions {
  double pole_guard = 1e-6;  // minimum |sin| / |cos| in any denominator
};

struct MMatrixSample {
  double lambda = 0.0;
  std::complex<double> mu;
  Eigen::MatrixXcd entries;
};

/// M-matrix at mu (Im mu >= 0). Rows follow vertex declaration order.
Eigen::MatrixXcd build_M_at_mu(const MarkedGraph& g, std::complex<double> mu, const MOptions& opts = {});

/// Throws ZeroLambda for lambda == 0 and PoleProximity near a pole.
MMatrixSample build_M(const MarkedGraph& g, double lambda, const MOptions& opts = {});

/// (N-1)x(N-1) M-matrix of a quasigraph. Throws UnsupportedQuasigraph when
/// a quasiedge ends at a vertex whose row type differs from the quasivertex's.
Eigen::MatrixXcd build_quasi_M(const QuasiGraph& q, std::complex<double> mu, const MOptions& opts = {});

/// sin(l mu)/mu, finite at mu = 0.
std::complex<double> sin_over_mu(double length, std::complex<double> mu);

std::complex<double> pi_factor_mu(const MarkedGraph& g, std::complex<double> mu);
double pi_factor(const MarkedGraph& g, double lambda);

/// Number of delta-prime vertices joined to a delta-prime vertex (a loop counts).
std::size_t rho(const MarkedGraph& g);

Rational phi(const MarkedGraph& g, const CouplingVector& alpha);
Rational phi_hat(const MarkedGraph& g, const CouplingVector& alpha);

/// One value per vertex; compared as a multiset.
struct SigmaSet {
  std::vector<Rational> values;

  std::vector<Rational> sorted() const;
  bool operator==(const SigmaSet& o) const { return sorted() == o.sorted(); }
};

SigmaSet sigma_set(const MarkedGraph& g, const CouplingVector& alpha);

/// Pi * det(M - B) through the reduced expansion (pole-free).
double secular_value(const MarkedGraph& g, const CouplingVector& alpha, double lambda);

/// Pi * det(M - B) from the numeric M-matrix; subject to the pole guard.
double secular_value_numeric(const MarkedGraph& g, const CouplingVector& alpha, double lambda,
                             const MOptions& opts = {});

}  // namespace qgraph
