#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/trig.hpp"

namespace qgraph {

/// A loop of the modified graph. Alpha-loops carry an empty weight with sign
/// -1 and contribute the variable of their vertex.
struct LoopWeight {
  TrigMonomial weight;
  Rational sign = 1;
  std::string source;  // edge id, or empty for the alpha-loop
  bool alpha_loop = false;
};

/// Weight of both directed copies of a non-loop edge.
struct PairWeight {
  std::size_t u = 0;
  std::size_t v = 0;
  TrigMonomial weight;
  Rational sign = 1;
  std::string edge;
};

struct ModifiedGraph {
  std::vector<std::string> vertex_ids;
  std::vector<std::vector<LoopWeight>> loops;  // per vertex
  std::vector<PairWeight> pairs;
};

ModifiedGraph modify_graph(const MarkedGraph& g);

struct WeightClass {
  TrigMonomial weight;
  AlphaPolynomial f;
  Rational c_gamma;
  AlphaPolynomial g_gamma;
};

/// det(M - B) as a reduced sum over square-free weight classes.
class SecularExpansion {
 public:
  SecularExpansion() = default;
  /// Throws SquareFreeViolation if a monomial of `det` is not square-free.
  explicit SecularExpansion(TrigSum det);

  const TrigSum& determinant() const noexcept { return det_; }
  std::vector<WeightClass> classes() const;
  /// f_gamma for a weight, zero if the class is absent.
  AlphaPolynomial coefficient(const TrigMonomial& w) const;

  bool operator==(const SecularExpansion& o) const { return det_ == o.det_; }

 private:
  TrigSum det_;
};

SecularExpansion expand_subgraphs(const ModifiedGraph& mg);
inline SecularExpansion expand_subgraphs(const MarkedGraph& g) { return expand_subgraphs(modify_graph(g)); }

/// Entries of the symbolic matrix M - B, with alpha_v appearing as a variable.
std::vector<std::vector<TrigSum>> symbolic_m_minus_b(const MarkedGraph& g);

/// Leibniz expansion of the symbolic M - B. Throws SizeCap above `cap` vertices.
SecularExpansion expand_permutation(const MarkedGraph& g, std::size_t cap = 9);

/// Pole-free evaluator of Pi(lambda) * det(M(lambda) - B) for a fixed
/// coupling vector. Each class is multiplied out against Pi edge by edge, so
/// no reciprocal trigonometric function is evaluated for regular graphs.
class SecularFunction {
 public:
  SecularFunction(const MarkedGraph& g, const SecularExpansion& e, const CouplingVector& alpha);

  /// Complex value at mu; for real lambda the result is real up to rounding.
  std::complex<double> at_mu(std::complex<double> mu, double* magnitude = nullptr) const;
  /// Throws NonRealEvaluation if the imaginary residue is not negligible.
  double operator()(double lambda) const;

 private:
  enum class Part { Sin, Cos, SinOverMu, One, Reciprocal };
  struct Factor {
    Part part;
    double length;  // argument is mu * length
    TrigKind kind = TrigKind::Cot;
    int exp = 1;
  };
  struct Term {
    double coeff;
    int mu_power;
    std::vector<Factor> factors;
  };
  std::vector<Term> terms_;
};

/// Sum of f_gamma(alpha) w_gamma(lambda); with_pi multiplies by Pi(lambda)
/// using the pole-free evaluator.
double eval_expansion(const SecularExpansion& e, const MarkedGraph& g, const CouplingVector& alpha, double lambda,
                      bool with_pi = false);

}  // namespace qgraph
