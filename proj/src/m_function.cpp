#include "qgraph/m_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qgraph/error.hpp"
#include "qgraph/expansion.hpp"
#include "qgraph/trig.hpp"

namespace qgraph {

namespace {

using C = std::complex<double>;

void check_denominator(C d, const std::string& edge, const MOptions& opts) {
  if (std::abs(d) < opts.pole_guard) {
    throw Error(ErrorCode::PoleProximity, "M has a pole near this lambda (edge " + edge + ")");
  }
}

C cot(C x) { return std::cos(x) / std::sin(x); }
C csc(C x) { return 1.0 / std::sin(x); }
C tan(C x) { return std::sin(x) / std::cos(x); }
C sec(C x) { return 1.0 / std::cos(x); }

}  // namespace

Eigen::MatrixXcd build_M_at_mu(const MarkedGraph& g, C mu, const MOptions& opts) {
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& e : g.edges()) {
    const C x = mu * e.length;
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    const bool du = g.type(e.u) == VertexType::Delta;
    if (e.is_loop()) {
      const C h = x / 2.0;
      if (du) {
        check_denominator(std::cos(h), e.id, opts);
        m(u, u) += 2.0 * mu * tan(h);
      } else {
        check_denominator(std::sin(h), e.id, opts);
        m(u, u) -= 2.0 / mu * cot(h);
      }
      continue;
    }
    const bool dv = g.type(e.v) == VertexType::Delta;
    if (du == dv) {
      check_denominator(std::sin(x), e.id, opts);
      const C scale = du ? mu : 1.0 / mu;
      m(u, u) -= scale * cot(x);
      m(v, v) -= scale * cot(x);
      const C off = du ? mu * csc(x) : -csc(x) / mu;
      m(u, v) += off;
      m(v, u) += off;
    } else {
      check_denominator(std::cos(x), e.id, opts);
      m(u, u) += (du ? mu : 1.0 / mu) * tan(x);
      m(v, v) += (dv ? mu : 1.0 / mu) * tan(x);
      m(u, v) -= sec(x);
      m(v, u) -= sec(x);
    }
  }
  return m;
}

MMatrixSample build_M(const MarkedGraph& g, double lambda, const MOptions& opts) {
  if (lambda == 0.0) throw Error(ErrorCode::ZeroLambda, "M is not defined at lambda = 0");
  const C mu = mu_of(lambda);
  return {lambda, mu, build_M_at_mu(g, mu, opts)};
}

Eigen::MatrixXcd build_quasi_M(const QuasiGraph& q, C mu, const MOptions& opts) {
  const auto n = static_cast<Eigen::Index>(q.vertices.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  auto is_delta = [&](std::size_t i) { return q.vertices[i].type == VertexType::Delta; };
  const double quarter = std::numbers::pi / 4.0;
  for (const auto& e : q.edges) {
    const C x = mu * e.length;
    const C h = x / 2.0;
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    const bool du = is_delta(e.u);
    const C row_scale = du ? mu : 1.0 / mu;
    switch (e.kind) {
      case QuasiEdgeKind::Loop:
        if (du) {
          check_denominator(std::cos(h), e.id, opts);
          m(u, u) += 2.0 * mu * tan(h);
        } else {
          check_denominator(std::sin(h), e.id, opts);
          m(u, u) -= 2.0 / mu * cot(h);
        }
        break;
      case QuasiEdgeKind::QuasiLoopMulti:
        check_denominator(std::sin(quarter + h), e.id, opts);
        m(u, u) -= 2.0 * row_scale * cot(quarter + h);
        break;
      case QuasiEdgeKind::QuasiLoopFromLoop:
        if (du) {
          check_denominator(std::sin(h), e.id, opts);
          m(u, u) -= 2.0 * mu * cot(h);
        } else {
          check_denominator(std::cos(h), e.id, opts);
          m(u, u) += 2.0 / mu * tan(h);
        }
        break;
      case QuasiEdgeKind::Quasi: {
        // a quasiedge joins two rows of the same type: -mu sec between delta
        // rows, -(1/mu) sec between delta' rows
        if (du != is_delta(e.v)) {
          throw Error(ErrorCode::UnsupportedQuasigraph,
                      "quasiedge " + e.id + " does not join two rows of the quasivertex's type");
        }
        check_denominator(std::cos(x), e.id, opts);
        m(u, u) += row_scale * tan(x);
        m(v, v) += row_scale * tan(x);
        m(u, v) -= row_scale * sec(x);
        m(v, u) -= row_scale * sec(x);
        break;
      }
      case QuasiEdgeKind::Regular: {
        const bool dv = is_delta(e.v);
        if (du == dv) {
          check_denominator(std::sin(x), e.id, opts);
          m(u, u) -= row_scale * cot(x);
          m(v, v) -= row_scale * cot(x);
          const C off = du ? mu * csc(x) : -csc(x) / mu;
          m(u, v) += off;
          m(v, u) += off;
        } else {
          check_denominator(std::cos(x), e.id, opts);
          m(u, u) += (du ? mu : 1.0 / mu) * tan(x);
          m(v, v) += (dv ? mu : 1.0 / mu) * tan(x);
          m(u, v) -= sec(x);
          m(v, u) -= sec(x);
        }
        break;
      }
    }
  }
  return m;
}

C sin_over_mu(double length, C mu) {
  const C x = mu * length;
  if (std::abs(x) < 1e-4) {
    const C x2 = x * x;
    return length * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0)));
  }
  return std::sin(x) / mu;
}

C pi_factor_mu(const MarkedGraph& g, C mu) {
  C p = ipow(mu, 2 * static_cast<int>(rho(g)));
  for (const auto& e : g.edges()) {
    const bool du = g.type(e.u) == VertexType::Delta;
    if (e.is_loop()) {
      p *= du ? std::cos(mu * e.length / 2.0) : sin_over_mu(e.length / 2.0, mu);
    } else if (g.same_type(e)) {
      p *= sin_over_mu(e.length, mu);
    } else {
      p *= std::cos(mu * e.length);
    }
  }
  return p;
}

double pi_factor(const MarkedGraph& g, double lambda) { return pi_factor_mu(g, mu_of(lambda)).real(); }

std::size_t rho(const MarkedGraph& g) {
  std::size_t count = 0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.type(v) != VertexType::DeltaPrime) continue;
    const auto& inc = g.incident(v);
    if (std::any_of(inc.begin(), inc.end(),
                    [&](std::size_t e) { return g.type(g.edge(e).other(v)) == VertexType::DeltaPrime; })) {
      ++count;
    }
  }
  return count;
}

namespace {

Rational degree_ratio_product(const MarkedGraph& g, const CouplingVector& alpha, VertexType t) {
  Rational p = 1;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.type(v) != t || alpha[v] == 0) continue;
    p *= Rational(static_cast<long>(g.degree(v))) / alpha[v];
  }
  return p;
}

}  // namespace

Rational phi(const MarkedGraph& g, const CouplingVector& alpha) {
  return degree_ratio_product(g, alpha, VertexType::DeltaPrime);
}

Rational phi_hat(const MarkedGraph& g, const CouplingVector& alpha) {
  return degree_ratio_product(g, alpha, VertexType::Delta);
}

std::vector<Rational> SigmaSet::sorted() const {
  auto s = values;
  std::sort(s.begin(), s.end());
  return s;
}

SigmaSet sigma_set(const MarkedGraph& g, const CouplingVector& alpha) {
  SigmaSet s;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const Rational deg(static_cast<long>(g.degree(v)));
    if (g.type(v) == VertexType::Delta) {
      s.values.push_back(-alpha[v] / deg);
    } else if (alpha[v] != 0) {
      s.values.push_back(deg / alpha[v]);
    } else {
      s.values.push_back(0);
    }
  }
  return s;
}

double secular_value(const MarkedGraph& g, const CouplingVector& alpha, double lambda) {
  return SecularFunction(g, expand_subgraphs(g), alpha)(lambda);
}

double secular_value_numeric(const MarkedGraph& g, const CouplingVector& alpha, double lambda,
                             const MOptions& opts) {
  const auto s = build_M(g, lambda, opts);
  Eigen::MatrixXcd mb = s.entries;
  for (Eigen::Index i = 0; i < mb.rows(); ++i) mb(i, i) -= alpha[static_cast<std::size_t>(i)].get_d();
  const C z = mb.determinant() * pi_factor_mu(g, s.mu);
  if (std::abs(z.imag()) > 1e-9 * (1.0 + std::abs(z.real()))) {
    throw Error(ErrorCode::NonRealEvaluation, "imaginary residue " + std::to_string(z.imag()));
  }
  return z.real();
}

}  // namespace qgraph
