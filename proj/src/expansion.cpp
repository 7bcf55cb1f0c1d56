#include "qgraph/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "qgraph/error.hpp"
#include "qgraph/m_function.hpp"

namespace qgraph {

namespace {

// Product of monomials without any Pythagorean rewriting.
TrigMonomial raw_mul(const TrigMonomial& a, const TrigMonomial& b) {
  TrigMonomial r;
  r.mu_power = a.mu_power + b.mu_power;
  r.factors.reserve(a.factors.size() + b.factors.size());
  auto i = a.factors.begin();
  auto j = b.factors.begin();
  auto key_less = [](const TrigFactor& x, const TrigFactor& y) {
    return std::tie(x.edge, x.kind) < std::tie(y.edge, y.kind);
  };
  while (i != a.factors.end() || j != b.factors.end()) {
    if (j == b.factors.end() || (i != a.factors.end() && key_less(*i, *j))) {
      r.factors.push_back(*i++);
    } else if (i == a.factors.end() || key_less(*j, *i)) {
      r.factors.push_back(*j++);
    } else {
      TrigFactor f = *i++;
      f.exp += (j++)->exp;
      r.factors.push_back(std::move(f));
    }
  }
  return r;
}

bool is_delta(const MarkedGraph& g, std::size_t v) { return g.type(v) == VertexType::Delta; }

}  // namespace

ModifiedGraph modify_graph(const MarkedGraph& g) {
  ModifiedGraph mg;
  const std::size_t n = g.vertex_count();
  mg.loops.resize(n);
  for (const auto& v : g.vertices()) mg.vertex_ids.push_back(v.id);

  for (const auto& e : g.edges()) {
    const bool du = is_delta(g, e.u);
    if (e.is_loop()) {
      if (du) {
        mg.loops[e.u].push_back({TrigMonomial::of(e.id, TrigKind::TanHalf, 1), 2, e.id, false});
      } else {
        mg.loops[e.u].push_back({TrigMonomial::of(e.id, TrigKind::CotHalf, -1), -2, e.id, false});
      }
      continue;
    }
    const bool dv = is_delta(g, e.v);
    if (du == dv) {
      const int p = du ? 1 : -1;
      mg.loops[e.u].push_back({TrigMonomial::of(e.id, TrigKind::Cot, p), -1, e.id, false});
      mg.loops[e.v].push_back({TrigMonomial::of(e.id, TrigKind::Cot, p), -1, e.id, false});
      // delta-delta: mu csc; delta'-delta': -(1/mu) csc
      mg.pairs.push_back({e.u, e.v, TrigMonomial::of(e.id, TrigKind::Csc, p), du ? 1 : -1, e.id});
    } else {
      mg.loops[e.u].push_back({TrigMonomial::of(e.id, TrigKind::Tan, du ? 1 : -1), 1, e.id, false});
      mg.loops[e.v].push_back({TrigMonomial::of(e.id, TrigKind::Tan, dv ? 1 : -1), 1, e.id, false});
      mg.pairs.push_back({e.u, e.v, TrigMonomial::of(e.id, TrigKind::Sec, 0), -1, e.id});
    }
  }
  for (std::size_t v = 0; v < n; ++v) mg.loops[v].push_back({TrigMonomial{}, -1, {}, true});
  return mg;
}

SecularExpansion::SecularExpansion(TrigSum det) : det_(std::move(det)) {
  for (const auto& [m, c] : det_.terms()) {
    if (!m.is_square_free()) {
      throw Error(ErrorCode::SquareFreeViolation, "weight " + m.to_string() + " is not square-free");
    }
  }
}

std::vector<WeightClass> SecularExpansion::classes() const {
  std::vector<WeightClass> out;
  out.reserve(det_.size());
  for (const auto& [m, f] : det_.terms()) out.push_back({m, f, f.constant_term(), f.without_constant()});
  return out;
}

AlphaPolynomial SecularExpansion::coefficient(const TrigMonomial& w) const {
  const auto it = det_.terms().find(w);
  return it == det_.terms().end() ? AlphaPolynomial{} : it->second;
}

namespace {

struct DirectedArc {
  std::size_t to;
  const PairWeight* pair;
};

class CoverEnumerator {
 public:
  explicit CoverEnumerator(const ModifiedGraph& mg) : mg_(mg), covered_(mg.vertex_ids.size(), false) {
    arcs_.resize(mg.vertex_ids.size());
    for (const auto& p : mg.pairs) {
      arcs_[p.u].push_back({p.v, &p});
      arcs_[p.v].push_back({p.u, &p});
    }
  }

  TrigSum run() {
    next(TrigMonomial{}, 1, {});
    return std::move(result_);
  }

 private:
  void next(const TrigMonomial& w, const Rational& sign, const AlphaPolynomial::Key& vars) {
    const auto it = std::find(covered_.begin(), covered_.end(), false);
    if (it == covered_.end()) {
      AlphaPolynomial c;
      auto sorted = vars;
      std::sort(sorted.begin(), sorted.end());
      c.add_term(sorted, sign);
      result_.add(w, c);
      return;
    }
    const auto s = static_cast<std::size_t>(it - covered_.begin());
    covered_[s] = true;
    for (const auto& loop : mg_.loops[s]) {
      if (loop.alpha_loop) {
        auto v2 = vars;
        v2.push_back(mg_.vertex_ids[s]);
        next(w, -sign, v2);
      } else {
        next(raw_mul(w, loop.weight), sign * loop.sign, vars);
      }
    }
    path_ = {s};
    extend(s, s, w, sign, vars);
    covered_[s] = false;
  }

  // Grows a directed cycle starting at `start`; closes it whenever an arc
  // returns to `start` after at least one step.
  void extend(std::size_t start, std::size_t cur, const TrigMonomial& w, const Rational& sign,
              const AlphaPolynomial::Key& vars) {
    for (const auto& arc : arcs_[cur]) {
      const TrigMonomial w2 = raw_mul(w, arc.pair->weight);
      const Rational s2 = sign * arc.pair->sign;
      if (arc.to == start) {
        if (path_.size() < 2) continue;
        const bool even = path_.size() % 2 == 0;
        const auto saved = path_;
        next(w2, even ? Rational(-s2) : s2, vars);
        path_ = saved;
        continue;
      }
      if (covered_[arc.to]) continue;
      covered_[arc.to] = true;
      path_.push_back(arc.to);
      extend(start, arc.to, w2, s2, vars);
      path_.pop_back();
      covered_[arc.to] = false;
    }
  }

  const ModifiedGraph& mg_;
  std::vector<bool> covered_;
  std::vector<std::vector<DirectedArc>> arcs_;
  std::vector<std::size_t> path_;
  TrigSum result_;
};

}  // namespace

SecularExpansion expand_subgraphs(const ModifiedGraph& mg) { return SecularExpansion(CoverEnumerator(mg).run()); }

std::vector<std::vector<TrigSum>> symbolic_m_minus_b(const MarkedGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<TrigSum>> m(n, std::vector<TrigSum>(n));
  auto term = [](const std::string& edge, TrigKind k, int mu, const Rational& c) {
    return TrigSum(TrigMonomial::of(edge, k, mu), AlphaPolynomial::constant(c));
  };
  for (std::size_t v = 0; v < n; ++v) {
    m[v][v] -= TrigSum(TrigMonomial{}, AlphaPolynomial::variable(g.vertex(v).id));
  }
  for (const auto& e : g.edges()) {
    const bool du = is_delta(g, e.u);
    if (e.is_loop()) {
      m[e.u][e.u] += du ? term(e.id, TrigKind::TanHalf, 1, 2) : term(e.id, TrigKind::CotHalf, -1, -2);
      continue;
    }
    const bool dv = is_delta(g, e.v);
    const int pu = du ? 1 : -1;
    const int pv = dv ? 1 : -1;
    if (du == dv) {
      m[e.u][e.u] += term(e.id, TrigKind::Cot, pu, -1);
      m[e.v][e.v] += term(e.id, TrigKind::Cot, pv, -1);
      const auto off = du ? term(e.id, TrigKind::Csc, 1, 1) : term(e.id, TrigKind::Csc, -1, -1);
      m[e.u][e.v] += off;
      m[e.v][e.u] += off;
    } else {
      m[e.u][e.u] += term(e.id, TrigKind::Tan, pu, 1);
      m[e.v][e.v] += term(e.id, TrigKind::Tan, pv, 1);
      const auto off = term(e.id, TrigKind::Sec, 0, -1);
      m[e.u][e.v] += off;
      m[e.v][e.u] += off;
    }
  }
  return m;
}

namespace {

void leibniz(const std::vector<std::vector<TrigSum>>& m, std::size_t row, std::vector<bool>& used, bool odd,
             const TrigSum& partial, TrigSum& out) {
  const std::size_t n = m.size();
  if (row == n) {
    out += odd ? -partial : partial;
    return;
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (used[c] || m[row][c].is_zero()) continue;
    std::size_t inversions = 0;
    for (std::size_t k = c + 1; k < n; ++k) inversions += used[k] ? 1 : 0;
    used[c] = true;
    leibniz(m, row + 1, used, odd != (inversions % 2 == 1), partial * m[row][c], out);
    used[c] = false;
  }
}

}  // namespace

SecularExpansion expand_permutation(const MarkedGraph& g, std::size_t cap) {
  if (g.vertex_count() > cap) {
    throw Error(ErrorCode::SizeCap, std::to_string(g.vertex_count()) + " vertices exceed the permutation cap of " +
                                        std::to_string(cap));
  }
  const auto m = symbolic_m_minus_b(g);
  std::vector<bool> used(m.size(), false);
  TrigSum det;
  leibniz(m, 0, used, false, TrigSum::constant(1), det);
  return SecularExpansion(std::move(det));
}

SecularFunction::SecularFunction(const MarkedGraph& g, const SecularExpansion& e, const CouplingVector& alpha) {
  const int base_power = 2 * static_cast<int>(rho(g));
  for (const auto& [mono, poly] : e.determinant().terms()) {
    const double coeff = poly.evaluate(alpha).get_d();
    if (coeff == 0.0) continue;
    Term t{coeff, base_power + mono.mu_power, {}};
    std::vector<bool> merged(mono.factors.size(), false);
    for (const auto& edge : g.edges()) {
      const bool du = is_delta(g, edge.u);
      Factor base;
      if (edge.is_loop()) {
        base = du ? Factor{Part::Cos, edge.length / 2.0} : Factor{Part::Sin, edge.length / 2.0};
        if (!du) --t.mu_power;
      } else if (g.same_type(edge)) {
        base = {Part::Sin, edge.length};
        --t.mu_power;
      } else {
        base = {Part::Cos, edge.length};
      }
      for (std::size_t i = 0; i < mono.factors.size(); ++i) {
        const auto& f = mono.factors[i];
        if (merged[i] || f.edge != edge.id || f.exp != 1) continue;
        const bool half = edge.is_loop();
        const TrigKind k = f.kind;
        Part np = base.part;
        if (base.part == Part::Sin && !half && k == TrigKind::Cot) np = Part::Cos;
        else if (base.part == Part::Sin && !half && k == TrigKind::Csc) np = Part::One;
        else if (base.part == Part::Cos && !half && k == TrigKind::Tan) np = Part::Sin;
        else if (base.part == Part::Cos && !half && k == TrigKind::Sec) np = Part::One;
        else if (base.part == Part::Cos && half && k == TrigKind::TanHalf) np = Part::Sin;
        else if (base.part == Part::Sin && half && k == TrigKind::CotHalf) np = Part::Cos;
        else continue;
        base.part = np;
        merged[i] = true;
        break;
      }
      if (base.part != Part::One) t.factors.push_back(base);
    }
    for (std::size_t i = 0; i < mono.factors.size(); ++i) {
      if (merged[i]) continue;
      const auto& f = mono.factors[i];
      t.factors.push_back({Part::Reciprocal, g.edge(g.edge_index(f.edge)).length, f.kind, f.exp});
    }
    for (auto& f : t.factors) {
      if (t.mu_power >= 0) break;
      if (f.part == Part::Sin) {
        f.part = Part::SinOverMu;
        ++t.mu_power;
      }
    }
    terms_.push_back(std::move(t));
  }
}

std::complex<double> SecularFunction::at_mu(std::complex<double> mu, double* magnitude) const {
  // Terms with a leftover negative mu power cancel among themselves at 0;
  // step off the origin so they can be evaluated.
  if (mu == 0.0) mu = 1e-7;
  std::complex<double> total = 0.0;
  double mag = 0.0;
  for (const auto& t : terms_) {
    std::complex<double> v = t.coeff * ipow(mu, t.mu_power);
    for (const auto& f : t.factors) {
      const std::complex<double> x = mu * f.length;
      switch (f.part) {
        case Part::Sin: v *= std::sin(x); break;
        case Part::Cos: v *= std::cos(x); break;
        case Part::SinOverMu: v *= sin_over_mu(f.length, mu); break;
        case Part::One: break;
        case Part::Reciprocal: v *= ipow(eval_factor(f.kind, f.length, mu, 1e-12), f.exp); break;
      }
    }
    total += v;
    mag += std::abs(v);
  }
  if (magnitude != nullptr) *magnitude = mag;
  return total;
}

double SecularFunction::operator()(double lambda) const {
  double mag = 0.0;
  const auto z = at_mu(mu_of(lambda), &mag);
  if (std::abs(z.imag()) > 1e-9 * (1.0 + mag)) {
    throw Error(ErrorCode::NonRealEvaluation, "imaginary residue " + std::to_string(z.imag()));
  }
  return z.real();
}

double eval_expansion(const SecularExpansion& e, const MarkedGraph& g, const CouplingVector& alpha, double lambda,
                      bool with_pi) {
  if (with_pi) return SecularFunction(g, e, alpha)(lambda);
  return eval(e.determinant(), g, alpha, lambda);
}

}  // namespace qgraph
