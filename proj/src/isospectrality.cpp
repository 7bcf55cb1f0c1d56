#include "qgraph/isospectrality.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <thread>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include "qgraph/error.hpp"
#include "qgraph/m_function.hpp"
#include "qgraph/reductions.hpp"

namespace qgraph {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Isospectral: return "Isospectral";
    case Verdict::NotIsospectral: return "NotIsospectral";
    case Verdict::Unsupported: return "Unsupported";
  }
  return "?";
}

std::string_view to_string(VertexClass00 c) {
  switch (c) {
    case VertexClass00::Class00: return "00";
    case VertexClass00::Class0Bar0: return "0Bar0";
    case VertexClass00::ClassBar00: return "Bar00";
    case VertexClass00::ClassBar0Bar0: return "Bar0Bar0";
  }
  return "?";
}

namespace {

void require_matching(const MarkedGraph& g, const CouplingVector& a) {
  if (a.size() != g.vertex_count()) {
    throw Error(ErrorCode::MissingCoupling, "coupling vector has " + std::to_string(a.size()) +
                                                " entries for " + std::to_string(g.vertex_count()) + " vertices");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.ids()[i] != g.vertex(i).id) {
      throw Error(ErrorCode::MissingCoupling, "coupling " + a.ids()[i] + " does not match vertex " + g.vertex(i).id);
    }
  }
}

std::size_t delta_prime_zeros(const MarkedGraph& g, const CouplingVector& a) {
  std::size_t n = 0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.type(v) == VertexType::DeltaPrime && a[v] == 0) ++n;
  }
  return n;
}

// Largest bound whose search space stays around a million combinations.
std::vector<std::vector<int>> cheap_relations(const MarkedGraph& g) {
  const auto n = g.edge_count();
  if (n < 2) return {};
  if (n <= 8) return rational_independence_heuristic(g, 2);
  if (n <= 12) return rational_independence_heuristic(g, 1);
  return {};
}

enum class Mode { Full, Relaxed };

IsoVerdict run_check(const MarkedGraph& g, const SecularExpansion* pre, const CouplingVector& alpha,
                     const CouplingVector& alpha2, Mode mode) {
  require_matching(g, alpha);
  require_matching(g, alpha2);
  IsoVerdict out;
  out.approximate = !alpha.is_exact() || !alpha2.is_exact();
  out.length_relations = cheap_relations(g);
  const auto a = alpha.rationalized();
  const auto b = alpha2.rationalized();

  const auto za = delta_prime_zeros(g, a);
  const auto zb = delta_prime_zeros(g, b);
  if (za != zb) {
    out.verdict = Verdict::NotIsospectral;
    out.witness = Witness{Witness::Kind::Precondition, std::nullopt, Rational(static_cast<long>(za)),
                          Rational(static_cast<long>(zb)), "numbers of zero couplings at delta' vertices differ"};
    return out;
  }
  const auto pa = phi(g, a);
  const auto pb = phi(g, b);
  if (mode == Mode::Relaxed) {
    out.used_phi_equality = true;
    if (pa != pb) {
      out.verdict = Verdict::Unsupported;
      out.witness = Witness{Witness::Kind::Precondition, std::nullopt, pa, pb, "Phi values differ"};
      return out;
    }
  }

  const SecularExpansion local = pre ? SecularExpansion{} : expand_subgraphs(g);
  const auto& e = pre ? *pre : local;
  for (const auto& c : e.classes()) {
    Rational lhs, rhs;
    if (mode == Mode::Full) {
      lhs = pa * c.f.evaluate(a);
      rhs = pb * c.f.evaluate(b);
    } else {
      lhs = c.g_gamma.evaluate(a);
      rhs = c.g_gamma.evaluate(b);
    }
    if (lhs != rhs) {
      out.verdict = Verdict::NotIsospectral;
      out.witness = Witness{Witness::Kind::WeightClass, c.weight, lhs, rhs,
                            mode == Mode::Full ? "Phi f differs on a weight class" : "g differs on a weight class"};
      return out;
    }
  }
  out.verdict = Verdict::Isospectral;
  return out;
}

}  // namespace

IsoVerdict check_isospectral(const MarkedGraph& g, const CouplingVector& alpha, const CouplingVector& alpha2) {
  return run_check(g, nullptr, alpha, alpha2, Mode::Full);
}

IsoVerdict check_isospectral(const MarkedGraph& g, const SecularExpansion& e, const CouplingVector& alpha,
                             const CouplingVector& alpha2) {
  return run_check(g, &e, alpha, alpha2, Mode::Full);
}

IsoVerdict check_isospectral_relaxed(const MarkedGraph& g, const CouplingVector& alpha, const CouplingVector& alpha2) {
  return run_check(g, nullptr, alpha, alpha2, Mode::Relaxed);
}

IsoVerdict check_isospectral_relaxed(const MarkedGraph& g, const SecularExpansion& e, const CouplingVector& alpha,
                                     const CouplingVector& alpha2) {
  return run_check(g, &e, alpha, alpha2, Mode::Relaxed);
}

BalanceSides balancing_residual(const MarkedGraph& g, std::string_view vertex_id, const CouplingVector& alpha,
                                const CouplingVector& alpha2) {
  require_matching(g, alpha);
  require_matching(g, alpha2);
  const auto v = g.vertex_index(vertex_id);
  const auto a = alpha.rationalized();
  const auto b = alpha2.rationalized();
  BalanceSides s{a[v], b[v]};
  for (const auto ei : g.incident(v)) {
    const auto& e = g.edge(ei);
    if (e.is_loop()) continue;
    const auto w = e.other(v);
    if (a[w] == 0 || b[w] == 0) {
      throw Error(ErrorCode::ZeroAdjacentCoupling, "coupling at neighbour '" + g.vertex(w).id + "' is zero");
    }
    // each parallel edge contributes once, which sums to nu(w)
    s.lhs -= 1 / a[w];
    s.rhs -= 1 / b[w];
  }
  return s;
}

bool sigma_necessary(const MarkedGraph& g, const CouplingVector& alpha, const CouplingVector& alpha2) {
  require_matching(g, alpha);
  require_matching(g, alpha2);
  return sigma_set(g, alpha.rationalized()) == sigma_set(g, alpha2.rationalized());
}

MarkedGraph a3_graph(A3Variant variant, double l1, double l2) {
  const auto outer = variant == A3Variant::DeltaDeltaPrimeDelta ? VertexType::Delta : VertexType::DeltaPrime;
  const auto inner = outer == VertexType::Delta ? VertexType::DeltaPrime : VertexType::Delta;
  return GraphBuilder{}
      .add_vertex("V1", outer)
      .add_vertex("V2", inner)
      .add_vertex("V3", outer)
      .add_edge("e1", "V1", "V2", l1)
      .add_edge("e2", "V2", "V3", l2)
      .build();
}

std::pair<CouplingVector, CouplingVector> a3_family(const Rational& a, A3Variant) {
  if (a == 0) throw Error(ErrorCode::ZeroParameter, "a must be nonzero");
  const std::vector<std::string> ids{"V1", "V2", "V3"};
  const Rational two_over_a = Rational(2) / a;
  return {CouplingVector(ids, {a, two_over_a, Rational(0)}), CouplingVector(ids, {Rational(0), -two_over_a, -a})};
}

std::map<std::string, VertexClass00> classify_vertices(const MarkedGraph& g, const CouplingVector& alpha,
                                                       const CouplingVector& alpha2) {
  require_matching(g, alpha);
  require_matching(g, alpha2);
  std::map<std::string, VertexClass00> out;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const bool za = alpha[v] == 0;
    const bool zb = alpha2[v] == 0;
    out[g.vertex(v).id] = za ? (zb ? VertexClass00::Class00 : VertexClass00::Class0Bar0)
                             : (zb ? VertexClass00::ClassBar00 : VertexClass00::ClassBar0Bar0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// uniqueness report

namespace {

struct Shape {
  std::size_t n = 0;
  bool tree = false;
  bool loops = false;
  bool all_mixed = false;  // every non-loop edge joins different types
  bool same_type = false;  // all vertices of one type
  bool a3 = false;         // mixed chain of three vertices, no loops
  bool cycle4_delta = false;
};

Shape shape_of(const MarkedGraph& g) {
  Shape s;
  s.n = g.vertex_count();
  s.tree = g.is_tree();
  s.loops = g.has_loops();
  s.all_mixed = true;
  for (const auto& e : g.edges()) {
    if (!e.is_loop() && g.same_type(e)) s.all_mixed = false;
  }
  s.same_type = true;
  for (std::size_t v = 1; v < s.n; ++v) {
    if (g.type(v) != g.type(0)) s.same_type = false;
  }
  s.a3 = s.n == 3 && s.tree && s.all_mixed;
  if (s.n == 4 && g.edge_count() == 4 && !s.loops && s.same_type && g.type(0) == VertexType::Delta) {
    s.cycle4_delta = true;
    for (std::size_t v = 0; v < 4; ++v) {
      std::set<std::size_t> nb;
      for (const auto ei : g.incident(v)) nb.insert(g.edge(ei).other(v));
      if (g.degree(v) != 2 || nb.size() != 2) s.cycle4_delta = false;
    }
  }
  return s;
}

// Same-type trees, and the all-mixed graphs covered by the "A3 or equal"
// theorem (which carries the valence-2 caveat).
bool known_unique(const MarkedGraph& g) {
  const auto s = shape_of(g);
  return (s.tree && s.same_type) || (s.all_mixed && s.n > 2 && !s.a3);
}

}  // namespace

UniquenessReport uniqueness_report(const MarkedGraph& g) {
  UniquenessReport r;
  const auto s = shape_of(g);
  auto add = [&](std::string tag, std::string text) { r.entries.push_back({std::move(tag), std::move(text)}); };

  for (std::size_t v = 0; v < s.n; ++v) {
    const auto& inc = g.incident(v);
    const bool loop = std::any_of(inc.begin(), inc.end(), [&](std::size_t e) { return g.edge(e).is_loop(); });
    if (!loop && g.degree(v) == 2) r.cleaning_candidates.push_back(g.vertex(v).id);
  }
  const auto trims = admissible_trimmings(g);
  for (const auto& t : trims) {
    r.trimmings.push_back((t.kind == TrimmingKind::SameTypeEdge ? "edge:" : "vertex:") + t.target);
  }

  if (s.n == 2) {
    add("degenerate-n2", "degenerate N=2: coupling swap is trivially isospectral");
  }
  if (s.a3) {
    add("a3-exception", "A3 exception: isospectral family exists (Example A3): (a, 2/a, 0) and (0, -2/a, -a)");
  }
  if (s.cycle4_delta) {
    add("cycle4-pattern",
        "4-cycle of delta vertices: (a, -a, a, -a) and (-a, a, -a, a) are isospectral for every nonzero a");
  }
  if (s.all_mixed && s.n > 2) {
    add("uniqueness-nonzero",
        "all edges mixed, more than 2 vertices: isospectral pairs with all couplings nonzero are equal");
    if (!s.a3) {
      add("bloody", "all edges mixed, more than 2 vertices, not A3: isospectral pairs are equal, provided no "
                    "valence-2 vertex has both couplings zero");
    }
  }
  if (s.same_type) {
    add("phi-equality-same-type", "all vertices of one type: isospectrality forces Phi equality");
    if (s.tree) add("same-type-tree", "tree with all vertices of one type: the spectrum determines all couplings");
  } else if (!s.tree) {
    add("phi-equality-non-tree", "non-tree graph with both vertex types: isospectrality forces Phi equality");
  } else if (s.all_mixed) {
    add("phi-equality-mixed-tree", "tree with all edges mixed: isospectrality forces Phi equality when all "
                                   "couplings are nonzero");
  }
  if (s.n > 2) {
    add("zero-propagation", "a vertex with both couplings zero forces equal couplings at every neighbour, "
                            "provided no valence-2 vertex has both couplings zero");
  }
  if (s.loops) {
    add("loop-zero", "at a loop vertex, a zero coupling in one vector and a nonzero one in the other rule out "
                     "isospectrality");
  }

  // two different trimmings of one kind, or two consecutive edge trimmings,
  // each ending in a graph known to be unique
  std::size_t unique_edge = 0, unique_vertex = 0;
  bool chained = false;
  for (const auto& t : trims) {
    const auto reduced = apply_trimming(g, t).graph;
    if (known_unique(reduced)) {
      (t.kind == TrimmingKind::SameTypeEdge ? unique_edge : unique_vertex) += 1;
    }
    if (t.kind != TrimmingKind::SameTypeEdge || chained) continue;
    for (const auto& t2 : admissible_trimmings(reduced)) {
      if (t2.kind == TrimmingKind::SameTypeEdge && known_unique(apply_trimming(reduced, t2).graph)) {
        chained = true;
        break;
      }
    }
  }
  if (unique_edge >= 2 || unique_vertex >= 2 || chained) {
    add("trimming", "trimmable to graphs of known uniqueness: no isospectral configurations, under the caveats "
                    "of the theorems used for the trimmed graphs");
  }

  if (!r.cleaning_candidates.empty()) {
    r.caveats.push_back("zero-coupling conclusions assume no valence-2 vertex with both couplings zero; clean such "
                        "vertices first");
  }
  if (!cheap_relations(g).empty()) {
    r.caveats.push_back("edge lengths satisfy a small integer relation; all conclusions assume rational "
                        "independence");
  } else {
    r.caveats.push_back("all conclusions assume rationally independent edge lengths");
  }
  return r;
}

// ---------------------------------------------------------------------------
// numeric search

namespace {

struct Mono {
  double coeff;
  std::vector<int> vars;  // indices into the full coupling vector
};

struct Residuals {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  std::vector<std::vector<Mono>> classes;
  std::vector<double> target;       // Phi(alpha) f(alpha) per class
  std::vector<int> free;            // vertex index of each unknown
  std::vector<int> phi_vars;        // unknowns entering Phi
  std::vector<double> phi_degrees;  // their degrees
  std::size_t n_vertices = 0;
  int rows = 0;

  int inputs() const { return static_cast<int>(free.size()); }
  int values() const { return rows; }

  std::vector<double> full(const Eigen::VectorXd& x) const {
    std::vector<double> a(n_vertices, 0.0);
    for (std::size_t i = 0; i < free.size(); ++i) a[free[i]] = x[static_cast<Eigen::Index>(i)];
    return a;
  }

  // 1 / Phi for the unknowns; 1 when no delta' coupling is free.
  double inv_phi(const std::vector<double>& a, int skip = -1) const {
    double p = 1.0;
    for (std::size_t k = 0; k < phi_vars.size(); ++k) {
      if (phi_vars[k] != skip) p *= a[phi_vars[k]] / phi_degrees[k];
    }
    return p;
  }

  static double eval(const std::vector<Mono>& f, const std::vector<double>& a, int skip = -1) {
    double s = 0.0;
    for (const auto& m : f) {
      if (skip >= 0 && std::find(m.vars.begin(), m.vars.end(), skip) == m.vars.end()) continue;
      double t = m.coeff;
      for (const auto v : m.vars) {
        if (v != skip) t *= a[v];
      }
      s += t;
    }
    return s;
  }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    const auto a = full(x);
    const double p = inv_phi(a);
    fvec.setZero(rows);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      fvec[static_cast<Eigen::Index>(c)] = target[c] * p - eval(classes[c], a);
    }
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    const auto a = full(x);
    jac.setZero(rows, inputs());
    for (std::size_t i = 0; i < free.size(); ++i) {
      const int v = free[i];
      double dp = 0.0;
      for (std::size_t k = 0; k < phi_vars.size(); ++k) {
        if (phi_vars[k] == v) dp = inv_phi(a, v) / phi_degrees[k];
      }
      for (std::size_t c = 0; c < classes.size(); ++c) {
        jac(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) =
            target[c] * dp - eval(classes[c], a, v);
      }
    }
    return 0;
  }
};

std::vector<Mono> compile(const AlphaPolynomial& f, const MarkedGraph& g) {
  std::vector<Mono> out;
  for (const auto& [key, c] : f.terms()) {
    Mono m{c.get_d(), {}};
    for (const auto& id : key) m.vars.push_back(static_cast<int>(g.vertex_index(id)));
    out.push_back(std::move(m));
  }
  return out;
}

void choose(const std::vector<int>& pool, std::size_t k, std::size_t from, std::vector<int>& cur,
            std::vector<std::vector<int>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = from; i < pool.size(); ++i) {
    cur.push_back(pool[i]);
    choose(pool, k, i + 1, cur, out);
    cur.pop_back();
  }
}

struct StartResult {
  bool ok = false;
  std::vector<double> values;
  double residual = 0.0;
};

}  // namespace

std::vector<IsoCandidate> find_isospectral_numeric(const MarkedGraph& g, const CouplingVector& alpha,
                                                   const SearchConfig& cfg) {
  return find_isospectral_numeric(g, expand_subgraphs(g), alpha, cfg);
}

std::vector<IsoCandidate> find_isospectral_numeric(const MarkedGraph& g, const SecularExpansion& e,
                                                   const CouplingVector& alpha, const SearchConfig& cfg) {
  require_matching(g, alpha);
  const auto a = alpha.rationalized(cfg.max_denominator);
  const auto n = g.vertex_count();
  const auto classes = e.classes();
  const auto pa = phi(g, a);

  Residuals base;
  base.n_vertices = n;
  double scale = 1.0, amax = 1.0;
  for (const auto& c : classes) {
    base.classes.push_back(compile(c.f, g));
    base.target.push_back(Rational(pa * c.f.evaluate(a)).get_d());
    scale = std::max(scale, std::abs(base.target.back()));
  }
  for (std::size_t v = 0; v < n; ++v) amax = std::max(amax, std::abs(a[v].get_d()));

  std::vector<int> primes;
  for (std::size_t v = 0; v < n; ++v) {
    if (g.type(v) == VertexType::DeltaPrime) primes.push_back(static_cast<int>(v));
  }
  std::vector<std::vector<int>> patterns;
  std::vector<int> cur;
  choose(primes, delta_prime_zeros(g, a), 0, cur, patterns);

  std::vector<IsoCandidate> out;
  out.push_back({a, 0.0, true});

  for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
    const auto& zeros = patterns[pi];
    Residuals r = base;
    for (std::size_t v = 0; v < n; ++v) {
      const int iv = static_cast<int>(v);
      if (std::find(zeros.begin(), zeros.end(), iv) != zeros.end()) continue;
      r.free.push_back(iv);
      if (g.type(v) == VertexType::DeltaPrime) {
        r.phi_vars.push_back(iv);
        r.phi_degrees.push_back(static_cast<double>(g.degree(v)));
      }
    }
    if (r.free.empty()) continue;
    r.rows = std::max(static_cast<int>(r.classes.size()), r.inputs());

    std::vector<StartResult> results(cfg.starts);
    auto work = [&](std::size_t begin, std::size_t step) {
      for (std::size_t s = begin; s < cfg.starts; s += step) {
        std::mt19937_64 rng(cfg.seed * 1000003u + pi * 7919u + s);
        std::uniform_real_distribution<double> dist(-2.0 * amax, 2.0 * amax);
        Eigen::VectorXd x(r.inputs());
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = dist(rng);
        Residuals local = r;
        Eigen::LevenbergMarquardt<Residuals> lm(local);
        lm.parameters.maxfev = 2000;
        lm.parameters.xtol = 1e-15;
        lm.parameters.ftol = 1e-15;
        lm.minimize(x);
        const auto full = r.full(x);
        const double p = r.inv_phi(full);
        bool ok = std::isfinite(p) && std::abs(p) > 1e-12;
        for (const auto v : r.phi_vars) ok = ok && std::abs(full[v]) > 1e-9;
        double res = 0.0;
        if (ok) {
          for (std::size_t c = 0; c < r.classes.size(); ++c) {
            res = std::max(res, std::abs(r.target[c] - Residuals::eval(r.classes[c], full) / p));
          }
          res /= scale;
        }
        results[s] = {ok && res < cfg.residual_tol, full, res};
      }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.starts)));
    if (workers == 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
      for (auto& t : pool) t.join();
    }

    for (const auto& sr : results) {
      if (!sr.ok) continue;
      std::vector<Rational> snapped;
      for (std::size_t v = 0; v < n; ++v) {
        snapped.push_back(std::abs(sr.values[v]) < 1e-12 ? Rational(0) : rationalize(sr.values[v], cfg.max_denominator));
      }
      const bool seen = std::any_of(out.begin(), out.end(), [&](const IsoCandidate& c) {
        if (c.alpha.values() == snapped) return true;
        for (std::size_t v = 0; v < n; ++v) {
          if (std::abs(c.alpha[v].get_d() - sr.values[v]) > 1e-6 * (1.0 + std::abs(sr.values[v]))) return false;
        }
        return true;
      });
      if (seen) continue;
      CouplingVector exact(alpha.ids(), snapped, true);
      const bool verified = check_isospectral(g, e, a, exact).verdict == Verdict::Isospectral;
      out.push_back({verified ? exact : CouplingVector::from_doubles(g, sr.values), sr.residual, verified});
    }
  }
  return out;
}

}  // namespace qgraph
