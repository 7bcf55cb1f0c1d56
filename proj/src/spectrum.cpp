#include "qgraph/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

#include <Eigen/Dense>

#include "qgraph/error.hpp"

namespace qgraph {

std::string_view to_string(SpectrumMethod m) { return m == SpectrumMethod::Secular ? "secular" : "edge-basis"; }

std::string_view to_string(RootFlag f) {
  switch (f) {
    case RootFlag::None: return "";
    case RootFlag::Cluster: return "cluster";
    case RootFlag::LoopInvisible: return "loop-invisible";
    case RootFlag::ZeroMode: return "zero-mode";
  }
  return "";
}

std::vector<double> SpectrumWindow::expanded(bool include_flagged) const {
  std::vector<double> out;
  for (const auto& r : roots) {
    if (!include_flagged && (r.flag == RootFlag::LoopInvisible || r.flag == RootFlag::ZeroMode)) continue;
    for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.lambda);
  }
  return out;
}

namespace {

using Fn = std::function<double(double)>;

double default_mu_step(const MarkedGraph& g, const SpectrumOptions& opts) {
  return opts.mu_step > 0.0 ? opts.mu_step : std::numbers::pi / (40.0 * g.total_length());
}

std::vector<double> sample_all(const Fn& f, const std::vector<double>& xs, unsigned threads) {
  std::vector<double> ys(xs.size());
  const std::size_t workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(xs.size() / 64 + 1)));
  if (workers == 1) {
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = f(xs[i]);
    return ys;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < xs.size(); i += workers) ys[i] = f(xs[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return ys;
}

double bisect(const Fn& f, double a, double b, double fa, double fb, double rel_tol) {
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    if (b - a <= rel_tol * std::max(std::abs(a), std::abs(b))) break;
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  // secant step inside the final bracket
  const double r = a - fa * (b - a) / (fb - fa);
  return std::clamp(r, a, b);
}

// Golden-section search for the extremum of f on [a, b] that points toward
// zero (a minimum when f > 0 on the dip, a maximum when f < 0).
std::pair<double, double> extremum_toward_zero(const Fn& f, double a, double b, double sign) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  auto h = [&](double x) { return sign * f(x); };
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = h(c), fd = h(d);
  for (int it = 0; it < 80 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = h(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

void scan_segment(const Fn& f, const std::vector<double>& xs, const SpectrumOptions& opts,
                  std::vector<SpectralRoot>& out) {
  if (xs.size() < 2) return;
  const auto ys = sample_all(f, xs, opts.threads);
  const std::size_t n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(ys[i])) throw Error(ErrorCode::ConditioningFailure, "non-finite value during scan");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (ys[i] == 0.0) {
      out.push_back({xs[i], 1, RootFlag::None});
      continue;
    }
    if (ys[i + 1] != 0.0 && (ys[i] < 0) != (ys[i + 1] < 0)) {
      out.push_back({bisect(f, xs[i], xs[i + 1], ys[i], ys[i + 1], opts.rel_tol), 1, RootFlag::None});
    }
  }
  if (ys[n - 1] == 0.0) out.push_back({xs[n - 1], 1, RootFlag::None});
  // tangential zeros and root pairs hidden between two samples
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double l = ys[i - 1], m = ys[i], r = ys[i + 1];
    if (m == 0.0 || (l < 0) != (m < 0) || (m < 0) != (r < 0)) continue;
    if (!(std::abs(m) < std::abs(l) && std::abs(m) < std::abs(r))) continue;
    const auto [x, fx] = extremum_toward_zero(f, xs[i - 1], xs[i + 1], m > 0 ? 1.0 : -1.0);
    if (fx != 0.0 && (fx < 0) != (m < 0)) {
      out.push_back({bisect(f, xs[i - 1], x, l, fx, opts.rel_tol), 1, RootFlag::None});
      out.push_back({bisect(f, x, xs[i + 1], fx, r, opts.rel_tol), 1, RootFlag::None});
    } else if (std::abs(fx) <= 1e-9 * std::max(std::abs(l), std::abs(r))) {
      out.push_back({x, 2, RootFlag::Cluster});
    }
  }
}

std::vector<SpectralRoot> merge_clusters(std::vector<SpectralRoot> roots, double radius) {
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  std::vector<SpectralRoot> out;
  for (const auto& r : roots) {
    if (!out.empty() && r.lambda - out.back().lambda <= radius * std::max(1.0, std::abs(r.lambda))) {
      auto& last = out.back();
      const int m = last.multiplicity + r.multiplicity;
      last.lambda = (last.lambda * last.multiplicity + r.lambda * r.multiplicity) / m;
      last.multiplicity = m;
      last.flag = RootFlag::Cluster;
    } else {
      out.push_back(r);
    }
  }
  return out;
}

SpectrumWindow scan(const Fn& f, const MarkedGraph& g, double lambda_min, double lambda_max, SpectrumMethod method, const SpectrumOptions& opts) {
  if (!(lambda_min < lambda_max)) throw Error(ErrorCode::InvalidArgument, "empty spectral window");
  SpectrumWindow w{lambda_min, lambda_max, method, {}};
  std::vector<SpectralRoot> roots;
  const double guard = opts.zero_guard;
  if (lambda_min < -guard) {
    const double hi = std::min(lambda_max, -guard);
    std::size_t count = opts.negative_samples;
    if (count == 0) {
      const double span = std::sqrt(std::abs(lambda_min));
      count = std::max<std::size_t>(2000, static_cast<std::size_t>(std::ceil(4.0 * span / default_mu_step(g, opts))));
    }
    std::vector<double> xs(count + 1);
    for (std::size_t i = 0; i <= count; ++i) xs[i] = lambda_min + (hi - lambda_min) * double(i) / double(count);
    xs.back() = hi;
    scan_segment(f, xs, opts, roots);
  }
  if (lambda_max > guard) {
    const double mu0 = std::sqrt(std::max(lambda_min, guard));
    const double mu1 = std::sqrt(lambda_max);
    const double step = default_mu_step(g, opts);
    const auto count = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((mu1 - mu0) / step)));
    std::vector<double> xs(count + 1);
    for (std::size_t i = 0; i <= count; ++i) {
      const double mu = mu0 + (mu1 - mu0) * double(i) / double(count);
      xs[i] = mu * mu;
    }
    xs.front() = std::max(lambda_min, guard);
    xs.back() = lambda_max;
    scan_segment(f, xs, opts, roots);
  }
  w.roots = merge_clusters(std::move(roots), opts.cluster_radius);
  return w;
}

struct EndCoeffs {
  double va, vb;  // value = va a + vb b
  double da, db;  // derivative into the edge = da a + db b
};

// Coefficients of f and of its inward derivative at one end of an edge of
// length l. For lambda >= -1 the basis is C = cos(mu x), S = sin(mu x)/mu
// (entire in lambda). Below that it is e^{-yx}, e^{-y(l-x)}, which stays
// bounded; the change of basis has positive determinant e^{yl}/(2y), so
// the sign of the determinant is unaffected. With `envelope` set, the
// result bounds the magnitudes instead and never vanishes by cancellation.
EndCoeffs end_coeffs(double lambda, double l, bool at_start, bool envelope) {
  if (lambda < -1.0) {
    const double y = std::sqrt(-lambda);
    const double e = std::exp(-y * l);
    if (at_start) return {1.0, e, envelope ? y : -y, y * e};
    return {e, 1.0, y * e, envelope ? y : -y};
  }
  if (at_start) return {1.0, 0.0, 0.0, 1.0};
  double c = 1.0, s = l;
  if (lambda > 0) {
    const double mu = std::sqrt(lambda);
    if (envelope) {
      s = std::min(l, 1.0 / mu);
      return {1.0, s, lambda * s, 1.0};
    }
    c = std::cos(mu * l);
    s = mu * l < 1e-4 ? l * (1.0 - lambda * l * l / 6.0) : std::sin(mu * l) / mu;
  } else if (lambda < 0) {
    const double y = std::sqrt(-lambda);
    c = std::cosh(y * l);
    s = y * l < 1e-4 ? l * (1.0 - lambda * l * l / 6.0) : std::sinh(y * l) / y;
  }
  if (envelope) return {c, s, std::abs(lambda) * s, c};
  return {c, s, lambda * s, -c};
}

// On edge j, f = a_j phi_1(x) + b_j phi_2(x); unknowns ordered (a_1, b_1, a_2, ...).
Eigen::MatrixXd matching_system(const MarkedGraph& g, const std::vector<double>& alpha, double lambda,
                                bool envelope = false) {
  const auto n = static_cast<Eigen::Index>(2 * g.edge_count());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  struct End {
    Eigen::Index col;
    EndCoeffs k;
  };
  Eigen::Index row = 0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    std::vector<End> ends;
    for (std::size_t ei = 0; ei < g.edge_count(); ++ei) {
      const auto& e = g.edge(ei);
      const auto col = static_cast<Eigen::Index>(2 * ei);
      if (e.u == v) ends.push_back({col, end_coeffs(lambda, e.length, true, envelope)});
      if (e.v == v) ends.push_back({col, end_coeffs(lambda, e.length, false, envelope)});
    }
    const bool delta = g.type(v) == VertexType::Delta;
    auto put = [&](Eigen::Index r, const End& e, double wa, double wb) {
      m(r, e.col) += envelope ? std::abs(wa) : wa;
      m(r, e.col + 1) += envelope ? std::abs(wb) : wb;
    };
    // continuity of the value (delta) or of the derivative (delta')
    for (std::size_t k = 1; k < ends.size(); ++k, ++row) {
      const auto& a = ends[0].k;
      const auto& b = ends[k].k;
      if (delta) {
        put(row, ends[0], a.va, a.vb);
        put(row, ends[k], -b.va, -b.vb);
      } else {
        put(row, ends[0], a.da, a.db);
        put(row, ends[k], -b.da, -b.db);
      }
    }
    // delta: sum f' - alpha f = 0;  delta': sum f + alpha f' = 0
    for (const auto& e : ends) {
      if (delta) put(row, e, e.k.da, e.k.db);
      else put(row, e, e.k.va, e.k.vb);
    }
    const auto& f = ends[0].k;
    if (delta) put(row, ends[0], -alpha[v] * f.va, -alpha[v] * f.vb);
    else put(row, ends[0], alpha[v] * f.da, alpha[v] * f.db);
    ++row;
  }
  return m;
}

}  // namespace

double edge_basis_determinant(const MarkedGraph& g, const CouplingVector& alpha, double lambda) {
  const auto a = alpha.to_doubles();
  Eigen::MatrixXd m = matching_system(g, a, lambda);
  const Eigen::MatrixXd env = matching_system(g, a, lambda, true);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double s = env.row(r).maxCoeff();
    if (s > 0) m.row(r) /= s;
  }
  return m.partialPivLu().determinant();
}

std::size_t zero_mode_multiplicity(const MarkedGraph& g, const CouplingVector& alpha) {
  const Eigen::MatrixXd m = matching_system(g, alpha.to_doubles(), 0.0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  std::size_t null = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) null += s(i) <= 1e-10 * std::max(1.0, top) ? 1 : 0;
  return null;
}

double negative_spectrum_bound(const MarkedGraph& g, const CouplingVector& alpha) {
  double a = 0.0;
  double shortest = g.edge(0).length;
  for (const auto& e : g.edges()) shortest = std::min(shortest, e.length);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const double x = std::abs(alpha[v].get_d());
    if (g.type(v) == VertexType::Delta) a += x;
    else if (x > 0) a += static_cast<double>(g.degree(v)) / x;
  }
  return 1.0 + 2.0 * std::max(a, std::sqrt(a / shortest));
}

SpectrumWindow eigenvalues_secular(const MarkedGraph& g, const SecularExpansion& e, const CouplingVector& alpha,
                                   double lambda_min, double lambda_max, const SpectrumOptions& opts) {
  const SecularFunction f(g, e, alpha);
  return scan([&](double x) { return f(x); }, g, lambda_min, lambda_max, SpectrumMethod::Secular, opts);
}

SpectrumWindow eigenvalues_secular(const MarkedGraph& g, const CouplingVector& alpha, double lambda_min,
                                   double lambda_max, const SpectrumOptions& opts) {
  return eigenvalues_secular(g, expand_subgraphs(g), alpha, lambda_min, lambda_max, opts);
}

SpectrumWindow eigenvalues_edge_basis(const MarkedGraph& g, const CouplingVector& alpha, double lambda_min,
                                      double lambda_max, const SpectrumOptions& opts) {
  auto w = scan([&](double x) { return edge_basis_determinant(g, alpha, x); }, g, lambda_min, lambda_max,
                SpectrumMethod::EdgeBasis, opts);

  const auto loops = classify_edges(g);
  if (!loops.loops_delta.empty() || !loops.loops_delta_prime.empty()) {
    const SecularFunction f(g, expand_subgraphs(g), alpha);
    const double step = default_mu_step(g, opts);
    auto on_loop_family = [&](double lambda) {
      if (lambda <= 0) return false;
      const double mu = std::sqrt(lambda);
      auto near = [&](const std::vector<std::size_t>& edges, bool even) {
        for (auto ei : edges) {
          const double t = mu * g.edge(ei).length / std::numbers::pi;  // 2k for delta, 2k+1 for delta'
          const double k = std::round(even ? t / 2.0 : (t - 1.0) / 2.0);
          const double target = even ? 2.0 * k : 2.0 * k + 1.0;
          if (k >= (even ? 1.0 : 0.0) && std::abs(t - target) < 1e-7 * std::max(1.0, t)) return true;
        }
        return false;
      };
      return near(loops.loops_delta, true) || near(loops.loops_delta_prime, false);
    };
    std::vector<SpectralRoot> split;
    for (auto r : w.roots) {
      if (r.flag == RootFlag::ZeroMode || !on_loop_family(r.lambda)) {
        split.push_back(r);
        continue;
      }
      const double mu = std::sqrt(r.lambda);
      const double h = 2.0 * mu * step;
      const double scale = std::max(std::abs(f(r.lambda - h)), std::abs(f(r.lambda + h)));
      if (std::abs(f(r.lambda)) > 1e-6 * scale) {
        r.flag = RootFlag::LoopInvisible;
        split.push_back(r);
      } else if (r.multiplicity > 1) {
        // the M-visible part keeps one copy, the loop carries the rest
        split.push_back({r.lambda, 1, RootFlag::None});
        split.push_back({r.lambda, r.multiplicity - 1, RootFlag::LoopInvisible});
      } else {
        split.push_back(r);
      }
    }
    w.roots = std::move(split);
  }

  if (lambda_min <= 0.0 && lambda_max >= 0.0) {
    if (const auto m = zero_mode_multiplicity(g, alpha); m > 0) {
      w.roots.push_back({0.0, static_cast<int>(m), RootFlag::ZeroMode});
      std::sort(w.roots.begin(), w.roots.end(), [](const auto& x, const auto& y) { return x.lambda < y.lambda; });
    }
  }
  return w;
}

SpectrumComparison compare_spectra(const SpectrumWindow& a, const SpectrumWindow& b, double tol) {
  auto same = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); };
  if (!same(a.lambda_min, b.lambda_min) || !same(a.lambda_max, b.lambda_max)) {
    throw Error(ErrorCode::WindowMismatch, "spectral windows differ");
  }
  const auto xs = a.expanded(true);
  auto ys = b.expanded(true);
  std::vector<bool> used(ys.size(), false);
  SpectrumComparison out;
  auto mismatch = [&](double at) {
    out.equal = false;
    if (!out.first_mismatch || at < *out.first_mismatch) out.first_mismatch = at;
  };
  for (double x : xs) {
    std::size_t best = ys.size();
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (!used[j] && (best == ys.size() || std::abs(ys[j] - x) < std::abs(ys[best] - x))) best = j;
    }
    if (best == ys.size()) {
      mismatch(x);
      continue;
    }
    const double d = std::abs(ys[best] - x);
    if (d > tol) {
      mismatch(x);
      continue;
    }
    used[best] = true;
    out.max_deviation = std::max(out.max_deviation, d);
  }
  for (std::size_t j = 0; j < ys.size(); ++j) {
    if (!used[j]) mismatch(ys[j]);
  }
  return out;
}

}  // namespace qgraph
