#include "qgraph/trig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <iterator>
#include <sstream>
#include <tuple>

#include "qgraph/error.hpp"

namespace qgraph {

std::string_view to_string(TrigKind k) {
  switch (k) {
    case TrigKind::Cot: return "cot";
    case TrigKind::Csc: return "csc";
    case TrigKind::Tan: return "tan";
    case TrigKind::Sec: return "sec";
    case TrigKind::TanHalf: return "tan_half";
    case TrigKind::CotHalf: return "cot_half";
    case TrigKind::CotQuarterShift: return "cot_quarter_shift";
  }
  return "?";
}

TrigKind trig_kind_from_string(std::string_view s) {
  for (auto k : {TrigKind::Cot, TrigKind::Csc, TrigKind::Tan, TrigKind::Sec, TrigKind::TanHalf,
                 TrigKind::CotHalf, TrigKind::CotQuarterShift}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::SyntaxError, "unknown trig kind '" + std::string(s) + "'");
}

bool TrigMonomial::is_square_free() const {
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].exp != 1) return false;
    if (i > 0 && factors[i].edge == factors[i - 1].edge) return false;
  }
  return true;
}

std::string TrigMonomial::to_string() const {
  std::ostringstream out;
  out << "mu^" << mu_power;
  for (const auto& f : factors) {
    out << " * " << qgraph::to_string(f.kind) << '(' << f.edge << ')';
    if (f.exp != 1) out << '^' << f.exp;
  }
  return out.str();
}

// ---------------------------------------------------------------------------

AlphaPolynomial AlphaPolynomial::constant(const Rational& c) {
  AlphaPolynomial p;
  p.add_term({}, c);
  return p;
}

AlphaPolynomial AlphaPolynomial::variable(std::string vertex_id, const Rational& coeff) {
  AlphaPolynomial p;
  p.add_term({std::move(vertex_id)}, coeff);
  return p;
}

Rational AlphaPolynomial::constant_term() const {
  auto it = terms_.find(Key{});
  return it == terms_.end() ? Rational(0) : it->second;
}

AlphaPolynomial AlphaPolynomial::without_constant() const {
  AlphaPolynomial p = *this;
  p.terms_.erase(Key{});
  return p;
}

void AlphaPolynomial::add_term(const Key& vars, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(vars, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

AlphaPolynomial& AlphaPolynomial::operator+=(const AlphaPolynomial& o) {
  for (const auto& [k, c] : o.terms_) add_term(k, c);
  return *this;
}

AlphaPolynomial& AlphaPolynomial::operator-=(const AlphaPolynomial& o) {
  for (const auto& [k, c] : o.terms_) add_term(k, -c);
  return *this;
}

AlphaPolynomial AlphaPolynomial::operator-() const { return scaled(-1); }

AlphaPolynomial AlphaPolynomial::scaled(const Rational& c) const {
  AlphaPolynomial p;
  if (c == 0) return p;
  for (const auto& [k, v] : terms_) p.terms_.emplace(k, v * c);
  return p;
}

AlphaPolynomial AlphaPolynomial::operator*(const AlphaPolynomial& o) const {
  AlphaPolynomial p;
  Key merged;
  for (const auto& [ka, ca] : terms_) {
    for (const auto& [kb, cb] : o.terms_) {
      merged.clear();
      std::set_union(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(merged));
      if (merged.size() != ka.size() + kb.size()) {
        throw Error(ErrorCode::NonMultilinear, "product squares a coupling variable");
      }
      p.add_term(merged, ca * cb);
    }
  }
  return p;
}

Rational AlphaPolynomial::evaluate(const CouplingVector& alpha) const {
  Rational sum = 0;
  for (const auto& [k, c] : terms_) {
    Rational t = c;
    for (const auto& v : k) t *= alpha.at(v);
    sum += t;
  }
  return sum;
}

double AlphaPolynomial::evaluate(const std::map<std::string, double>& alpha) const {
  double sum = 0.0;
  for (const auto& [k, c] : terms_) {
    double t = c.get_d();
    for (const auto& v : k) {
      auto it = alpha.find(v);
      if (it == alpha.end()) throw Error(ErrorCode::MissingCoupling, "no value for alpha_" + v);
      t *= it->second;
    }
    sum += t;
  }
  return sum;
}

std::string AlphaPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) out << " + ";
    first = false;
    out << qgraph::to_string(c);
    for (const auto& v : k) out << "*a[" << v << ']';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

namespace {

TrigMonomial multiply_raw(const TrigMonomial& a, const TrigMonomial& b) {
  TrigMonomial m;
  m.mu_power = a.mu_power + b.mu_power;
  m.factors.reserve(a.factors.size() + b.factors.size());
  auto key_less = [](const TrigFactor& x, const TrigFactor& y) {
    return std::tie(x.edge, x.kind) < std::tie(y.edge, y.kind);
  };
  auto i = a.factors.begin(), j = b.factors.begin();
  while (i != a.factors.end() || j != b.factors.end()) {
    if (j == b.factors.end() || (i != a.factors.end() && key_less(*i, *j))) {
      m.factors.push_back(*i++);
    } else if (i == a.factors.end() || key_less(*j, *i)) {
      m.factors.push_back(*j++);
    } else {
      m.factors.push_back({i->edge, i->kind, i->exp + j->exp});
      ++i;
      ++j;
    }
  }
  return m;
}

// Writes the reduced expansion of c*m into `out` through `sink`.
template <typename Sink>
void reduce_into(const TrigMonomial& m, const AlphaPolynomial& c, Sink&& sink) {
  auto it = std::find_if(m.factors.begin(), m.factors.end(), [](const TrigFactor& f) {
    return (f.kind == TrigKind::Csc || f.kind == TrigKind::Sec) && f.exp >= 2;
  });
  if (it == m.factors.end()) {
    sink(m, c);
    return;
  }
  // x^k = x^(k-2) * (y^2 + 1) with (x, y) = (csc, cot) or (sec, tan).
  const auto partner = it->kind == TrigKind::Csc ? TrigKind::Cot : TrigKind::Tan;
  TrigMonomial lowered = m;
  auto pos = lowered.factors.begin() + (it - m.factors.begin());
  const std::string edge = pos->edge;
  if (pos->exp == 2) {
    lowered.factors.erase(pos);
  } else {
    pos->exp -= 2;
  }
  reduce_into(lowered, c, sink);
  reduce_into(multiply_raw(lowered, TrigMonomial::of(edge, partner, 0, 2)), c, sink);
}

}  // namespace

TrigSum::TrigSum(const TrigMonomial& m, const AlphaPolynomial& c) { add(m, c); }

void TrigSum::accumulate(const TrigMonomial& m, const AlphaPolynomial& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void TrigSum::add_raw(const TrigMonomial& m, const AlphaPolynomial& c) { accumulate(m, c); }

void TrigSum::add(const TrigMonomial& m, const AlphaPolynomial& c) {
  reduce_into(m, c, [this](const TrigMonomial& r, const AlphaPolynomial& rc) { accumulate(r, rc); });
}

TrigSum& TrigSum::operator+=(const TrigSum& o) {
  for (const auto& [m, c] : o.terms_) accumulate(m, c);
  return *this;
}

TrigSum& TrigSum::operator-=(const TrigSum& o) {
  for (const auto& [m, c] : o.terms_) accumulate(m, -c);
  return *this;
}

TrigSum TrigSum::operator-() const { return scaled(-1); }

TrigSum TrigSum::scaled(const Rational& c) const {
  TrigSum s;
  if (c == 0) return s;
  for (const auto& [m, p] : terms_) s.terms_.emplace(m, p.scaled(c));
  return s;
}

TrigSum TrigSum::operator*(const TrigSum& o) const {
  TrigSum s;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) s.add(multiply_raw(ma, mb), ca * cb);
  }
  return s;
}

std::string TrigSum::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) out << "\n";
    first = false;
    out << '(' << c.to_string() << ") * " << m.to_string();
  }
  return out.str();
}

TrigSum mono_mul(const TrigMonomial& a, const TrigMonomial& b) {
  return TrigSum(multiply_raw(a, b), AlphaPolynomial::constant(1));
}

TrigSum reduce(const TrigSum& s) {
  TrigSum r;
  for (const auto& [m, c] : s.terms()) r.add(m, c);
  return r;
}

// ---------------------------------------------------------------------------

std::complex<double> ipow(std::complex<double> z, int p) {
  std::complex<double> r = 1.0;
  const bool invert = p < 0;
  unsigned n = static_cast<unsigned>(invert ? -p : p);
  while (n) {
    if (n & 1u) r *= z;
    z *= z;
    n >>= 1u;
  }
  return invert ? 1.0 / r : r;
}

std::complex<double> mu_of(double lambda) {
  return lambda >= 0 ? std::complex<double>(std::sqrt(lambda), 0.0)
                     : std::complex<double>(0.0, std::sqrt(-lambda));
}

std::complex<double> eval_factor(TrigKind kind, double length, std::complex<double> mu, double pole_guard) {
  using C = std::complex<double>;
  const C x = mu * length;
  auto guarded = [&](C denom, const char* what) {
    if (std::abs(denom) < pole_guard) {
      throw Error(ErrorCode::PoleProximity, std::string(what) + " vanishes at this lambda");
    }
    return denom;
  };
  switch (kind) {
    case TrigKind::Cot: return std::cos(x) / guarded(std::sin(x), "sin");
    case TrigKind::Csc: return C(1.0) / guarded(std::sin(x), "sin");
    case TrigKind::Tan: return std::sin(x) / guarded(std::cos(x), "cos");
    case TrigKind::Sec: return C(1.0) / guarded(std::cos(x), "cos");
    case TrigKind::TanHalf: return std::sin(x / 2.0) / guarded(std::cos(x / 2.0), "cos(x/2)");
    case TrigKind::CotHalf: return std::cos(x / 2.0) / guarded(std::sin(x / 2.0), "sin(x/2)");
    case TrigKind::CotQuarterShift: {
      const C y = std::numbers::pi / 4.0 + x / 2.0;
      return std::cos(y) / guarded(std::sin(y), "sin(pi/4 + x/2)");
    }
  }
  return {};
}

std::complex<double> eval_complex(const TrigSum& s, const MarkedGraph& g, const CouplingVector& alpha,
                                  std::complex<double> mu, const EvalOptions& opts) {
  std::map<std::string, double> a;
  for (std::size_t i = 0; i < alpha.size(); ++i) a[alpha.ids()[i]] = alpha[i].get_d();
  std::complex<double> total = 0.0;
  for (const auto& [m, c] : s.terms()) {
    if (m.mu_power < 0 && std::abs(mu) == 0.0) throw Error(ErrorCode::PoleProximity, "negative power of mu at 0");
    std::complex<double> t = ipow(mu, m.mu_power);
    for (const auto& f : m.factors) {
      const double l = g.edge(g.edge_index(f.edge)).length;
      t *= ipow(eval_factor(f.kind, l, mu, opts.pole_guard), f.exp);
    }
    total += t * c.evaluate(a);
  }
  return total;
}

double eval(const TrigSum& s, const MarkedGraph& g, const CouplingVector& alpha, double lambda,
            const EvalOptions& opts) {
  const auto z = eval_complex(s, g, alpha, mu_of(lambda), opts);
  if (std::abs(z.imag()) > 1e-9 * (1.0 + std::abs(z.real()))) {
    throw Error(ErrorCode::NonRealEvaluation, "imaginary residue " + std::to_string(z.imag()));
  }
  return z.real();
}

}  // namespace qgraph
