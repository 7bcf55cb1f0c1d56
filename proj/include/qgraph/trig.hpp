#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/rational.hpp"

namespace qgraph {

/// Trigonometric function of an edge's argument mu*l:
/// cot(mu l), csc(mu l), tan(mu l), sec(mu l), tan(mu l/2), cot(mu l/2),
/// cot(pi/4 + mu l/2). The last one only arises for quasigraphs.
enum class TrigKind : std::uint8_t { Cot, Csc, Tan, Sec, TanHalf, CotHalf, CotQuarterShift };

std::string_view to_string(TrigKind k);
TrigKind trig_kind_from_string(std::string_view s);

struct TrigFactor {
  std::string edge;
  TrigKind kind = TrigKind::Cot;
  int exp = 1;

  auto operator<=>(const TrigFactor&) const = default;
};

/// mu^mu_power times a product of per-edge trigonometric factors. Factors are
/// kept sorted by (edge id, kind) with positive exponents.
struct TrigMonomial {
  int mu_power = 0;
  std::vector<TrigFactor> factors;

  static TrigMonomial mu(int power) { return {power, {}}; }
  static TrigMonomial of(std::string edge, TrigKind kind, int mu_power = 0, int exp = 1) {
    return {mu_power, {{std::move(edge), kind, exp}}};
  }

  /// Every exponent is 1 and no edge carries two kinds.
  bool is_square_free() const;
  std::string to_string() const;

  auto operator<=>(const TrigMonomial&) const = default;
};

/// Multilinear polynomial in the coupling constants with exact rational
/// coefficients. Keys are sorted sets of vertex ids; the empty key is the
/// constant term.
class AlphaPolynomial {
 public:
  using Key = std::vector<std::string>;

  AlphaPolynomial() = default;
  static AlphaPolynomial constant(const Rational& c);
  static AlphaPolynomial variable(std::string vertex_id, const Rational& coeff = 1);

  const std::map<Key, Rational>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  Rational constant_term() const;
  AlphaPolynomial without_constant() const;

  /// Adds c * (product of vars); zero results are dropped.
  void add_term(const Key& vars, const Rational& c);

  AlphaPolynomial& operator+=(const AlphaPolynomial& o);
  AlphaPolynomial& operator-=(const AlphaPolynomial& o);
  AlphaPolynomial operator-() const;
  AlphaPolynomial scaled(const Rational& c) const;
  /// Throws Error(NonMultilinear) when a variable would be squared.
  AlphaPolynomial operator*(const AlphaPolynomial& o) const;

  Rational evaluate(const CouplingVector& alpha) const;
  double evaluate(const std::map<std::string, double>& alpha) const;

  std::string to_string() const;

  bool operator==(const AlphaPolynomial& o) const { return terms_ == o.terms_; }

 private:
  std::map<Key, Rational> terms_;
};

inline AlphaPolynomial operator+(AlphaPolynomial a, const AlphaPolynomial& b) { return a += b; }
inline AlphaPolynomial operator-(AlphaPolynomial a, const AlphaPolynomial& b) { return a -= b; }

/// Finite sum of monomials with AlphaPolynomial coefficients. All public
/// operations return canonical (reduced) sums: csc^2 and sec^2 are rewritten
/// as cot^2 + 1 and tan^2 + 1, like monomials are merged and zero
/// coefficients dropped.
class TrigSum {
 public:
  using Terms = std::map<TrigMonomial, AlphaPolynomial>;

  TrigSum() = default;
  TrigSum(const TrigMonomial& m, const AlphaPolynomial& c);
  static TrigSum constant(const Rational& c) { return TrigSum(TrigMonomial{}, AlphaPolynomial::constant(c)); }

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  /// Inserts without applying the Pythagorean rewrites (used to build
  /// unreduced inputs for `reduce`).
  void add_raw(const TrigMonomial& m, const AlphaPolynomial& c);
  /// Inserts the reduced form of c*m.
  void add(const TrigMonomial& m, const AlphaPolynomial& c);

  TrigSum& operator+=(const TrigSum& o);
  TrigSum& operator-=(const TrigSum& o);
  TrigSum operator-() const;
  TrigSum operator*(const TrigSum& o) const;
  TrigSum scaled(const Rational& c) const;

  std::string to_string() const;

  bool operator==(const TrigSum& o) const { return terms_ == o.terms_; }

 private:
  void accumulate(const TrigMonomial& m, const AlphaPolynomial& c);
  Terms terms_;
};

inline TrigSum operator+(TrigSum a, const TrigSum& b) { return a += b; }
inline TrigSum operator-(TrigSum a, const TrigSum& b) { return a -= b; }

/// Product of two monomials, fully reduced.
TrigSum mono_mul(const TrigMonomial& a, const TrigMonomial& b);

/// Applies csc^2 = cot^2 + 1 and sec^2 = tan^2 + 1 until no csc or sec
/// exponent >= 2 remains, then merges like terms.
TrigSum reduce(const TrigSum& s);

struct EvalOptions {
  double pole_guard = 1e-12;  // minimum |sin| or |cos| in a factor's denominator
};

/// Integer power by repeated squaring (z^0 == 1 for every z).
std::complex<double> ipow(std::complex<double> z, int p);

/// mu for a real lambda on the branch Im(mu) >= 0.
std::complex<double> mu_of(double lambda);

/// Value of one trigonometric factor at a (complex) mu. Throws PoleProximity.
std::complex<double> eval_factor(TrigKind kind, double length, std::complex<double> mu, double pole_guard);

/// Complex value of the sum; edge lengths come from `g`, couplings from alpha.
std::complex<double> eval_complex(const TrigSum& s, const MarkedGraph& g, const CouplingVector& alpha,
                                  std::complex<double> mu, const EvalOptions& opts = {});

/// Real value at lambda (mu = i sqrt|lambda| for lambda < 0). Throws
/// PoleProximity or NonRealEvaluation.
double eval(const TrigSum& s, const MarkedGraph& g, const CouplingVector& alpha, double lambda,
            const EvalOptions& opts = {});

}  // namespace qgraph
