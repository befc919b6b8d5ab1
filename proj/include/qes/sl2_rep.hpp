#pragma once

// Finite-dimensional sl(2) representation on polynomials of degree <= d,
// realised both as exact matrices in the monomial basis {1, r, ..., r^d}
// and as first/second order differential operators.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "qes/dense_matrix.hpp"

namespace qes {

using Rational = boost::rational<std::int64_t>;

inline Rational abs(const Rational& r) { return boost::abs(r); }

/// Dimension N = d + 1 of the representation; spin j = d / 2 is exact.
class RepSpace {
 public:
  explicit RepSpace(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("RepSpace: dimension must be >= 1, got " + std::to_string(dim));
  }
  static RepSpace from_degree(int d) { return RepSpace(d + 1); }

  int dim() const { return dim_; }
  int degree() const { return dim_ - 1; }
  Rational spin() const { return Rational(dim_ - 1, 2); }

 private:
  int dim_;
};

/// Generator index order used everywhere a sum over generators appears.
enum class Generator : int { Plus = 0, Minus = 1, Zero = 2 };

struct GeneratorTriple {
  DenseMatrix<Rational> j_plus;
  DenseMatrix<Rational> j_minus;
  DenseMatrix<Rational> j_zero;

  const DenseMatrix<Rational>& operator[](Generator g) const {
    switch (g) {
      case Generator::Plus: return j_plus;
      case Generator::Minus: return j_minus;
      case Generator::Zero: return j_zero;
    }
    throw std::logic_error("GeneratorTriple: bad index");
  }
};

/// Column k holds the image of r^k: J- r^k = k r^{k-1}, J0 r^k = (k - j) r^k,
/// J+ r^k = (2j - k) r^{k+1}.
GeneratorTriple generator_matrices(const RepSpace& space);

/// Largest absolute entry of [J0,J+]-J+, [J0,J-]+J-, [J+,J-]-2J0.
Rational commutator_defect(const RepSpace& space);

template <class T>
using QuadraticCoefficients = std::array<std::array<T, 3>, 3>;
template <class T>
using LinearCoefficients = std::array<T, 3>;

/// Matrix of sum_{ab} a[a][b] J^a J^b + sum_a b[a] J^a with (+,-,0) ordering.
template <class T>
DenseMatrix<T> quadratic_form_matrix(const QuadraticCoefficients<T>& a,
                                     const LinearCoefficients<T>& b,
                                     const RepSpace& space);

// ---------------------------------------------------------------------------
// Laurent polynomials and differential operators

/// sum_k coeffs[k] r^(lowest_power + k). Negative powers allowed.
template <class T>
struct LaurentPoly {
  int lowest_power = 0;
  std::vector<T> coeffs;

  LaurentPoly() = default;
  explicit LaurentPoly(std::vector<T> c, int lowest = 0)
      : lowest_power(lowest), coeffs(std::move(c)) {}

  static LaurentPoly monomial(int power, T coef = T(1)) {
    return LaurentPoly({coef}, power);
  }

  int highest_power() const { return lowest_power + static_cast<int>(coeffs.size()) - 1; }

  T coefficient(int power) const {
    const int k = power - lowest_power;
    if (k < 0 || k >= static_cast<int>(coeffs.size())) return T(0);
    return coeffs[static_cast<std::size_t>(k)];
  }

  void add(int power, const T& value) {
    if (coeffs.empty()) {
      lowest_power = power;
      coeffs.assign(1, T(0));
    }
    if (power < lowest_power) {
      coeffs.insert(coeffs.begin(), static_cast<std::size_t>(lowest_power - power), T(0));
      lowest_power = power;
    }
    const auto k = static_cast<std::size_t>(power - lowest_power);
    if (k >= coeffs.size()) coeffs.resize(k + 1, T(0));
    coeffs[k] += value;
  }

  /// Highest power with a nonzero coefficient; lowest_power - 1 if zero.
  int degree() const {
    for (int p = highest_power(); p >= lowest_power; --p)
      if (coefficient(p) != T(0)) return p;
    return lowest_power - 1;
  }
  bool is_zero() const { return degree() < lowest_power; }

  /// Dense coefficient list [c_0, ..., c_n] for a polynomial with no
  /// negative powers; throws otherwise.
  std::vector<T> dense() const {
    std::vector<T> out;
    const int top = degree();
    for (int p = lowest_power; p < 0; ++p)
      if (coefficient(p) != T(0)) throw std::domain_error("LaurentPoly::dense: negative power present");
    for (int p = 0; p <= top; ++p) out.push_back(coefficient(p));
    return out;
  }
};

/// One term c * r^power * d^order/dr^order.
template <class T>
struct DiffTerm {
  T coef;
  int power;
  int order;
};

template <class T>
struct DiffOperator {
  std::vector<DiffTerm<T>> terms;

  DiffOperator& add(T coef, int power, int order) {
    if (power < -2) throw std::invalid_argument("DiffOperator: power below -2");
    if (order < 0 || order > 2) throw std::invalid_argument("DiffOperator: derivative order must be 0, 1 or 2");
    terms.push_back({coef, power, order});
    return *this;
  }
};

/// Applies every term exactly; no truncation of the result.
template <class T>
LaurentPoly<T> apply_diff_operator(const DiffOperator<T>& op, const LaurentPoly<T>& poly) {
  LaurentPoly<T> out;
  for (int k = poly.lowest_power; k <= poly.highest_power(); ++k) {
    const T a = poly.coefficient(k);
    if (a == T(0)) continue;
    for (const auto& t : op.terms) {
      // d^order r^k = k (k-1) ... r^(k-order)
      T falling(1);
      for (int i = 0; i < t.order; ++i) falling *= T(k - i);
      if (falling == T(0)) continue;
      out.add(k - t.order + t.power, t.coef * falling * a);
    }
  }
  if (out.coeffs.empty()) out = LaurentPoly<T>({T(0)}, 0);
  return out;
}

template <class T>
LaurentPoly<T> apply_diff_operator(const DiffOperator<T>& op, const std::vector<T>& poly) {
  return apply_diff_operator(op, LaurentPoly<T>(poly, 0));
}

/// Differential forms J+ = 2j r - r^2 d, J- = d, J0 = -j + r d.
DiffOperator<Rational> generator_operator(Generator g, const RepSpace& space);

}  // namespace qes

#include "qes/sl2_rep_impl.hpp"
