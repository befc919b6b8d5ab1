#include "qes/sl2_rep.hpp"

#include <algorithm>

namespace qes {

GeneratorTriple generator_matrices(const RepSpace& space) {
  const auto n = static_cast<std::size_t>(space.dim());
  const Rational j = space.spin();
  GeneratorTriple g{DenseMatrix<Rational>(n, n), DenseMatrix<Rational>(n, n),
                    DenseMatrix<Rational>(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<std::int64_t>(k);
    g.j_zero(k, k) = Rational(kk) - j;
    if (k >= 1) g.j_minus(k - 1, k) = Rational(kk);
    if (k + 1 < n) g.j_plus(k + 1, k) = Rational(2) * j - Rational(kk);
  }
  return g;
}

namespace {

Rational max_abs_entry(const DenseMatrix<Rational>& m) {
  Rational best(0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) best = std::max(best, abs(m(i, j)));
  return best;
}

}  // namespace

Rational commutator_defect(const RepSpace& space) {
  const GeneratorTriple g = generator_matrices(space);
  const auto d1 = commutator(g.j_zero, g.j_plus) - g.j_plus;
  const auto d2 = commutator(g.j_zero, g.j_minus) + g.j_minus;
  const auto d3 = commutator(g.j_plus, g.j_minus) - Rational(2) * g.j_zero;
  return std::max({max_abs_entry(d1), max_abs_entry(d2), max_abs_entry(d3)});
}

DiffOperator<Rational> generator_operator(Generator g, const RepSpace& space) {
  const Rational j = space.spin();
  DiffOperator<Rational> op;
  switch (g) {
    case Generator::Plus:
      op.add(Rational(2) * j, 1, 0).add(Rational(-1), 2, 1);
      break;
    case Generator::Minus:
      op.add(Rational(1), 0, 1);
      break;
    case Generator::Zero:
      op.add(-j, 0, 0).add(Rational(1), 1, 1);
      break;
  }
  return op;
}

}  // namespace qes
