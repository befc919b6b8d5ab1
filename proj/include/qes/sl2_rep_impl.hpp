#pragma once

// Template definitions for sl2_rep.hpp.

namespace qes {

template <class T>
DenseMatrix<T> quadratic_form_matrix(const QuadraticCoefficients<T>& a,
                                     const LinearCoefficients<T>& b,
                                     const RepSpace& space) {
  const GeneratorTriple exact = generator_matrices(space);
  const auto n = static_cast<std::size_t>(space.dim());

  std::array<DenseMatrix<T>, 3> gens;
  for (int g = 0; g < 3; ++g) {
    const auto& src = exact[static_cast<Generator>(g)];
    DenseMatrix<T> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m(i, j) = T(src(i, j).numerator()) / T(src(i, j).denominator());
    gens[static_cast<std::size_t>(g)] = std::move(m);
  }

  DenseMatrix<T> out(n, n);
  for (std::size_t x = 0; x < 3; ++x) {
    if (b[x] != T(0)) out += b[x] * gens[x];
    for (std::size_t y = 0; y < 3; ++y)
      if (a[x][y] != T(0)) out += a[x][y] * (gens[x] * gens[y]);
  }
  return out;
}

}  // namespace qes
