#pragma once

// Template definitions for qes_core.hpp. The closed-form matrix mirrors the
// accumulation order of apply_diff_operator so both agree bit-for-bit in
// floating point as well as in exact arithmetic.

namespace qes {

template <class T>
DiffOperator<T> canonical_operator(const CanonicalCoefficients<T>& k) {
  DiffOperator<T> op;
  const T d(k.d);
  switch (k.family) {
    case Family::I:
    case Family::II: {
      const T kappa = k.family == Family::I ? T(1) + T(2) * k.xi : T(1) + k.xi;
      op.add(T(-1), 1, 2)
          .add(T(1), 2, 1)
          .add(k.beta, 1, 1)
          .add(-kappa, 0, 1)
          .add(-d, 1, 0);
      break;
    }
    case Family::III: {
      const T two_gamma = T(2) * k.gamma;
      op.add(T(-1), 2, 2)
          .add(two_gamma, 2, 1)
          .add(k.beta + d - T(2), 1, 1)
          .add(-(T(2) * k.alpha), 0, 1)
          .add(-(two_gamma * d), 1, 0);
      break;
    }
  }
  return op;
}

template <class T>
DenseMatrix<T> canonical_block_matrix(const CanonicalCoefficients<T>& k) {
  const auto n = static_cast<std::size_t>(k.d + 1);
  DenseMatrix<T> m(n, n);
  const T d(k.d);
  for (std::size_t col = 0; col < n; ++col) {
    const T kk(static_cast<int>(col));
    const T falling2 = T(1) * kk * (kk - T(1));
    switch (k.family) {
      case Family::I:
      case Family::II: {
        const T kappa = k.family == Family::I ? T(1) + T(2) * k.xi : T(1) + k.xi;
        if (col >= 1) m(col - 1, col) = T(0) + T(-1) * falling2 + (-kappa) * kk;
        m(col, col) = T(0) + k.beta * kk;
        if (col + 1 < n) m(col + 1, col) = T(0) + T(1) * kk + (-d);
        break;
      }
      case Family::III: {
        const T two_gamma = T(2) * k.gamma;
        if (col >= 1) m(col - 1, col) = T(0) + (-(T(2) * k.alpha)) * kk;
        m(col, col) = T(0) + T(-1) * falling2 + (k.beta + d - T(2)) * kk;
        if (col + 1 < n) m(col + 1, col) = T(0) + two_gamma * kk + (-(two_gamma * d));
        break;
      }
    }
  }
  return m;
}

template <class T>
InvarianceCertificate<T> check_invariance(const DiffOperator<T>& op, int d) {
  InvarianceCertificate<T> cert;
  cert.degree = d;
  for (int k = 0; k <= d; ++k) {
    const LaurentPoly<T> image = apply_diff_operator(op, LaurentPoly<T>::monomial(k));
    cert.top_coefficients.push_back(image.coefficient(k + 1));
    if (!cert.invariant) continue;
    for (int p = image.lowest_power; p <= image.highest_power(); ++p) {
      if ((p < 0 || p > d) && image.coefficient(p) != T(0)) {
        cert.invariant = false;
        cert.offending_k = k;
        cert.offending_power = p;
        cert.offending_coefficient = image.coefficient(p);
        break;
      }
    }
  }
  return cert;
}

}  // namespace qes
