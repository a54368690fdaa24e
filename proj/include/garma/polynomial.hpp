#pragma once

#include <span>
#include <vector>

#include "garma/numeric.hpp"

// Polynomials are stored as ascending coefficient vectors: c[0] + c[1] x + ...

namespace garma::poly {

template <class Coeff, class X>
auto horner(std::span<const Coeff> c, X x) {
  using R = decltype(Coeff{} * x);
  R acc{};
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

template <class X>
Complex eval(std::span<const double> c, X x) {
  Complex acc{};
  const Complex z(x);
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + static_cast<Real>(c[k]);
  return acc;
}

std::vector<Real> derivative(std::span<const Real> c);
std::vector<Complex> multiply(std::span<const Complex> p, std::span<const Complex> q);
/// prod_k (1 - x / root_k); constant term 1.
std::vector<Complex> from_reciprocal_roots(std::span<const Complex> roots);

/// Degree ignoring exactly-zero leading coefficients; -1 for the zero polynomial.
int degree(std::span<const double> c);

/// All roots of the polynomial: eigenvalues of the balanced companion matrix,
/// then Newton-polished in extended precision against the given coefficients.
std::vector<Complex> roots(std::span<const double> c);
std::vector<Complex> roots(std::span<const Real> c);

/// Snaps nearly-real roots to the real axis and makes non-real roots exact
/// conjugate pairs. Throws NumericalError when a root has no partner.
std::vector<Complex> conjugate_closure(std::vector<Complex> roots, Real tolerance = 1e-9L);

/// Monomial coefficients of sum_k c_k T_k(t), t = (2x - (lo + hi)) / (hi - lo).
std::vector<Real> chebyshev_to_monomial(std::span<const double> cheb, double lo, double hi);

}  // namespace garma::poly
