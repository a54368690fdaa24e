#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "garma/polynomial.hpp"

using namespace garma;

namespace {

bool contains_root(const std::vector<Complex>& roots, Complex r, Real tol) {
  return std::any_of(roots.begin(), roots.end(), [&](Complex x) { return std::abs(x - r) < tol; });
}

}  // namespace

TEST_CASE("horner evaluates ascending coefficients") {
  const std::vector<double> c{1.0, -2.0, 3.0};
  CHECK(poly::horner(std::span<const double>(c), 2.0) == doctest::Approx(9.0));
  CHECK(poly::eval(std::span<const double>(c), Real(-1)).real() == doctest::Approx(6.0));
}

TEST_CASE("derivative and degree") {
  const std::vector<Real> c{5, 3, 0, 2};
  auto d = poly::derivative(c);
  REQUIRE(d.size() == 3);
  CHECK(d[0] == 3);
  CHECK(d[1] == 0);
  CHECK(d[2] == 6);
  const std::vector<double> z{1.0, 2.0, 0.0, 0.0};
  CHECK(poly::degree(z) == 1);
  CHECK(poly::degree(std::vector<double>{0.0}) == -1);
}

TEST_CASE("from_reciprocal_roots has constant term one and the given roots") {
  const std::vector<Complex> roots{Complex(2), Complex(-3), Complex(1, 1), Complex(1, -1)};
  auto p = poly::from_reciprocal_roots(roots);
  REQUIRE(p.size() == 5);
  CHECK(std::abs(p[0] - Complex(1)) < 1e-15L);
  for (auto r : roots) {
    Complex acc{};
    for (std::size_t k = p.size(); k-- > 0;) acc = acc * r + p[k];
    CHECK(std::abs(acc) < 1e-14L);
  }
}

TEST_CASE("roots of products of known factors, randomized") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 7;
    std::vector<Complex> expected;
    while (static_cast<int>(expected.size()) < n) {
      if (n - expected.size() >= 2 && trial % 2 == 0) {
        Complex r(u(rng), 0.2 + std::abs(u(rng)));
        expected.push_back(r);
        expected.push_back(std::conj(r));
      } else {
        double v = u(rng);
        if (std::abs(v) < 0.2) v += 0.5;
        expected.push_back(Complex(v));
      }
    }
    auto pc = poly::from_reciprocal_roots(expected);
    std::vector<Real> coeffs;
    for (auto c : pc) coeffs.push_back(c.real());
    auto found = poly::roots(std::span<const Real>(coeffs));
    REQUIRE(found.size() == expected.size());
    for (auto r : expected) CHECK(contains_root(found, r, 1e-8L * (1 + std::abs(r))));
  }
}

TEST_CASE("conjugate closure snaps and pairs") {
  std::vector<Complex> r{Complex(1, 1e-14L), Complex(2, 3), Complex(2, -3 + 1e-13L)};
  auto c = poly::conjugate_closure(r);
  REQUIRE(c.size() == 3);
  CHECK(c[0].imag() == 0);
  bool paired = std::any_of(c.begin(), c.end(), [&](Complex x) { return x == std::conj(c[1]); }) ||
                std::any_of(c.begin(), c.end(), [&](Complex x) { return x == std::conj(c[2]); });
  CHECK(paired);
  CHECK_THROWS_AS(poly::conjugate_closure({Complex(1, 1)}), NumericalError);
}

TEST_CASE("chebyshev series to monomials matches direct evaluation") {
  const std::vector<double> cheb{0.5, -1.0, 0.25, 2.0, -0.75};
  const double lo = -1.0, hi = 3.0;
  auto mono = poly::chebyshev_to_monomial(cheb, lo, hi);
  for (double x = lo; x <= hi; x += 0.1) {
    const double t = (2 * x - (lo + hi)) / (hi - lo);
    double direct = 0;
    for (std::size_t k = 0; k < cheb.size(); ++k) direct += cheb[k] * std::cos(k * std::acos(std::clamp(t, -1.0, 1.0)));
    Real acc = 0;
    for (std::size_t k = mono.size(); k-- > 0;) acc = acc * x + mono[k];
    CHECK(static_cast<double>(acc) == doctest::Approx(direct).epsilon(1e-12));
  }
}
