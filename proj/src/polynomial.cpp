#include "garma/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace garma::poly {

std::vector<Real> derivative(std::span<const Real> c) {
  if (c.size() <= 1) return {0.0L};
  std::vector<Real> d(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<Real>(k) * c[k];
  return d;
}

std::vector<Complex> multiply(std::span<const Complex> p, std::span<const Complex> q) {
  if (p.empty() || q.empty()) return {};
  std::vector<Complex> r(p.size() + q.size() - 1, Complex{});
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

std::vector<Complex> from_reciprocal_roots(std::span<const Complex> roots) {
  std::vector<Complex> p{Complex(1.0L)};
  for (const auto& r : roots) {
    const Complex factor[2] = {Complex(1.0L), -Complex(1.0L) / r};
    p = multiply(p, factor);
  }
  return p;
}

int degree(std::span<const double> c) {
  for (std::size_t k = c.size(); k-- > 0;)
    if (c[k] != 0.0) return static_cast<int>(k);
  return -1;
}

namespace {

// Parlett-Reinsch diagonal balancing, in place.
void balance(Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  constexpr double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0, s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

Complex eval_ext(std::span<const Real> c, Complex z) {
  Complex acc{};
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
  return acc;
}

Complex polish(std::span<const Real> c, std::span<const Real> dc, Complex z, Real max_step) {
  constexpr Real eps = std::numeric_limits<Real>::epsilon();
  Real best = std::abs(eval_ext(c, z));
  for (int it = 0; it < 60; ++it) {
    Complex p = eval_ext(c, z);
    Complex dp = eval_ext(dc, z);
    if (std::abs(dp) == 0.0L) break;
    Complex step = p / dp;
    if (std::abs(step) > max_step) break;
    Complex next = z - step;
    Real val = std::abs(eval_ext(c, next));
    if (val > best) break;
    z = next;
    best = val;
    if (std::abs(step) <= 4 * eps * std::abs(z)) break;
  }
  return z;
}

}  // namespace

std::vector<Complex> roots(std::span<const Real> c) {
  int deg = -1;
  for (std::size_t k = c.size(); k-- > 0;)
    if (c[k] != 0.0L) {
      deg = static_cast<int>(k);
      break;
    }
  if (deg <= 0) return {};

  std::vector<Complex> out;
  // Exact zero roots factor out directly.
  std::size_t lowest = 0;
  while (c[lowest] == 0.0L) {
    out.emplace_back(0.0L);
    ++lowest;
  }
  const int d = deg - static_cast<int>(lowest);
  if (d == 0) return out;

  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
  const Real lead = c[deg];
  // First row holds -c_{d-1}/c_d ... -c_0/c_d.
  for (int k = 0; k < d; ++k) comp(0, k) = static_cast<double>(-c[lowest + d - 1 - k] / lead);
  for (int k = 1; k < d; ++k) comp(k, k - 1) = 1.0;
  balance(comp);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
  if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue solve failed");

  std::vector<Real> reduced(c.begin() + static_cast<std::ptrdiff_t>(lowest), c.begin() + deg + 1);
  auto dred = derivative(reduced);
  std::vector<Complex> est;
  for (Eigen::Index k = 0; k < d; ++k)
    est.emplace_back(static_cast<Real>(solver.eigenvalues()(k).real()), static_cast<Real>(solver.eigenvalues()(k).imag()));
  for (std::size_t k = 0; k < est.size(); ++k) {
    Real gap = std::numeric_limits<Real>::infinity();
    for (std::size_t j = 0; j < est.size(); ++j)
      if (j != k) gap = std::min(gap, std::abs(est[j] - est[k]));
    Real max_step = std::isfinite(gap) ? 0.25L * gap : 1e-3L * (1.0L + std::abs(est[k]));
    out.push_back(polish(reduced, dred, est[k], max_step));
  }
  return out;
}

std::vector<Complex> roots(std::span<const double> c) {
  std::vector<Real> ext(c.begin(), c.end());
  return roots(std::span<const Real>(ext));
}

std::vector<Complex> conjugate_closure(std::vector<Complex> roots, Real tolerance) {
  std::vector<Complex> out;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    const Real scale = std::max(1.0L, std::abs(roots[i]));
    if (std::abs(roots[i].imag()) <= tolerance * scale) {
      out.emplace_back(roots[i].real(), 0.0L);
      used[i] = true;
      continue;
    }
    std::size_t best = roots.size();
    Real best_d = std::numeric_limits<Real>::infinity();
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (used[j]) continue;
      Real d = std::abs(roots[j] - std::conj(roots[i]));
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == roots.size() || best_d > 1e-6L * scale)
      throw NumericalError("non-real root without a conjugate partner");
    Complex avg = 0.5L * (roots[i] + std::conj(roots[best]));
    if (avg.imag() < 0) avg = std::conj(avg);
    out.push_back(avg);
    out.push_back(std::conj(avg));
    used[i] = used[best] = true;
  }
  return out;
}

std::vector<Real> chebyshev_to_monomial(std::span<const double> cheb, double lo, double hi) {
  const Real alpha = 2.0L / (static_cast<Real>(hi) - lo);
  const Real beta = -(static_cast<Real>(lo) + hi) / (static_cast<Real>(hi) - lo);
  const std::size_t n = cheb.size();
  std::vector<Real> out(n, 0.0L);
  if (n == 0) return out;
  std::vector<Real> prev(n, 0.0L), cur(n, 0.0L);
  prev[0] = 1.0L;  // T_0
  out[0] += cheb[0];
  if (n == 1) return out;
  cur[0] = beta;  // T_1 = alpha x + beta
  cur[1] = alpha;
  for (std::size_t j = 0; j < n; ++j) out[j] += cheb[1] * cur[j];
  for (std::size_t k = 2; k < n; ++k) {
    std::vector<Real> next(n, 0.0L);
    for (std::size_t j = 0; j < n; ++j) {
      Real tj = 2.0L * beta * cur[j] - prev[j];
      if (j > 0) tj += 2.0L * alpha * cur[j - 1];
      next[j] = tj;
    }
    for (std::size_t j = 0; j < n; ++j) out[j] += cheb[k] * next[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return out;
}

}  // namespace garma::poly
