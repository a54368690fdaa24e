#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "garma/numeric.hpp"
#include "garma/response.hpp"

namespace garma {

/// Uniform grid with trapezoid weights; discretizes the integral objectives.
struct Grid {
  std::vector<double> x;
  std::vector<double> w;
};
Grid uniform_grid(double lo, double hi, std::size_t size);

inline constexpr std::size_t kDefaultGridSize = 1000;

/// h_0 I + sum_k h_k L^k.
struct FirDesign {
  std::vector<double> h;
  SpectralInterval interval;
  std::size_t order() const { return h.empty() ? 0 : h.size() - 1; }
};

/// g(mu) = (sum_{k<K} b_k mu^k) / (1 + sum_{k=1}^{K} a_k mu^k); a[k-1] holds a_k.
struct RationalDesign {
  std::vector<double> b;
  std::vector<double> a;
  SpectralInterval interval;
  std::size_t order() const { return a.size(); }
};

struct ParallelBranch {
  Complex psi;
  Complex phi;
  Complex pole() const { return Real(1) / psi; }
  Complex residue() const { return -phi / psi; }
};

/// Sum of first-order recursions y <- psi M y + phi x; response sum_k r_k / (mu - p_k).
struct ParallelForm {
  std::vector<ParallelBranch> branches;
  SpectralInterval interval;
  std::size_t order() const { return branches.size(); }
};

/// y_{t+1} = (theta_t I + psi_t M) y_t + phi_t x with period K, theta = (0, 1, ..., 1).
struct PeriodicForm {
  std::vector<Real> theta;
  std::vector<Complex> psi;
  std::vector<Complex> phi;
  SpectralInterval interval;
  std::size_t period() const { return psi.size(); }
};

struct StabilityReport {
  std::vector<Complex> poles;
  std::vector<double> margins;  // |pole| - radius
  double radius = 0.0;
  double eps = 1e-6;
  bool stable = true;
};

/// Per-period contraction of a periodic recursion: A(mu) = prod_t (theta_t + psi_t mu).
struct PeriodicStability {
  double endpoint_product = 0.0;  // |A(radius)|, the classic single-point constraint
  double sup_contraction = 0.0;   // max |A(mu)| over the mu interval
  bool stable = false;
};

struct DesignOptions {
  std::size_t grid_size = kDefaultGridSize;
  std::optional<std::size_t> prefit_order;  // K_hat, default K + 1
  std::size_t max_prefit_extra = 5;         // retries up to K + 5
  double eps_stab = 1e-6;
  double eps_sep = 1e-8;
  double reflect_delta = 0.05;
  double agreement_tol = 1e-6;
};

// ---- FIR and rational fitting -------------------------------------------

/// Least-squares polynomial in lambda on a trapezoid-weighted uniform lambda grid.
FirDesign design_fir(const DesiredResponse& response, std::size_t order, std::size_t grid_size = kDefaultGridSize);

/// Degree-K_hat weighted least-squares fit in the Chebyshev basis on [lo, hi];
/// returned as monomial coefficients in mu.
std::vector<double> chebyshev_prefit(const std::function<double(double)>& g, double lo, double hi,
                                     std::size_t prefit_order, std::size_t grid_size = kDefaultGridSize);

/// Denominator a_1..a_K from p_a * g_hat = p_b: coefficients of degree K..K_hat of
/// the product are driven to zero (minimum-norm least squares). `scale` normalizes
/// the variable (mu / scale) before solving.
std::vector<double> shank_step1_denominator(std::span<const double> g_hat, std::size_t order, double scale = 1.0);

/// Numerator b_0..b_{K-1} minimizing the grid objective with p_a fixed.
std::vector<double> shank_step2_numerator(const std::function<double(double)>& g, double lo, double hi,
                                          std::span<const double> a, std::size_t order,
                                          std::size_t grid_size = kDefaultGridSize, double scale = 1.0);

/// Per-period state multiplier prod_t (theta_t + psi_t mu).
Complex periodic_product(const PeriodicForm& form, Real mu);

StabilityReport check_stability_rational(const RationalDesign& design, double eps_stab = 1e-6);
PeriodicStability check_stability_periodic(const PeriodicForm& form, std::size_t grid_size = kDefaultGridSize);
/// Same quantity computed from the denominator: A(mu) = 1 - p_a(mu).
PeriodicStability periodic_stability_of(const RationalDesign& design, std::size_t grid_size = kDefaultGridSize);

ParallelForm to_parallel(const RationalDesign& design, double eps_sep = 1e-8, double agreement_tol = 1e-6);
PeriodicForm to_periodic(const RationalDesign& design, double agreement_tol = 1e-6);

/// First-order filter y <- psi M y + phi x as a one-branch parallel form.
ParallelForm arma1_form(Complex psi, Complex phi, SpectralInterval interval);

// ---- response evaluation --------------------------------------------------

Complex evaluate_response(const RationalDesign& design, double mu);
Complex evaluate_response(const ParallelForm& form, double mu);
Complex evaluate_response(const PeriodicForm& form, double mu);
/// FIR is a polynomial in lambda; evaluated at lambda = c - mu.
Complex evaluate_response(const FirDesign& design, double mu);

template <class Design>
std::vector<Complex> evaluate_response(const Design& design, std::span<const double> mu_grid) {
  std::vector<Complex> out;
  out.reserve(mu_grid.size());
  for (double mu : mu_grid) out.push_back(evaluate_response(design, mu));
  return out;
}

/// sqrt(sum_i w_i |g(mu_i) - g*(mu_i)|^2) on the design grid.
template <class Design>
double l2_error(const Design& design, const MuResponse& target, std::size_t grid_size = kDefaultGridSize) {
  Grid grid = uniform_grid(target.mu_min, target.mu_max, grid_size);
  Real acc = 0;
  for (std::size_t i = 0; i < grid.x.size(); ++i) {
    Real e = std::abs(evaluate_response(design, grid.x[i]) - Complex(target(grid.x[i])));
    acc += grid.w[i] * e * e;
  }
  return static_cast<double>(std::sqrt(acc));
}

/// max_i |f_i - g_i| / max_i |g_i|.
double relative_sup_difference(std::span<const Complex> f, std::span<const Complex> g);

// ---- full pipeline --------------------------------------------------------

struct ArmaDesign {
  RationalDesign rational;
  ParallelForm parallel;
  PeriodicForm periodic;
  StabilityReport stability;
  PeriodicStability periodic_stability;
  std::size_t prefit_order_used = 0;
  /// "none", or the fallback that produced the design ("reflect+scale(s)").
  std::string fallback = "none";
  double l2_error = 0.0;
};

/// Two-step rational fit followed by stability checks and conversion to both
/// implementation forms. Never returns a design that fails a check; throws
/// DesignError naming the failing stage instead.
ArmaDesign design_arma(const DesiredResponse& response, std::size_t order, const DesignOptions& options = {});

}  // namespace garma
