#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "garma/shift_operator.hpp"

namespace garma {

struct GraphSignal {
  std::vector<double> values;
  std::size_t timestamp = 0;
};

struct Spectrum {
  Eigen::VectorXd lambda;  // ascending
  Eigen::VectorXd mu;      // translation - lambda
  Eigen::MatrixXd basis;   // orthonormal eigenvectors as columns
  /// Set when some eigenvalue escapes the operator's declared interval.
  std::optional<std::string> interval_warning;

  std::size_t size() const { return static_cast<std::size_t>(lambda.size()); }
};

inline constexpr std::size_t kDenseDecompositionCap = 5000;

/// Dense symmetric eigendecomposition. Eigenvectors are signed so their first
/// entry above 1e-12 in magnitude is positive.
Spectrum eigendecompose(const ShiftOperator& op, std::size_t cap = kDenseDecompositionCap);

std::vector<double> gft_forward(std::span<const double> signal, const Spectrum& spectrum);
std::vector<double> gft_inverse(std::span<const double> coeffs, const Spectrum& spectrum);

enum class FrequencyVariable { mu, lambda };

/// sum_n g(freq_n) xhat_n phi_n. Throws NumericalError if g is not finite at
/// some eigenvalue.
std::vector<double> apply_filter_exact(std::span<const double> signal, const Spectrum& spectrum,
                                       const std::function<double(double)>& response,
                                       FrequencyVariable variable = FrequencyVariable::mu);

/// Empirical gain <y, phi_n> / <x, phi_n>; entries whose input coefficient is
/// below `relative_tolerance * ||x||` are left empty.
std::vector<std::optional<double>> measure_response(std::span<const double> output, std::span<const double> input,
                                                    const Spectrum& spectrum, double relative_tolerance = 1e-10);

}  // namespace garma
