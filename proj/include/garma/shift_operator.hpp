#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "garma/graph.hpp"

namespace garma {

enum class OperatorVariant { discrete_laplacian, normalized_laplacian, custom_symmetric_1local };

OperatorVariant parse_variant(const std::string& name);
std::string to_string(OperatorVariant variant);

/// Universal bounds [lambda_min, lambda_max] on the spectrum of L over every
/// graph the filter is meant to run on.
struct SpectralInterval {
  double lambda_min = 0.0;
  double lambda_max = 2.0;

  /// Translation constant of M = c I - L, c = (lambda_max - lambda_min) / 2.
  double translation() const { return 0.5 * (lambda_max - lambda_min); }
  double mu_min() const { return translation() - lambda_max; }
  double mu_max() const { return translation() - lambda_min; }
  /// Largest |mu| over the interval; the stability radius of the recursions.
  double radius() const;
};

/// Default universal interval: normalized -> [0, 2], discrete -> [0, 2 * max_degree].
/// Custom operators have no default and throw.
SpectralInterval default_interval(const Graph& graph, OperatorVariant variant);

struct ShiftOperator {
  OperatorVariant variant = OperatorVariant::discrete_laplacian;
  Eigen::MatrixXd L;
  SpectralInterval interval;
  Eigen::MatrixXd M;  // translation() * I - L

  std::size_t size() const { return static_cast<std::size_t>(L.rows()); }
};

/// Assembles L for the variant (D - W or I - D^-1/2 W D^-1/2) and its translate M.
ShiftOperator build_shift_operator(const Graph& graph, OperatorVariant variant,
                                   std::optional<SpectralInterval> interval = std::nullopt);

/// Wraps a caller-supplied matrix; it must be symmetric and vanish off the edges.
ShiftOperator build_custom_operator(const Graph& graph, const Eigen::MatrixXd& L, SpectralInterval interval);

}  // namespace garma
