#include "garma/shift_operator.hpp"

#include <algorithm>
#include <cmath>

#include "garma/numeric.hpp"

namespace garma {

OperatorVariant parse_variant(const std::string& name) {
  if (name == "discrete" || name == "discrete_laplacian") return OperatorVariant::discrete_laplacian;
  if (name == "normalized" || name == "normalized_laplacian") return OperatorVariant::normalized_laplacian;
  if (name == "custom" || name == "custom_symmetric_1local") return OperatorVariant::custom_symmetric_1local;
  throw InputError("unknown operator variant '" + name + "'");
}

std::string to_string(OperatorVariant variant) {
  switch (variant) {
    case OperatorVariant::discrete_laplacian: return "discrete_laplacian";
    case OperatorVariant::normalized_laplacian: return "normalized_laplacian";
    case OperatorVariant::custom_symmetric_1local: return "custom_symmetric_1local";
  }
  return "unknown";
}

double SpectralInterval::radius() const { return std::max(std::abs(mu_min()), std::abs(mu_max())); }

SpectralInterval default_interval(const Graph& graph, OperatorVariant variant) {
  switch (variant) {
    case OperatorVariant::normalized_laplacian: return {0.0, 2.0};
    case OperatorVariant::discrete_laplacian: {
      // Weighted degree keeps the bound valid for non-unit weights. An edgeless
      // graph still needs a non-degenerate interval.
      double dmax = 0.0;
      for (double d : graph.weighted_degrees()) dmax = std::max(dmax, d);
      return {0.0, 2.0 * (dmax > 0.0 ? dmax : 1.0)};
    }
    case OperatorVariant::custom_symmetric_1local: break;
  }
  throw InputError("custom operators require an explicit spectral interval");
}

namespace {

void check_interval(const SpectralInterval& iv) {
  if (!(iv.lambda_max > iv.lambda_min) || !std::isfinite(iv.lambda_min) || !std::isfinite(iv.lambda_max))
    throw InputError("spectral interval must satisfy lambda_min < lambda_max");
}

ShiftOperator finish(OperatorVariant variant, Eigen::MatrixXd L, SpectralInterval iv) {
  check_interval(iv);
  ShiftOperator op;
  op.variant = variant;
  const auto n = L.rows();
  op.M = iv.translation() * Eigen::MatrixXd::Identity(n, n) - L;
  op.L = std::move(L);
  op.interval = iv;
  return op;
}

}  // namespace

ShiftOperator build_shift_operator(const Graph& graph, OperatorVariant variant,
                                   std::optional<SpectralInterval> interval) {
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  switch (variant) {
    case OperatorVariant::discrete_laplacian:
      for (const auto& e : graph.edges()) {
        L(e.i, e.j) -= e.weight;
        L(e.j, e.i) -= e.weight;
        L(e.i, e.i) += e.weight;
        L(e.j, e.j) += e.weight;
      }
      break;
    case OperatorVariant::normalized_laplacian: {
      auto deg = graph.weighted_degrees();
      for (std::size_t i = 0; i < deg.size(); ++i)
        if (!(deg[i] > 0.0)) throw InputError("normalized Laplacian undefined: node " + std::to_string(i + 1) + " is isolated");
      for (Eigen::Index i = 0; i < n; ++i) L(i, i) = 1.0;
      for (const auto& e : graph.edges()) {
        double v = e.weight / std::sqrt(deg[e.i] * deg[e.j]);
        L(e.i, e.j) = -v;
        L(e.j, e.i) = -v;
      }
      break;
    }
    case OperatorVariant::custom_symmetric_1local:
      throw InputError("custom operators are built with build_custom_operator");
  }
  return finish(variant, std::move(L), interval.value_or(default_interval(graph, variant)));
}

ShiftOperator build_custom_operator(const Graph& graph, const Eigen::MatrixXd& L, SpectralInterval interval) {
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  if (L.rows() != n || L.cols() != n) throw InputError("custom operator dimension does not match the graph");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (L(i, j) != L(j, i)) throw InputError("custom operator is not symmetric");
      if (L(i, j) != 0.0 && !graph.has_edge(i, j)) throw InputError("custom operator is not 1-local");
    }
  }
  return finish(OperatorVariant::custom_symmetric_1local, L, interval);
}

}  // namespace garma
