#include "garma/node_table.hpp"

#include <cmath>

#include "garma/numeric.hpp"

namespace garma {

namespace {

NodeTable skeleton(const Graph& graph, double translation) {
  const auto adj = graph.adjacency();
  NodeTable t;
  t.translation = translation;
  t.row_ptr.assign(1, 0);
  for (const auto& row : adj) {
    for (const auto& [j, w] : row) {
      t.col.push_back(j);
      t.weight.push_back(w);
    }
    t.row_ptr.push_back(t.col.size());
  }
  t.self_weight.assign(graph.node_count(), translation);
  return t;
}

}  // namespace

NodeTable build_node_table(const Graph& graph, OperatorVariant variant, SpectralInterval interval) {
  NodeTable t = skeleton(graph, interval.translation());
  const std::size_t n = graph.node_count();
  const auto deg = graph.weighted_degrees();
  switch (variant) {
    case OperatorVariant::discrete_laplacian:
      // M_ij = w_ij, M_ii = c - d_i
      for (std::size_t i = 0; i < n; ++i) t.self_weight[i] -= deg[i];
      break;
    case OperatorVariant::normalized_laplacian:
      // M_ij = w_ij / sqrt(d_i d_j), M_ii = c - 1
      for (std::size_t i = 0; i < n; ++i) {
        if (!(deg[i] > 0.0))
          throw InputError("normalized Laplacian undefined: node " + std::to_string(i + 1) + " is isolated");
        t.self_weight[i] -= 1.0;
        for (std::size_t e = t.row_ptr[i]; e < t.row_ptr[i + 1]; ++e)
          t.weight[e] /= std::sqrt(deg[i] * deg[t.col[e]]);
      }
      break;
    case OperatorVariant::custom_symmetric_1local:
      throw InputError("custom operators need an assembled matrix");
  }
  return t;
}

NodeTable build_node_table(const Graph& graph, const ShiftOperator& op) {
  if (op.size() != graph.node_count()) throw InputError("operator size does not match the graph");
  NodeTable t = skeleton(graph, op.interval.translation());
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    t.self_weight[i] = op.M(ii, ii);
    for (std::size_t e = t.row_ptr[i]; e < t.row_ptr[i + 1]; ++e) t.weight[e] = op.M(ii, static_cast<Eigen::Index>(t.col[e]));
  }
  return t;
}

}  // namespace garma
