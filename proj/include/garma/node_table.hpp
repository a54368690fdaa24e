#pragma once

#include <cstddef>
#include <vector>

#include "garma/graph.hpp"
#include "garma/shift_operator.hpp"

namespace garma {

/// Per-node view of the translated operator M in CSR layout. Row i lists the
/// neighbors of node i in ascending order with their M_ij; self_weight holds
/// M_ii. This is all a node knows about the graph.
struct NodeTable {
  std::vector<std::size_t> row_ptr;  // size N + 1
  std::vector<std::size_t> col;
  std::vector<double> weight;
  std::vector<double> self_weight;
  double translation = 0.0;  // c in M = c I - L

  std::size_t node_count() const { return self_weight.size(); }
  std::size_t degree(std::size_t i) const { return row_ptr[i + 1] - row_ptr[i]; }
  std::size_t directed_edge_count() const { return col.size(); }
};

/// Local M entries for a Laplacian variant, computed from neighbor weights
/// only (no dense matrix).
NodeTable build_node_table(const Graph& graph, OperatorVariant variant, SpectralInterval interval);

/// Table from an assembled operator; off-diagonal entries are read on the
/// graph's edges only.
NodeTable build_node_table(const Graph& graph, const ShiftOperator& op);

}  // namespace garma
