#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace garma {

using Point2 = std::array<double, 2>;

struct Edge {
  std::size_t i;  // 0-based, i < j
  std::size_t j;
  double weight;
};

/// Undirected weighted graph. Each edge is stored once with i < j; node ids
/// are 0-based internally and 1-based in files.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t node_count);

  std::size_t node_count() const noexcept { return node_count_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Adds or overwrites the edge {i, j}. Throws InputError on self-loops,
  /// out-of-range ids or non-positive weights.
  void add_edge(std::size_t i, std::size_t j, double weight = 1.0);
  bool has_edge(std::size_t i, std::size_t j) const;
  std::optional<double> weight(std::size_t i, std::size_t j) const;

  /// Sorted neighbor ids with weights, one list per node.
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency() const;
  std::vector<std::size_t> degrees() const;
  std::vector<double> weighted_degrees() const;
  std::size_t max_degree() const;

  const std::optional<std::vector<Point2>>& positions() const noexcept { return positions_; }
  void set_positions(std::vector<Point2> positions);

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index_;
  std::optional<std::vector<Point2>> positions_;
};

/// Edge list: "i j [w]" per line (1-based), "# pos i x y" coordinate lines,
/// optional "# nodes N" header; other '#' lines are comments.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& graph);

/// Connects every pair of points at Euclidean distance <= range, unit weights.
Graph disk_graph(const std::vector<Point2>& positions, double range);

/// Uniform points in the unit square joined within radius sqrt(2 log N / (pi N)).
/// Redraws until no node is isolated.
Graph random_geometric_graph(std::size_t node_count, std::mt19937_64& rng);

/// Erdos-Renyi style graph with edge probability p and random weights in
/// [0.5, 1.5]; redraws until no node is isolated.
Graph random_graph(std::size_t node_count, double p, std::mt19937_64& rng);

}  // namespace garma
