#include "garma/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "garma/numeric.hpp"

namespace garma {

Graph::Graph(std::size_t node_count) : node_count_(node_count) {
  if (node_count == 0) throw InputError("graph must have at least one node");
}

void Graph::add_edge(std::size_t i, std::size_t j, double weight) {
  if (i == j) throw InputError("self-loop at node " + std::to_string(i + 1));
  if (i >= node_count_ || j >= node_count_) throw InputError("edge endpoint out of range");
  if (!(weight > 0.0) || !std::isfinite(weight)) throw InputError("edge weight must be positive and finite");
  if (i > j) std::swap(i, j);
  auto key = std::make_pair(i, j);
  if (auto it = index_.find(key); it != index_.end()) {
    edges_[it->second].weight = weight;
    return;
  }
  index_.emplace(key, edges_.size());
  edges_.push_back({i, j, weight});
}

bool Graph::has_edge(std::size_t i, std::size_t j) const { return weight(i, j).has_value(); }

std::optional<double> Graph::weight(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  auto it = index_.find({i, j});
  if (it == index_.end()) return std::nullopt;
  return edges_[it->second].weight;
}

std::vector<std::vector<std::pair<std::size_t, double>>> Graph::adjacency() const {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(node_count_);
  for (const auto& e : edges_) {
    adj[e.i].emplace_back(e.j, e.weight);
    adj[e.j].emplace_back(e.i, e.weight);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(node_count_, 0);
  for (const auto& e : edges_) {
    ++deg[e.i];
    ++deg[e.j];
  }
  return deg;
}

std::vector<double> Graph::weighted_degrees() const {
  std::vector<double> deg(node_count_, 0.0);
  for (const auto& e : edges_) {
    deg[e.i] += e.weight;
    deg[e.j] += e.weight;
  }
  return deg;
}

std::size_t Graph::max_degree() const {
  auto deg = degrees();
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

void Graph::set_positions(std::vector<Point2> positions) {
  if (positions.size() != node_count_) throw InputError("positions must have one entry per node");
  positions_ = std::move(positions);
}

namespace {

struct ParsedEdge {
  std::size_t i, j;
  double w;
};

std::size_t parse_node_id(long long raw, std::size_t line_no) {
  if (raw < 1) throw InputError("line " + std::to_string(line_no) + ": node ids are 1-based");
  return static_cast<std::size_t>(raw - 1);
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::vector<ParsedEdge> edges;
  std::vector<std::pair<std::size_t, Point2>> positions;
  std::size_t declared = 0;
  std::size_t max_id = 0;
  bool any = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') {
      std::string tag = first.size() > 1 ? first.substr(1) : "";
      if (tag.empty()) ls >> tag;
      if (tag == "pos") {
        long long id;
        double x, y;
        if (!(ls >> id >> x >> y)) throw InputError("line " + std::to_string(line_no) + ": malformed pos line");
        auto node = parse_node_id(id, line_no);
        positions.push_back({node, {x, y}});
        max_id = std::max(max_id, node);
        any = true;
      } else if (tag == "nodes") {
        if (!(ls >> declared)) throw InputError("line " + std::to_string(line_no) + ": malformed nodes line");
      }
      continue;
    }
    long long a, b;
    double w = 1.0;
    std::istringstream es(line);
    if (!(es >> a >> b)) throw InputError("line " + std::to_string(line_no) + ": expected 'i j [w]'");
    if (!(es >> w)) w = 1.0;
    auto i = parse_node_id(a, line_no);
    auto j = parse_node_id(b, line_no);
    edges.push_back({i, j, w});
    max_id = std::max({max_id, i, j});
    any = true;
  }
  std::size_t n = std::max(declared, any ? max_id + 1 : 0);
  if (n == 0) throw InputError("graph file contains no nodes");
  Graph g(n);
  for (const auto& e : edges) g.add_edge(e.i, e.j, e.w);
  if (!positions.empty()) {
    if (positions.size() != n) throw InputError("'# pos' lines must cover every node");
    std::vector<Point2> pts(n);
    std::vector<bool> seen(n, false);
    for (const auto& [node, p] : positions) {
      pts[node] = p;
      seen[node] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw InputError("'# pos' lines must cover every node");
    g.set_positions(std::move(pts));
  }
  return g;
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file '" + path + "'");
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << std::setprecision(17);
  out << "# nodes " << graph.node_count() << '\n';
  if (const auto& pos = graph.positions()) {
    for (std::size_t i = 0; i < pos->size(); ++i)
      out << "# pos " << i + 1 << ' ' << (*pos)[i][0] << ' ' << (*pos)[i][1] << '\n';
  }
  for (const auto& e : graph.edges()) out << e.i + 1 << ' ' << e.j + 1 << ' ' << e.weight << '\n';
}

Graph disk_graph(const std::vector<Point2>& positions, double range) {
  Graph g(positions.size());
  const double r2 = range * range;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      double dx = positions[i][0] - positions[j][0];
      double dy = positions[i][1] - positions[j][1];
      if (dx * dx + dy * dy <= r2) g.add_edge(i, j, 1.0);
    }
  }
  g.set_positions(positions);
  return g;
}

namespace {

bool has_isolated(const Graph& g) {
  auto deg = g.degrees();
  return std::find(deg.begin(), deg.end(), 0u) != deg.end();
}

}  // namespace

Graph random_geometric_graph(std::size_t node_count, std::mt19937_64& rng) {
  if (node_count < 2) throw InputError("random geometric graph needs at least 2 nodes");
  const double n = static_cast<double>(node_count);
  const double radius = std::sqrt(2.0 * std::log(n) / (std::numbers::pi * n));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Point2> pts(node_count);
    for (auto& p : pts) p = {u(rng), u(rng)};
    Graph g = disk_graph(pts, radius);
    if (!has_isolated(g)) return g;
  }
  throw NumericalError("could not draw a random geometric graph without isolated nodes");
}

Graph random_graph(std::size_t node_count, double p, std::mt19937_64& rng) {
  if (node_count < 2) throw InputError("random graph needs at least 2 nodes");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Graph g(node_count);
    for (std::size_t i = 0; i < node_count; ++i)
      for (std::size_t j = i + 1; j < node_count; ++j)
        if (u(rng) < p) g.add_edge(i, j, 0.5 + u(rng));
    if (!has_isolated(g)) return g;
  }
  throw NumericalError("could not draw a random graph without isolated nodes");
}

}  // namespace garma
