#include "garma/kernels.hpp"

#include <string>

namespace garma {

namespace {

void check_sizes(const NodeTable& table, const RoundCoefficients& coef, std::span<const Complex> y,
                 std::span<const double> x, std::span<Complex> out) {
  const std::size_t n = table.node_count();
  const std::size_t need = n * coef.branches();
  if (coef.phi.size() != coef.branches() || y.size() != need || out.size() != need || x.size() != n)
    throw InputError("round: state, input and coefficient sizes disagree");
}

RoundStats stats_for(const NodeTable& table, std::size_t branches) {
  return {table.directed_edge_count(), table.directed_edge_count() * branches};
}

}  // namespace

RoundStats round_serial(const NodeTable& table, const RoundCoefficients& coef, std::span<const Complex> y,
                        std::span<const double> x, std::span<Complex> out) {
  check_sizes(table, coef, y, x, out);
  const std::size_t n = table.node_count();
  const std::size_t K = coef.branches();

  std::vector<std::vector<RoundMessage>> inbox(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Complex> payload(K);
    for (std::size_t k = 0; k < K; ++k) payload[k] = y[k * n + i];
    for (std::size_t e = table.row_ptr[i]; e < table.row_ptr[i + 1]; ++e) {
      const std::size_t j = table.col[e];
      inbox[j].push_back({i, j, payload});
    }
  }

  RoundStats stats;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& msgs = inbox[i];
    const std::size_t first = table.row_ptr[i];
    if (msgs.size() != table.degree(i))
      throw NumericalError("locality violated: node " + std::to_string(i + 1) + " inbox does not match its neighborhood");
    for (std::size_t m = 0; m < msgs.size(); ++m)
      if (msgs[m].sender != table.col[first + m] || msgs[m].receiver != i)
        throw NumericalError("locality violated: message " + std::to_string(msgs[m].sender + 1) + " -> " +
                             std::to_string(i + 1) + " is not along an edge");
    for (std::size_t k = 0; k < K; ++k) {
      Complex acc = y[k * n + i] * static_cast<Real>(table.self_weight[i]);
      for (std::size_t m = 0; m < msgs.size(); ++m) acc += msgs[m].payload[k] * static_cast<Real>(table.weight[first + m]);
      out[k * n + i] = coef.theta * y[k * n + i] + coef.psi[k] * acc + coef.phi[k] * static_cast<Real>(x[i]);
    }
    stats.messages += msgs.size();
    stats.scalars += msgs.size() * K;
  }
  return stats;
}

RoundStats round_openmp(const NodeTable& table, const RoundCoefficients& coef, std::span<const Complex> y,
                        std::span<const double> x, std::span<Complex> out) {
  check_sizes(table, coef, y, x, out);
  const auto n = static_cast<std::ptrdiff_t>(table.node_count());
  const std::size_t K = coef.branches();
  const std::size_t nu = table.node_count();

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const std::size_t first = table.row_ptr[i], last = table.row_ptr[i + 1];
    for (std::size_t k = 0; k < K; ++k) {
      const Complex* yk = y.data() + k * nu;
      Complex acc = yk[i] * static_cast<Real>(table.self_weight[i]);
      for (std::size_t e = first; e < last; ++e) acc += yk[table.col[e]] * static_cast<Real>(table.weight[e]);
      out[k * nu + i] = coef.theta * yk[i] + coef.psi[k] * acc + coef.phi[k] * static_cast<Real>(x[i]);
    }
  }
  return stats_for(table, K);
}

}  // namespace garma
