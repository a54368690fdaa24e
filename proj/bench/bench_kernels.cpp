// Times one filtering round of the mailbox reference against the OpenMP kernel.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "garma/graph.hpp"
#include "garma/kernels.hpp"
#include "garma/node_table.hpp"

using namespace garma;

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP round kernels"};
  std::size_t nodes = 2000, rounds = 50, reps = 3, branches = 5;
  std::uint64_t seed = 7;
  app.add_option("--nodes", nodes, "graph size");
  app.add_option("--rounds", rounds, "rounds per repetition");
  app.add_option("--reps", reps, "repetitions (best time is reported)");
  app.add_option("--branches", branches, "parallel branches K");
  app.add_option("--seed", seed, "graph seed");
  CLI11_PARSE(app, argc, argv);

  std::mt19937_64 rng(seed);
  Graph g = random_geometric_graph(nodes, rng);
  NodeTable table = build_node_table(g, OperatorVariant::normalized_laplacian, {0.0, 2.0});

  std::vector<Complex> psi(branches), phi(branches);
  for (std::size_t k = 0; k < branches; ++k) {
    psi[k] = Complex(0.3L / static_cast<Real>(k + 1), 0.1L);
    phi[k] = Complex(1.0L, -0.2L);
  }
  RoundCoefficients coef{0.0L, psi, phi};
  std::vector<double> x(nodes, 1.0);
  std::vector<Complex> y0(nodes * branches, Complex(0.5L));

  auto drive = [&](auto kernel, std::vector<Complex>& y) {
    std::vector<Complex> out(y.size());
    for (std::size_t r = 0; r < rounds; ++r) {
      kernel(table, coef, y, x, out);
      y.swap(out);
    }
  };

  double best_serial = 1e300, best_omp = 1e300;
  std::vector<Complex> ys, yo;
  for (std::size_t r = 0; r < reps; ++r) {
    ys = y0;
    yo = y0;
    best_serial = std::min(best_serial, seconds([&] { drive(round_serial, ys); }));
    best_omp = std::min(best_omp, seconds([&] { drive(round_openmp, yo); }));
  }
  const bool identical = ys == yo;
  std::printf("nodes=%zu edges=%zu branches=%zu rounds=%zu threads=%d\n", nodes, g.edges().size(), branches, rounds,
              omp_get_max_threads());
  std::printf("serial  %.6f s  (%.3f us/round)\n", best_serial, 1e6 * best_serial / static_cast<double>(rounds));
  std::printf("openmp  %.6f s  (%.3f us/round)\n", best_omp, 1e6 * best_omp / static_cast<double>(rounds));
  std::printf("speedup %.2fx  identical=%s\n", best_serial / best_omp, identical ? "yes" : "no");
  return identical ? 0 : 1;
}
