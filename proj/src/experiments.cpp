#include "garma/experiments.hpp"

#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <queue>
#include <random>

#include "garma/engine.hpp"
#include "garma/mobility.hpp"
#include "garma/node_table.hpp"
#include "garma/spectrum.hpp"

namespace garma {

namespace {

DesiredResponse kind_response(const std::string& kind, SpectralInterval interval) {
  if (kind == "step") return DesiredResponse::step(interval);
  if (kind == "window") return DesiredResponse::window(interval);
  throw InputError("experiment response kind must be step or window, got '" + kind + "'");
}

ArmaDesign design_for_order(const DesiredResponse& response, std::size_t K, const DesignOptions& options) {
  try {
    return design_arma(response, K, options);
  } catch (const DesignError& e) {
    throw DesignError(e.stage(), "K=" + std::to_string(K) + ": " + e.what());
  }
}

std::function<double(double)> real_part(const FilterSpec& filter) {
  return [filter](double mu) { return static_cast<double>(filter.response(mu).real()); };
}

bool connected(const Graph& g) {
  const std::size_t n = g.node_count();
  if (n == 0) return true;
  const auto adj = g.adjacency();
  std::vector<char> seen(n, 0);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop();
    for (const auto& [v, w] : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
  }
  return count == n;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

// ---- response fits ----------------------------------------------------------

ResponseFitResult experiment_response_fit(const ResponseFitConfig& config) {
  return experiment_response_fit(config, kind_response(config.kind, config.interval));
}

ResponseFitResult experiment_response_fit(const ResponseFitConfig& config, const DesiredResponse& response) {
  if (config.orders.empty()) throw InputError("response fit needs at least one order");
  if (config.curve_points < 2) throw InputError("curve_points must be >= 2");
  const MuResponse target = map_to_mu(response);
  ResponseFitResult out;
  out.orders = config.orders;
  Grid grid = uniform_grid(target.mu_min, target.mu_max, config.curve_points);
  out.mu = grid.x;
  for (double mu : out.mu) out.g_star.push_back(target(mu));

  for (std::size_t K : config.orders) {
    ArmaDesign arma = design_for_order(response, K, config.options);
    FirDesign fir = design_fir(response, K, config.options.grid_size);
    std::vector<double> a, f;
    for (double mu : out.mu) {
      a.push_back(static_cast<double>(evaluate_response(arma.rational, mu).real()));
      f.push_back(static_cast<double>(evaluate_response(fir, mu).real()));
    }
    out.arma.push_back(std::move(a));
    out.fir.push_back(std::move(f));
    out.arma_l2.push_back(arma.l2_error);
    out.fir_l2.push_back(l2_error(fir, target, config.options.grid_size));
    out.fallbacks.push_back(arma.fallback);
  }
  return out;
}

void write_fig1_csv(std::ostream& out, const ResponseFitResult& r) {
  out << "mu,g_star";
  for (std::size_t K : r.orders) out << ",arma_" << K << ",fir_" << K;
  out << '\n' << std::setprecision(12);
  for (std::size_t i = 0; i < r.mu.size(); ++i) {
    out << r.mu[i] << ',' << r.g_star[i];
    for (std::size_t k = 0; k < r.orders.size(); ++k) out << ',' << r.arma[k][i] << ',' << r.fir[k][i];
    out << '\n';
  }
}

// ---- convergence ------------------------------------------------------------

ConvergenceResult experiment_convergence(const ConvergenceConfig& config) {
  if (config.node_count < 2) throw InputError("convergence experiment needs at least 2 nodes");
  std::mt19937_64 rng(config.seed);
  Graph graph = random_geometric_graph(config.node_count, rng);
  const SpectralInterval iv{0.0, 2.0};
  ShiftOperator op = build_shift_operator(graph, OperatorVariant::normalized_laplacian, iv);
  Spectrum spectrum = eigendecompose(op);
  NodeTable table = build_node_table(graph, OperatorVariant::normalized_laplacian, iv);

  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(config.node_count);
  for (auto& v : x) v = u(rng);

  const DesiredResponse response = kind_response(config.kind, iv);
  ArmaDesign arma = design_for_order(response, config.order, {});
  FirDesign fir = design_fir(response, config.order);

  const std::vector<std::pair<std::string, FilterSpec>> filters{
      {"parallel", FilterSpec::make_parallel(arma.parallel)},
      {"periodic", FilterSpec::make_periodic(arma.periodic)},
      {"fir", FilterSpec::make_fir(fir)}};

  std::vector<double> mu(spectrum.mu.data(), spectrum.mu.data() + spectrum.size());
  ConvergenceResult out;
  out.gamma_parallel = spectral_contraction(filters[0].second, mu);
  out.gamma_periodic = spectral_contraction(filters[1].second, mu);
  for (const auto& [name, spec] : filters) {
    const std::vector<double> target = apply_filter_exact(x, spectrum, real_part(spec));
    Engine engine(spec, table, x);
    Trace trace = run(engine, config.rounds, &target);
    ErrorSeries s;
    s.filter = name;
    for (const auto& row : trace.rows) {
      if (!row.valid) continue;
      s.t.push_back(row.t);
      s.error.push_back(*row.error);
    }
    out.series.push_back(std::move(s));
  }
  return out;
}

void write_fig2_csv(std::ostream& out, const ConvergenceResult& r) {
  out << "t,filter,error\n" << std::setprecision(12);
  for (const auto& s : r.series)
    for (std::size_t i = 0; i < s.t.size(); ++i) out << s.t[i] << ',' << s.filter << ',' << s.error[i] << '\n';
}

// ---- mobility ---------------------------------------------------------------

MobilityResult experiment_mobility(const MobilityConfig& c) {
  if (c.speeds.empty()) throw InputError("mobility experiment needs at least one speed");
  if (c.repetitions < 1) throw InputError("repetitions must be >= 1");
  if (c.node_count < 2) throw InputError("mobility experiment needs at least 2 nodes");
  if (c.eval_every == 0 || c.duration < c.eval_every)
    throw InputError("need 0 < eval_every <= duration");
  for (double s : c.speeds)
    if (!(s >= 0.0)) throw InputError("speeds must be non-negative");

  const SpectralInterval iv{0.0, c.lambda_max.value_or(2.0 * static_cast<double>(c.node_count - 1))};
  const DesiredResponse response = kind_response(c.kind, iv);
  const ArmaDesign arma = design_for_order(response, c.order, {});
  const FirDesign fir = design_fir(response, c.order);

  MobilityResult out;
  out.speeds = c.speeds;
  out.filters = {"parallel", "periodic", "fir"};
  out.interval = iv;
  const std::vector<FilterSpec> specs{FilterSpec::make_parallel(arma.parallel), FilterSpec::make_periodic(arma.periodic),
                                      FilterSpec::make_fir(fir)};
  const std::size_t F = specs.size(), S = c.speeds.size(), R = c.repetitions;
  out.per_run.assign(F, std::vector<std::vector<double>>(S, std::vector<double>(R, 0.0)));
  std::vector<char> disconnected(S * R, 0);

  auto degree_signal = [](const Graph& g) {
    auto d = g.degrees();
    return std::vector<double>(d.begin(), d.end());
  };

  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto jobs = static_cast<std::ptrdiff_t>(S * R);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t job = 0; job < jobs; ++job) {
    try {
      const std::size_t si = static_cast<std::size_t>(job) / R, rep = static_cast<std::size_t>(job) % R;
      // Same seed for a repetition at every speed: runs share their initial layout.
      WaypointModel model({c.node_count, c.box, c.speeds[si], c.pause, derive_seed(c.seed, rep, 0)});
      Graph graph = disk_graph(model.positions(), c.range);
      NodeTable table = build_node_table(graph, OperatorVariant::discrete_laplacian, iv);
      std::vector<double> x = degree_signal(graph);

      std::vector<Engine> engines;
      for (const auto& spec : specs) engines.emplace_back(spec, table, x);
      std::vector<double> acc(F, 0.0);
      std::size_t evals = 0;

      for (std::size_t it = 1; it <= c.duration; ++it) {
        model.step();
        graph = disk_graph(model.positions(), c.range);
        table = build_node_table(graph, OperatorVariant::discrete_laplacian, iv);
        x = degree_signal(graph);
        for (auto& e : engines) e.step_time_varying(x, table);
        if (it % c.eval_every != 0) continue;
        ShiftOperator op = build_shift_operator(graph, OperatorVariant::discrete_laplacian, iv);
        Spectrum spectrum = eigendecompose(op);
        std::vector<double> ideal = apply_filter_exact(x, spectrum, [&response](double lambda) { return response(lambda); },
                                                       FrequencyVariable::lambda);
        for (std::size_t f = 0; f < F; ++f) acc[f] += relative_error(engines[f].output(), ideal);
        ++evals;
      }
      for (std::size_t f = 0; f < F; ++f) out.per_run[f][si][rep] = acc[f] / static_cast<double>(evals);
      disconnected[static_cast<std::size_t>(job)] = connected(graph) ? 0 : 1;
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  out.mean.assign(F, std::vector<double>(S, 0.0));
  out.stddev.assign(F, std::vector<double>(S, std::numeric_limits<double>::quiet_NaN()));
  for (std::size_t f = 0; f < F; ++f)
    for (std::size_t s = 0; s < S; ++s) {
      const auto& v = out.per_run[f][s];
      double m = 0;
      for (double e : v) m += e;
      m /= static_cast<double>(R);
      out.mean[f][s] = m;
      if (R >= 2) {
        double ss = 0;
        for (double e : v) ss += (e - m) * (e - m);
        out.stddev[f][s] = std::sqrt(ss / static_cast<double>(R - 1));
      }
    }
  for (char d : disconnected) out.disconnected_final_graphs += static_cast<std::size_t>(d);

  out.metadata = {
      {"error_metric",
       "signal-domain proxy ||y_t - F* x_t|| / ||F* x_t||, F* the ideal response on the graph and degree signal of "
       "iteration t; a run's score is the mean over evaluation iterations"},
      {"std_error", "sample standard deviation over repetitions; NaN when repetitions < 2"},
      {"operator", "discrete_laplacian"},
      {"interval", {iv.lambda_min, iv.lambda_max}},
      {"speeds", c.speeds},
      {"node_count", c.node_count},
      {"box", c.box},
      {"range", c.range},
      {"pause", c.pause},
      {"duration", c.duration},
      {"eval_every", c.eval_every},
      {"repetitions", c.repetitions},
      {"order", c.order},
      {"kind", c.kind},
      {"seed", c.seed},
      {"arma_fallback", arma.fallback},
      {"arma_l2_error", arma.l2_error},
      {"disconnected_final_graphs", out.disconnected_final_graphs}};
  return out;
}

void write_fig3_csv(std::ostream& out, const MobilityResult& r) {
  out << "speed,filter,mean_error,std_error\n" << std::setprecision(12);
  for (std::size_t s = 0; s < r.speeds.size(); ++s)
    for (std::size_t f = 0; f < r.filters.size(); ++f)
      out << r.speeds[s] << ',' << r.filters[f] << ',' << r.mean[f][s] << ',' << r.stddev[f][s] << '\n';
}

}  // namespace garma
