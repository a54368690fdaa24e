#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "garma/design.hpp"
#include "garma/response.hpp"

namespace garma {

// ---- response fits ----------------------------------------------------------

struct ResponseFitConfig {
  std::vector<std::size_t> orders{5, 10, 20};
  std::string kind = "step";  // step or window
  SpectralInterval interval{0.0, 2.0};
  std::size_t curve_points = 1000;
  DesignOptions options;
};

struct ResponseFitResult {
  std::vector<std::size_t> orders;
  std::vector<double> mu;
  std::vector<double> g_star;
  std::vector<std::vector<double>> arma;  // per order, real part on the mu grid
  std::vector<std::vector<double>> fir;
  std::vector<double> arma_l2;
  std::vector<double> fir_l2;
  std::vector<std::string> fallbacks;
};

ResponseFitResult experiment_response_fit(const ResponseFitConfig& config);
ResponseFitResult experiment_response_fit(const ResponseFitConfig& config, const DesiredResponse& response);
/// "mu,g_star,arma_K,fir_K,..." with one arma/fir column pair per order.
void write_fig1_csv(std::ostream& out, const ResponseFitResult& result);

// ---- convergence ------------------------------------------------------------

struct ConvergenceConfig {
  std::size_t node_count = 100;
  std::size_t order = 5;
  std::string kind = "step";
  std::size_t rounds = 100;
  std::uint64_t seed = 1;
};

struct ErrorSeries {
  std::string filter;
  std::vector<std::size_t> t;
  std::vector<double> error;
};

struct ConvergenceResult {
  std::vector<ErrorSeries> series;  // parallel, periodic, fir
  double gamma_parallel = 0.0;      // per round on the drawn graph
  double gamma_periodic = 0.0;
};

/// Random geometric graph with the normalized Laplacian on [0, 2]. Each
/// filter's error is measured against its own steady state.
ConvergenceResult experiment_convergence(const ConvergenceConfig& config);
void write_fig2_csv(std::ostream& out, const ConvergenceResult& result);

// ---- mobility ---------------------------------------------------------------

struct MobilityConfig {
  std::vector<double> speeds{0.0, 1.0, 5.0, 10.0, 20.0};
  std::size_t node_count = 100;
  double box = 1000.0;
  double range = 180.0;
  std::size_t pause = 0;
  std::size_t duration = 600;         // iterations (one communication round each)
  std::size_t eval_every = 100;
  std::size_t repetitions = 10;
  std::size_t order = 5;
  std::string kind = "step";
  std::optional<double> lambda_max;   // default 2 (N - 1)
  std::uint64_t seed = 1;
};

struct MobilityResult {
  std::vector<double> speeds;
  std::vector<std::string> filters;                        // parallel, periodic, fir
  std::vector<std::vector<double>> mean;                   // [filter][speed]
  std::vector<std::vector<double>> stddev;                 // NaN when repetitions < 2
  std::vector<std::vector<std::vector<double>>> per_run;   // [filter][speed][rep]
  std::size_t disconnected_final_graphs = 0;
  SpectralInterval interval;
  nlohmann::json metadata;
};

/// Nodes move by random waypoint; the disk graph and the degree signal are
/// rebuilt every iteration and fed to the running filters. Every eval_every
/// iterations the output is compared with the ideal filter on the current
/// graph and signal; a run's score is the mean of these errors.
MobilityResult experiment_mobility(const MobilityConfig& config);
void write_fig3_csv(std::ostream& out, const MobilityResult& result);

/// Seeds derived from the base seed, a speed index and a repetition index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

}  // namespace garma
