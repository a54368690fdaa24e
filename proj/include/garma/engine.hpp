#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "garma/design.hpp"
#include "garma/kernels.hpp"
#include "garma/node_table.hpp"

namespace garma {

enum class FilterFamily { fir, arma1, parallel, periodic };

FilterFamily parse_family(const std::string& name);
std::string to_string(FilterFamily family);

/// One of the four distributed filter families with its coefficients.
struct FilterSpec {
  FilterFamily family = FilterFamily::arma1;
  FirDesign fir;
  ParallelForm parallel;  // also holds the single ARMA1 branch
  PeriodicForm periodic;

  static FilterSpec make_fir(FirDesign design);
  static FilterSpec make_arma1(Complex psi, Complex phi, SpectralInterval interval);
  static FilterSpec make_parallel(ParallelForm form);
  static FilterSpec make_periodic(PeriodicForm form);

  /// Complex state values per node.
  std::size_t branches() const;
  /// K of the family (1 for ARMA1).
  std::size_t order() const;
  /// Rounds between valid outputs: K for FIR and periodic, 1 otherwise.
  std::size_t output_period() const;
  SpectralInterval interval() const;
  /// Steady-state graph response g(mu).
  Complex response(double mu) const;
};

/// Per-round contraction guaranteed on every graph whose spectrum lies in
/// the interval: max_k |psi_k| R for ARMA1/parallel, (sup |A(mu)|)^(1/K) for
/// periodic, 0 for FIR. Values >= 1 mean the engine refuses to run.
double universal_contraction(const FilterSpec& filter);

/// Same on a concrete set of mu eigenvalues.
double spectral_contraction(const FilterSpec& filter, std::span<const double> mu);

enum class InitialKind { zero, given, random };

/// y_0 for every family. A given or random vector v is split evenly over the
/// branches, so the branch sum starts at v and conjugate branches stay paired.
struct InitialCondition {
  InitialKind kind = InitialKind::zero;
  std::vector<double> values;
  std::uint64_t seed = 0;

  static InitialCondition zero() { return {}; }
  static InitialCondition given(std::vector<double> v) { return {InitialKind::given, std::move(v), 0}; }
  static InitialCondition random(std::uint64_t seed) { return {InitialKind::random, {}, seed}; }
};

enum class ExecutionPolicy { serial, openmp };

struct EngineOptions {
  bool force = false;  // run unstable filters anyway
  ExecutionPolicy policy = ExecutionPolicy::openmp;
};

/// Round-synchronous distributed execution of one filter on N nodes.
class Engine {
 public:
  /// Throws StabilityError for filters whose universal contraction is >= 1
  /// unless options.force is set.
  Engine(FilterSpec filter, NodeTable table, std::vector<double> signal, EngineOptions options = {},
         InitialCondition initial = {});

  /// Executes one round against the current graph and signal.
  void step();
  /// Installs a new signal and/or graph, then executes one round. The node
  /// count must not change.
  void step_time_varying(const std::optional<std::vector<double>>& signal, const std::optional<NodeTable>& table);
  void set_signal(std::vector<double> signal);
  void set_table(NodeTable table);

  std::size_t round() const noexcept { return round_; }
  std::size_t node_count() const noexcept { return n_; }
  /// True when the current round is an output instant.
  bool output_valid() const;
  /// Latest valid output (real part of the branch sum).
  const std::vector<double>& output() const noexcept { return output_; }
  /// Largest |imag| of the latest output; nonzero values flag residue leakage.
  double output_max_imag() const noexcept { return output_imag_; }
  /// Branch-major complex state.
  const std::vector<Complex>& state() const noexcept { return y_; }

  /// Scalars sent by each node in the last round.
  const std::vector<std::size_t>& sent_last_round() const noexcept { return sent_; }
  const RoundStats& last_stats() const noexcept { return stats_; }
  /// Scalars each node holds: its branch states, one inbox slot per neighbor
  /// and branch, and its input sample.
  std::vector<std::size_t> stored_scalars() const;

  const FilterSpec& filter() const noexcept { return filter_; }
  const NodeTable& table() const noexcept { return table_; }
  const std::vector<double>& signal() const noexcept { return signal_; }

 private:
  void run_round(const RoundCoefficients& coef, std::span<const double> x);
  void refresh_output();

  FilterSpec filter_;
  NodeTable table_;
  std::vector<double> signal_;
  EngineOptions options_;
  std::size_t n_ = 0;
  std::size_t round_ = 0;
  std::vector<Complex> y_, scratch_;
  std::vector<double> held_input_;  // periodic and FIR sample the input once per period
  std::vector<double> output_;
  double output_imag_ = 0.0;
  std::vector<std::size_t> sent_;
  RoundStats stats_;
  std::vector<Complex> fir_psi_, fir_phi_;
};

struct TraceRow {
  std::size_t t = 0;
  bool valid = true;
  std::vector<double> y;
  double max_imag = 0.0;
  std::size_t messages = 0;
  std::size_t scalars = 0;
  std::optional<double> error;  // ||y_t - y*|| / ||y*|| when an oracle is supplied
};

struct Trace {
  std::vector<TraceRow> rows;
  std::vector<std::size_t> max_stored_per_node;
  std::vector<std::size_t> max_sent_per_node;
  std::vector<std::size_t> total_sent_per_node;
  std::size_t outputs = 0;  // valid output instants after t = 0
  std::size_t period = 1;
};

using SignalProvider = std::function<std::vector<double>(std::size_t t)>;
/// Returns a replacement graph for round t, or nothing to keep the current one.
using TableProvider = std::function<std::optional<NodeTable>(std::size_t t)>;

/// Records y_0 and `rounds` further rounds. With `oracle`, every valid row
/// carries its relative error.
Trace run(Engine& engine, std::size_t rounds, const std::vector<double>* oracle = nullptr);
Trace run_time_varying(Engine& engine, std::size_t rounds, const SignalProvider& signal, const TableProvider& table,
                       const std::function<std::vector<double>(std::size_t)>& oracle = {});

double relative_error(std::span<const double> y, std::span<const double> reference);

struct AccountingReport {
  std::vector<std::size_t> max_stored_per_node;
  std::vector<std::size_t> max_sent_per_round;  // per node
  std::vector<double> sent_per_output;          // per node, averaged over completed outputs
  std::size_t total_scalars = 0;
  std::size_t rounds = 0;
  std::size_t outputs = 0;
};
AccountingReport accounting_report(const Trace& trace);

/// "t,node,value" rows for valid outputs, 1-based nodes.
void write_trace_csv(std::ostream& out, const Trace& trace);

// ---- signal providers -------------------------------------------------------

SignalProvider constant_signal(std::vector<double> x);
/// x_a before round t_switch, x_b from then on.
SignalProvider switch_signal(std::vector<double> x_a, std::vector<double> x_b, std::size_t t_switch);
/// cos(omega t) x.
SignalProvider sinusoid_signal(std::vector<double> x, double omega);
/// Rows of a "t,node,value" series; each round uses the latest row at or before t.
SignalProvider series_signal(std::map<std::size_t, std::vector<double>> series);

}  // namespace garma
