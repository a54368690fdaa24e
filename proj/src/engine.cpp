#include "garma/engine.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace garma {

FilterFamily parse_family(const std::string& name) {
  if (name == "fir") return FilterFamily::fir;
  if (name == "arma1") return FilterFamily::arma1;
  if (name == "parallel") return FilterFamily::parallel;
  if (name == "periodic") return FilterFamily::periodic;
  throw InputError("unknown filter family '" + name + "' (fir, arma1, parallel, periodic)");
}

std::string to_string(FilterFamily family) {
  switch (family) {
    case FilterFamily::fir: return "fir";
    case FilterFamily::arma1: return "arma1";
    case FilterFamily::parallel: return "parallel";
    case FilterFamily::periodic: return "periodic";
  }
  return "unknown";
}

FilterSpec FilterSpec::make_fir(FirDesign design) {
  if (design.h.empty()) throw InputError("FIR design needs at least h_0");
  FilterSpec f;
  f.family = FilterFamily::fir;
  f.fir = std::move(design);
  return f;
}

FilterSpec FilterSpec::make_arma1(Complex psi, Complex phi, SpectralInterval interval) {
  FilterSpec f;
  f.family = FilterFamily::arma1;
  f.parallel = arma1_form(psi, phi, interval);
  return f;
}

FilterSpec FilterSpec::make_parallel(ParallelForm form) {
  if (form.branches.empty()) throw InputError("parallel form needs at least one branch");
  FilterSpec f;
  f.family = FilterFamily::parallel;
  f.parallel = std::move(form);
  return f;
}

FilterSpec FilterSpec::make_periodic(PeriodicForm form) {
  if (form.psi.empty() || form.phi.size() != form.psi.size() || form.theta.size() != form.psi.size())
    throw InputError("periodic form needs equal-length theta, psi and phi");
  FilterSpec f;
  f.family = FilterFamily::periodic;
  f.periodic = std::move(form);
  return f;
}

std::size_t FilterSpec::branches() const { return family == FilterFamily::parallel ? parallel.order() : 1; }

std::size_t FilterSpec::order() const {
  switch (family) {
    case FilterFamily::fir: return fir.order();
    case FilterFamily::arma1: return 1;
    case FilterFamily::parallel: return parallel.order();
    case FilterFamily::periodic: return periodic.period();
  }
  return 0;
}

std::size_t FilterSpec::output_period() const {
  if (family == FilterFamily::periodic) return periodic.period();
  if (family == FilterFamily::fir) return std::max<std::size_t>(fir.order(), 1);
  return 1;
}

SpectralInterval FilterSpec::interval() const {
  switch (family) {
    case FilterFamily::fir: return fir.interval;
    case FilterFamily::periodic: return periodic.interval;
    default: return parallel.interval;
  }
}

Complex FilterSpec::response(double mu) const {
  switch (family) {
    case FilterFamily::fir: return evaluate_response(fir, mu);
    case FilterFamily::periodic: return evaluate_response(periodic, mu);
    default: return evaluate_response(parallel, mu);
  }
}

double universal_contraction(const FilterSpec& filter) {
  switch (filter.family) {
    case FilterFamily::fir: return 0.0;
    case FilterFamily::periodic: {
      auto ps = check_stability_periodic(filter.periodic);
      const double worst = std::max(ps.sup_contraction, ps.endpoint_product);
      return std::pow(worst, 1.0 / static_cast<double>(filter.periodic.period()));
    }
    default: {
      const Real R = filter.parallel.interval.radius();
      Real g = 0;
      for (const auto& br : filter.parallel.branches) g = std::max(g, std::abs(br.psi) * R);
      return static_cast<double>(g);
    }
  }
}

double spectral_contraction(const FilterSpec& filter, std::span<const double> mu) {
  Real g = 0;
  for (double m : mu) {
    switch (filter.family) {
      case FilterFamily::fir: break;
      case FilterFamily::periodic:
        g = std::max(g, std::pow(std::abs(periodic_product(filter.periodic, m)),
                                 1.0L / static_cast<Real>(filter.periodic.period())));
        break;
      default:
        for (const auto& br : filter.parallel.branches) g = std::max(g, std::abs(br.psi * static_cast<Real>(m)));
    }
  }
  return static_cast<double>(g);
}

Engine::Engine(FilterSpec filter, NodeTable table, std::vector<double> signal, EngineOptions options,
               InitialCondition initial)
    : filter_(std::move(filter)), table_(std::move(table)), signal_(std::move(signal)), options_(options) {
  n_ = table_.node_count();
  if (signal_.size() != n_) throw InputError("signal length does not match the graph's node count");

  const double gamma = universal_contraction(filter_);
  if (!(gamma < 1.0) && !options_.force) {
    std::ostringstream msg;
    msg << "refusing to run unstable " << to_string(filter_.family) << " filter (contraction " << gamma
        << " >= 1 on the interval); pass force to run anyway";
    throw StabilityError(msg.str());
  }

  const std::size_t K = filter_.branches();
  y_.assign(K * n_, Complex{});
  scratch_.assign(K * n_, Complex{});
  output_.assign(n_, 0.0);
  sent_.assign(n_, 0);

  std::vector<double> v;
  if (initial.kind == InitialKind::given) {
    if (initial.values.size() != n_) throw InputError("initial condition length does not match the node count");
    v = initial.values;
  } else if (initial.kind == InitialKind::random) {
    std::mt19937_64 rng(initial.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    v.resize(n_);
    for (auto& e : v) e = u(rng);
  }
  if (!v.empty()) {
    output_ = v;
    if (filter_.family != FilterFamily::fir) {
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t i = 0; i < n_; ++i) y_[k * n_ + i] = static_cast<Real>(v[i]) / static_cast<Real>(K);
    }
  }
  if (filter_.family == FilterFamily::fir) {
    fir_psi_.assign(1, Complex(-1.0L));
    fir_phi_.assign(1, Complex{});
  }
}

void Engine::set_signal(std::vector<double> signal) {
  if (signal.size() != n_) throw InputError("signal length does not match the graph's node count");
  signal_ = std::move(signal);
}

void Engine::set_table(NodeTable table) {
  if (table.node_count() != n_) throw InputError("graph changes must keep the node count fixed");
  table_ = std::move(table);
}

void Engine::step_time_varying(const std::optional<std::vector<double>>& signal, const std::optional<NodeTable>& table) {
  if (signal) set_signal(*signal);
  if (table) set_table(*table);
  step();
}

bool Engine::output_valid() const {
  const std::size_t p = filter_.output_period();
  return round_ % p == 0;
}

std::vector<std::size_t> Engine::stored_scalars() const {
  const std::size_t K = filter_.branches();
  std::vector<std::size_t> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = K * (table_.degree(i) + 1) + 1;
  return out;
}

void Engine::run_round(const RoundCoefficients& coef, std::span<const double> x) {
  stats_ = options_.policy == ExecutionPolicy::serial ? round_serial(table_, coef, y_, x, scratch_)
                                                      : round_openmp(table_, coef, y_, x, scratch_);
  y_.swap(scratch_);
  for (std::size_t i = 0; i < n_; ++i) sent_[i] = table_.degree(i) * coef.branches();
}

void Engine::refresh_output() {
  const std::size_t K = filter_.branches();
  output_imag_ = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    Complex s{};
    for (std::size_t k = 0; k < K; ++k) s += y_[k * n_ + i];
    output_[i] = static_cast<double>(s.real());
    output_imag_ = std::max(output_imag_, static_cast<double>(std::abs(s.imag())));
  }
}

void Engine::step() {
  switch (filter_.family) {
    case FilterFamily::arma1:
    case FilterFamily::parallel: {
      std::vector<Complex> psi, phi;
      for (const auto& br : filter_.parallel.branches) {
        psi.push_back(br.psi);
        phi.push_back(br.phi);
      }
      run_round({0.0L, psi, phi}, signal_);
      ++round_;
      refresh_output();
      break;
    }
    case FilterFamily::periodic: {
      const std::size_t K = filter_.periodic.period();
      const std::size_t tau = round_ % K;
      if (tau == 0) held_input_ = signal_;
      const auto& f = filter_.periodic;
      run_round({f.theta[tau], std::span(&f.psi[tau], 1), std::span(&f.phi[tau], 1)}, held_input_);
      ++round_;
      if (round_ % K == 0) refresh_output();
      break;
    }
    case FilterFamily::fir: {
      // Horner in L = c I - M, restarted every K rounds on a fresh input sample.
      const auto& h = filter_.fir.h;
      const std::size_t K = filter_.fir.order();
      if (K == 0) {
        for (std::size_t i = 0; i < n_; ++i) output_[i] = h[0] * signal_[i];
        std::fill(sent_.begin(), sent_.end(), 0);
        stats_ = {};
        ++round_;
        break;
      }
      const std::size_t phase = round_ % K;
      if (phase == 0) {
        held_input_ = signal_;
        for (std::size_t i = 0; i < n_; ++i) y_[i] = static_cast<Real>(h[K]) * static_cast<Real>(held_input_[i]);
      }
      fir_phi_[0] = static_cast<Real>(h[K - 1 - phase]);
      run_round({static_cast<Real>(table_.translation), fir_psi_, fir_phi_}, held_input_);
      ++round_;
      if (round_ % K == 0) refresh_output();
      break;
    }
  }
}

double relative_error(std::span<const double> y, std::span<const double> reference) {
  if (y.size() != reference.size()) throw InputError("relative_error: size mismatch");
  long double num = 0, den = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const long double d = static_cast<long double>(y[i]) - reference[i];
    num += d * d;
    den += static_cast<long double>(reference[i]) * reference[i];
  }
  return static_cast<double>(den > 0 ? std::sqrt(num / den) : std::sqrt(num));
}

namespace {

void record(Trace& trace, const Engine& engine, const std::vector<double>* oracle, bool initial) {
  TraceRow row;
  row.t = engine.round();
  row.valid = initial || engine.output_valid();
  if (row.valid) {
    row.y = engine.output();
    row.max_imag = engine.output_max_imag();
    if (oracle) row.error = relative_error(row.y, *oracle);
    if (!initial) ++trace.outputs;
  }
  if (!initial) {
    row.messages = engine.last_stats().messages;
    row.scalars = engine.last_stats().scalars;
    const auto& sent = engine.sent_last_round();
    for (std::size_t i = 0; i < sent.size(); ++i) {
      trace.max_sent_per_node[i] = std::max(trace.max_sent_per_node[i], sent[i]);
      trace.total_sent_per_node[i] += sent[i];
    }
  }
  auto stored = engine.stored_scalars();
  for (std::size_t i = 0; i < stored.size(); ++i)
    trace.max_stored_per_node[i] = std::max(trace.max_stored_per_node[i], stored[i]);
  trace.rows.push_back(std::move(row));
}

Trace start_trace(const Engine& engine) {
  Trace trace;
  const std::size_t n = engine.node_count();
  trace.max_stored_per_node.assign(n, 0);
  trace.max_sent_per_node.assign(n, 0);
  trace.total_sent_per_node.assign(n, 0);
  trace.period = engine.filter().output_period();
  return trace;
}

}  // namespace

Trace run(Engine& engine, std::size_t rounds, const std::vector<double>* oracle) {
  Trace trace = start_trace(engine);
  record(trace, engine, oracle, true);
  for (std::size_t t = 0; t < rounds; ++t) {
    engine.step();
    record(trace, engine, oracle, false);
  }
  return trace;
}

Trace run_time_varying(Engine& engine, std::size_t rounds, const SignalProvider& signal, const TableProvider& table,
                       const std::function<std::vector<double>(std::size_t)>& oracle) {
  Trace trace = start_trace(engine);
  std::vector<double> ref;
  if (oracle) ref = oracle(engine.round());
  record(trace, engine, oracle ? &ref : nullptr, true);
  for (std::size_t t = 0; t < rounds; ++t) {
    const std::size_t now = engine.round();
    std::optional<std::vector<double>> x;
    if (signal) x = signal(now);
    std::optional<NodeTable> tb;
    if (table) tb = table(now);
    engine.step_time_varying(x, tb);
    if (oracle && engine.output_valid()) ref = oracle(engine.round());
    record(trace, engine, oracle ? &ref : nullptr, false);
  }
  return trace;
}

AccountingReport accounting_report(const Trace& trace) {
  AccountingReport rep;
  rep.max_stored_per_node = trace.max_stored_per_node;
  rep.max_sent_per_round = trace.max_sent_per_node;
  rep.rounds = trace.rows.empty() ? 0 : trace.rows.size() - 1;
  rep.outputs = trace.outputs;
  for (const auto& row : trace.rows) rep.total_scalars += row.scalars;
  rep.sent_per_output.assign(trace.total_sent_per_node.size(), 0.0);
  if (trace.outputs > 0)
    for (std::size_t i = 0; i < rep.sent_per_output.size(); ++i)
      rep.sent_per_output[i] = static_cast<double>(trace.total_sent_per_node[i]) / static_cast<double>(trace.outputs);
  return rep;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "t,node,value\n" << std::setprecision(17);
  for (const auto& row : trace.rows) {
    if (!row.valid) continue;
    for (std::size_t i = 0; i < row.y.size(); ++i) out << row.t << ',' << i + 1 << ',' << row.y[i] << '\n';
  }
}

SignalProvider constant_signal(std::vector<double> x) {
  return [x = std::move(x)](std::size_t) { return x; };
}

SignalProvider switch_signal(std::vector<double> x_a, std::vector<double> x_b, std::size_t t_switch) {
  return [a = std::move(x_a), b = std::move(x_b), t_switch](std::size_t t) { return t < t_switch ? a : b; };
}

SignalProvider sinusoid_signal(std::vector<double> x, double omega) {
  return [x = std::move(x), omega](std::size_t t) {
    std::vector<double> out(x);
    const double c = std::cos(omega * static_cast<double>(t));
    for (auto& v : out) v *= c;
    return out;
  };
}

SignalProvider series_signal(std::map<std::size_t, std::vector<double>> series) {
  if (series.empty()) throw InputError("signal series is empty");
  return [s = std::move(series)](std::size_t t) {
    auto it = s.upper_bound(t);
    if (it == s.begin()) return s.begin()->second;
    return std::prev(it)->second;
  };
}

}  // namespace garma
