#include "garma/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "garma/design_io.hpp"
#include "garma/engine.hpp"
#include "garma/experiments.hpp"
#include "garma/signal_io.hpp"
#include "garma/spectrum.hpp"
#include "garma/temporal.hpp"

namespace fs = std::filesystem;

namespace garma {

namespace {

struct Invocation {
  std::string config;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool force = false;
  bool verbose = false;
  // overrides
  std::optional<std::size_t> order;
  std::optional<std::string> kind;
  std::optional<std::string> family;
  std::optional<std::size_t> rounds;
  std::optional<std::size_t> repetitions;
};

class Output {
 public:
  Output(const Invocation& inv) : dir_(inv.out_dir), force_(inv.force) {}

  fs::path path(const std::string& name) const { return dir_ / name; }

  /// Opens a result file, refusing to clobber an existing one without --force.
  std::ofstream open(const std::string& name) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw InputError("cannot create output directory " + dir_.string() + ": " + ec.message());
    const fs::path p = dir_ / name;
    if (fs::exists(p) && !force_) throw InputError(p.string() + " exists; pass --force to overwrite");
    std::ofstream f(p);
    if (!f) throw InputError("cannot write " + p.string());
    written_.push_back(p.string());
    return f;
  }

  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }
  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path dir_;
  bool force_;
  std::vector<std::string> written_;
};

fs::path base_dir(const std::string& config) { return config.empty() ? fs::path{} : fs::path(config).parent_path(); }

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path q(p);
  return q.is_relative() && !base.empty() ? base / q : q;
}

json load_config(const Invocation& inv, bool required) {
  if (inv.config.empty()) {
    if (required) throw InputError("--config is required for this subcommand");
    return json::object();
  }
  json j = read_json_file(inv.config);
  if (!j.is_object()) throw InputError(inv.config + ": config must be a JSON object");
  return j;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  try {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
  } catch (const json::exception& e) {
    throw InputError(std::string("config field \"") + key + "\": " + e.what());
  }
}

std::uint64_t effective_seed(const Invocation& inv, const json& cfg) {
  return inv.seed.value_or(get_or<std::uint64_t>(cfg, "seed", 1));
}

// ---- design -------------------------------------------------------------------

int cmd_design(const Invocation& inv, std::ostream& out) {
  json cfg = load_config(inv, false);
  if (inv.order) cfg["order"] = *inv.order;
  if (inv.kind) cfg["kind"] = *inv.kind;
  if (inv.family) cfg["family"] = *inv.family;
  DesignConfig dc = design_config_from_json(cfg, base_dir(inv.config));
  const DesiredResponse response = make_response(dc);
  const MuResponse target = map_to_mu(response);

  Output files(inv);
  json summary{{"subcommand", "design"}, {"config", to_json(dc)}};
  if (dc.family == "fir") {
    FirDesign fir = design_fir(response, dc.order, dc.options.grid_size);
    const double err = l2_error(fir, target, dc.options.grid_size);
    files.write_json("design.json", to_json(make_document(fir, response.description(), err)));
    out << "family: fir\norder: " << dc.order << "\nl2_error: " << err << "\nstable: true\n";
    summary["l2_error"] = err;
  } else {
    ArmaDesign d = design_arma(response, dc.order, dc.options);
    files.write_json("design.json", to_json(make_document(d, response.description())));
    double min_margin = INFINITY;
    for (double m : d.stability.margins) min_margin = std::min(min_margin, m);
    out << "family: arma\norder: " << dc.order << "\nprefit_order: " << d.prefit_order_used
        << "\nfallback: " << d.fallback << "\nl2_error: " << d.l2_error << "\nmin_pole_margin: " << min_margin
        << "\nperiodic_sup_contraction: " << d.periodic_stability.sup_contraction << "\nstable: true\n";
    summary["l2_error"] = d.l2_error;
    summary["fallback"] = d.fallback;
    summary["prefit_order"] = d.prefit_order_used;
  }
  summary["outputs"] = files.written();
  files.write_json("design_summary.json", summary);
  return 0;
}

// ---- simulate -----------------------------------------------------------------

struct GraphContext {
  Graph graph;
  OperatorVariant variant = OperatorVariant::discrete_laplacian;
};

GraphContext load_graph(const json& cfg, const fs::path& base) {
  if (!cfg.contains("graph")) throw InputError("config needs \"graph\" (edge list file)");
  GraphContext g;
  g.graph = read_edge_list_file(resolve(base, cfg["graph"].get<std::string>()).string());
  g.variant = parse_variant(get_or<std::string>(cfg, "operator", "discrete_laplacian"));
  if (g.variant == OperatorVariant::custom_symmetric_1local)
    throw InputError("custom operators are only available through the library");
  return g;
}

std::optional<SpectralInterval> config_interval(const json& cfg) {
  if (!cfg.contains("interval")) return std::nullopt;
  const auto& v = cfg["interval"];
  if (!v.is_array() || v.size() != 2) throw InputError("interval must be [lambda_min, lambda_max]");
  return SpectralInterval{v[0].get<double>(), v[1].get<double>()};
}

FilterSpec load_filter(const json& cfg, const fs::path& base, const std::string& family_name, SpectralInterval fallback_iv,
                       std::string& source) {
  const FilterFamily family = parse_family(family_name);
  if (family == FilterFamily::arma1 && cfg.contains("arma1")) {
    const auto& a = cfg["arma1"];
    source = "inline arma1";
    return FilterSpec::make_arma1(parse_real(a.at("psi")), parse_real(a.at("phi")), fallback_iv);
  }
  if (!cfg.contains("design")) throw InputError("config needs \"design\" (design document) or inline \"arma1\"");
  const fs::path p = resolve(base, cfg["design"].get<std::string>());
  source = p.string();
  DesignDocument doc = read_design_file(p);
  switch (family) {
    case FilterFamily::fir:
      if (!doc.fir) throw InputError("family fir needs a FIR design document");
      return FilterSpec::make_fir(*doc.fir);
    case FilterFamily::parallel:
    case FilterFamily::arma1: {
      if (!doc.rational) throw InputError("family " + family_name + " needs an ARMA design document");
      if (!doc.parallel) {
        if (doc.stability && !doc.stability->stable)
          throw StabilityError("design has poles inside the stability disk; no parallel form to run");
        throw InputError("design has no usable parallel form" + (doc.notes.empty() ? "" : ": " + doc.notes.front()));
      }
      if (family == FilterFamily::arma1) {
        if (doc.parallel->order() != 1) throw InputError("family arma1 needs a design of order 1");
        FilterSpec f = FilterSpec::make_parallel(*doc.parallel);
        f.family = FilterFamily::arma1;
        return f;
      }
      return FilterSpec::make_parallel(*doc.parallel);
    }
    case FilterFamily::periodic:
      if (!doc.rational) throw InputError("family periodic needs an ARMA design document");
      if (!doc.periodic) {
        if (doc.stability && !doc.stability->stable)
          throw StabilityError("design has poles inside the stability disk; no periodic form to run");
        throw InputError("design has no usable periodic form" + (doc.notes.empty() ? "" : ": " + doc.notes.front()));
      }
      return FilterSpec::make_periodic(*doc.periodic);
  }
  throw InputError("unknown family");
}

std::vector<double> load_vector(const json& v, const fs::path& base, std::size_t n, const char* what) {
  std::vector<double> x;
  if (v.is_string()) {
    x = read_signal_csv_file(resolve(base, v.get<std::string>()).string());
  } else if (v.is_array()) {
    x = v.get<std::vector<double>>();
  } else {
    throw InputError(std::string(what) + " must be a CSV path or an array");
  }
  if (x.size() != n)
    throw InputError(std::string(what) + " has " + std::to_string(x.size()) + " entries but the graph has " +
                     std::to_string(n) + " nodes");
  return x;
}

SignalProvider load_signal(const json& cfg, const fs::path& base, const Graph& graph) {
  const std::size_t n = graph.node_count();
  if (!cfg.contains("signal")) throw InputError("config needs \"signal\"");
  const json& s = cfg["signal"];
  if (s.is_string() || s.is_array()) return constant_signal(load_vector(s, base, n, "signal"));
  const std::string builtin = get_or<std::string>(s, "builtin", "");
  if (builtin == "constant") return constant_signal(load_vector(s.at("values"), base, n, "signal"));
  if (builtin == "degree") {
    auto d = graph.degrees();
    return constant_signal(std::vector<double>(d.begin(), d.end()));
  }
  if (builtin == "switch")
    return switch_signal(load_vector(s.at("a"), base, n, "signal a"), load_vector(s.at("b"), base, n, "signal b"),
                         s.at("at").get<std::size_t>());
  if (builtin == "sinusoid")
    return sinusoid_signal(load_vector(s.at("values"), base, n, "signal"), s.at("omega").get<double>());
  if (builtin == "series") {
    auto series = read_signal_series_csv_file(resolve(base, s.at("file").get<std::string>()).string());
    for (const auto& [t, v] : series)
      if (v.size() != n) throw InputError("signal series row " + std::to_string(t) + " does not match the node count");
    return series_signal(std::move(series));
  }
  throw InputError("unknown signal builtin '" + builtin + "' (constant, degree, switch, sinusoid, series)");
}

InitialCondition load_initial(const json& cfg, const fs::path& base, std::size_t n, std::uint64_t seed) {
  if (!cfg.contains("initial")) return InitialCondition::zero();
  const json& v = cfg["initial"];
  if (v.is_string() && v.get<std::string>() == "zero") return InitialCondition::zero();
  if (v.is_string() && v.get<std::string>() == "random") return InitialCondition::random(seed);
  if (v.is_object() && v.contains("values")) return InitialCondition::given(load_vector(v["values"], base, n, "initial"));
  throw InputError("initial must be \"zero\", \"random\" or {\"values\": ...}");
}

json accounting_json(const AccountingReport& rep, const Engine& engine) {
  std::size_t max_sent = 0, max_stored = 0;
  for (auto v : rep.max_sent_per_round) max_sent = std::max(max_sent, v);
  for (auto v : rep.max_stored_per_node) max_stored = std::max(max_stored, v);
  double max_per_output = 0;
  for (double v : rep.sent_per_output) max_per_output = std::max(max_per_output, v);
  json per_node = json::array();
  for (std::size_t i = 0; i < rep.max_sent_per_round.size(); ++i)
    per_node.push_back({{"node", i + 1},
                        {"degree", engine.table().degree(i)},
                        {"max_sent_per_round", rep.max_sent_per_round[i]},
                        {"sent_per_output", rep.sent_per_output[i]},
                        {"max_stored", rep.max_stored_per_node[i]}});
  return {{"rounds", rep.rounds},
          {"outputs", rep.outputs},
          {"total_scalars", rep.total_scalars},
          {"max_sent_per_node_per_round", max_sent},
          {"max_sent_per_node_per_output", max_per_output},
          {"max_stored_per_node", max_stored},
          {"per_node", per_node}};
}

int cmd_simulate(const Invocation& inv, std::ostream& out) {
  json cfg = load_config(inv, true);
  const fs::path base = base_dir(inv.config);
  if (inv.family) cfg["family"] = *inv.family;
  if (inv.rounds) cfg["rounds"] = *inv.rounds;
  const std::uint64_t seed = effective_seed(inv, cfg);

  GraphContext gc = load_graph(cfg, base);
  const std::string family = get_or<std::string>(cfg, "family", "parallel");
  const long long rounds_raw = get_or<long long>(cfg, "rounds", 100);
  if (rounds_raw < 0) throw InputError("rounds must be >= 0");
  const auto rounds = static_cast<std::size_t>(rounds_raw);

  const auto cfg_iv = config_interval(cfg);
  const SpectralInterval op_default = cfg_iv.value_or(default_interval(gc.graph, gc.variant));
  std::string source;
  FilterSpec filter = load_filter(cfg, base, family, op_default, source);
  const SpectralInterval iv = filter.interval();
  if (cfg_iv && (cfg_iv->lambda_min != iv.lambda_min || cfg_iv->lambda_max != iv.lambda_max))
    throw InputError("config interval differs from the design's interval");

  SignalProvider signal = load_signal(cfg, base, gc.graph);
  InitialCondition initial = load_initial(cfg, base, gc.graph.node_count(), seed);
  EngineOptions opts;
  opts.force = inv.force;
  opts.policy = get_or<std::string>(cfg, "policy", "openmp") == "serial" ? ExecutionPolicy::serial : ExecutionPolicy::openmp;

  NodeTable table = build_node_table(gc.graph, gc.variant, iv);
  Engine engine(filter, table, signal(0), opts, initial);
  Trace trace = run_time_varying(engine, rounds, signal, {});

  json summary{{"subcommand", "simulate"},
               {"config", cfg},
               {"seed", seed},
               {"family", family},
               {"filter_source", source},
               {"operator", to_string(gc.variant)},
               {"interval", {iv.lambda_min, iv.lambda_max}},
               {"rounds", rounds},
               {"force", inv.force},
               {"universal_contraction", universal_contraction(filter)}};

  json final_j = json::array();
  for (double v : engine.output()) final_j.push_back(v);
  summary["final_round"] = engine.round();
  summary["final_output"] = final_j;
  summary["final_output_round"] = trace.rows.empty() ? 0 : [&] {
    std::size_t t = 0;
    for (const auto& r : trace.rows)
      if (r.valid) t = r.t;
    return t;
  }();
  summary["max_imag"] = engine.output_max_imag();

  if (gc.graph.node_count() <= kDenseDecompositionCap) {
    ShiftOperator op = build_shift_operator(gc.graph, gc.variant, iv);
    Spectrum spectrum = eigendecompose(op);
    std::vector<double> mu(spectrum.mu.data(), spectrum.mu.data() + spectrum.size());
    summary["spectral_contraction"] = spectral_contraction(filter, mu);
    if (spectrum.interval_warning) summary["interval_warning"] = *spectrum.interval_warning;
    try {
      // Steady-state oracle for the most recent input; exact for static signals.
      auto target = apply_filter_exact(engine.signal(), spectrum,
                                       [&filter](double m) { return static_cast<double>(filter.response(m).real()); });
      summary["final_error"] = relative_error(engine.output(), target);
    } catch (const NumericalError& e) {
      summary["final_error_note"] = e.what();
    }
  }
  summary["accounting"] = accounting_json(accounting_report(trace), engine);

  Output files(inv);
  {
    auto f = files.open("trace.csv");
    write_trace_csv(f, trace);
  }
  summary["outputs"] = files.written();
  files.write_json("simulate_summary.json", summary);

  out << "family: " << family << "\nrounds: " << rounds << "\nfinal_output:";
  for (double v : engine.output()) out << ' ' << std::setprecision(10) << v;
  out << '\n';
  if (summary.contains("final_error")) out << "final_error: " << summary["final_error"].get<double>() << '\n';
  return 0;
}

// ---- analyze ------------------------------------------------------------------

int cmd_analyze(const Invocation& inv, std::ostream& out) {
  json cfg = load_config(inv, true);
  const fs::path base = base_dir(inv.config);
  if (inv.family) cfg["family"] = *inv.family;
  if (!cfg.contains("design")) throw InputError("config needs \"design\"");
  const fs::path dp = resolve(base, cfg["design"].get<std::string>());
  DesignDocument doc = read_design_file(dp);

  json summary{{"subcommand", "analyze"}, {"config", cfg}, {"design", dp.string()}};
  bool stable = true;
  if (doc.rational) {
    const auto& rep = *doc.stability;
    json poles = json::array();
    for (std::size_t i = 0; i < rep.poles.size(); ++i)
      poles.push_back({{"re", static_cast<double>(rep.poles[i].real())},
                       {"im", static_cast<double>(rep.poles[i].imag())},
                       {"margin", rep.margins[i]}});
    summary["stability"] = {{"stable", rep.stable}, {"radius", rep.radius}, {"poles", poles}};
    stable = rep.stable;
    if (doc.periodic_stability) {
      summary["periodic_stability"] = {{"stable", doc.periodic_stability->stable},
                                       {"sup_contraction", doc.periodic_stability->sup_contraction},
                                       {"endpoint_product", doc.periodic_stability->endpoint_product}};
    }
    out << "stable: " << (stable ? "true" : "false") << "\nradius: " << rep.radius << '\n';
    for (const auto& p : poles) out << "pole " << p["re"] << " " << p["im"] << " margin " << p["margin"] << '\n';
  } else {
    out << "stable: true (FIR)\n";
  }
  if (!doc.notes.empty()) summary["notes"] = doc.notes;

  Output files(inv);
  if (stable && doc.rational) {
    const std::string family = get_or<std::string>(cfg, "family", doc.parallel ? "parallel" : "periodic");
    std::string source;
    json dcfg{{"design", dp.string()}};
    FilterSpec filter = load_filter(dcfg, {}, family, doc.rational->interval, source);
    const auto wp = get_or<std::size_t>(cfg, "omega_points", 64);
    const auto mp = get_or<std::size_t>(cfg, "mu_points", 64);
    auto f = files.open("transfer_grid.csv");
    write_transfer_grid_csv(f, filter, wp, mp);
    summary["family"] = family;
  }
  summary["outputs"] = files.written();
  files.write_json("analyze_summary.json", summary);
  if (!stable) {
    out << "refusing: design has poles inside the stability disk\n";
    return 3;
  }
  return 0;
}

// ---- experiment ---------------------------------------------------------------

std::vector<std::size_t> size_list(const json& j, const char* key, std::vector<std::size_t> fallback) {
  return get_or<std::vector<std::size_t>>(j, key, std::move(fallback));
}

int cmd_experiment(const Invocation& inv, std::ostream& out) {
  json cfg = load_config(inv, true);
  const std::string scenario = get_or<std::string>(cfg, "scenario", "");
  const std::uint64_t seed = effective_seed(inv, cfg);
  Output files(inv);
  json summary{{"subcommand", "experiment"}, {"scenario", scenario}, {"seed", seed}};

  if (scenario == "fig1") {
    ResponseFitConfig c;
    c.orders = size_list(cfg, "orders", c.orders);
    if (inv.order) c.orders = {*inv.order};
    c.kind = inv.kind.value_or(get_or<std::string>(cfg, "kind", c.kind));
    if (auto iv = config_interval(cfg)) c.interval = *iv;
    c.curve_points = get_or<std::size_t>(cfg, "curve_points", c.curve_points);
    auto r = experiment_response_fit(c);
    {
      auto f = files.open("fig1.csv");
      write_fig1_csv(f, r);
    }
    json errs = json::array();
    for (std::size_t k = 0; k < r.orders.size(); ++k) {
      errs.push_back({{"order", r.orders[k]}, {"arma_l2", r.arma_l2[k]}, {"fir_l2", r.fir_l2[k]}, {"fallback", r.fallbacks[k]}});
      out << "K=" << r.orders[k] << " arma_l2=" << r.arma_l2[k] << " fir_l2=" << r.fir_l2[k] << '\n';
    }
    summary["config"] = {{"orders", c.orders}, {"kind", c.kind}, {"interval", {c.interval.lambda_min, c.interval.lambda_max}},
                         {"curve_points", c.curve_points}};
    summary["errors"] = errs;
  } else if (scenario == "fig2") {
    ConvergenceConfig c;
    c.node_count = get_or<std::size_t>(cfg, "node_count", c.node_count);
    c.order = inv.order.value_or(get_or<std::size_t>(cfg, "order", c.order));
    c.kind = inv.kind.value_or(get_or<std::string>(cfg, "kind", c.kind));
    c.rounds = inv.rounds.value_or(get_or<std::size_t>(cfg, "rounds", c.rounds));
    c.seed = seed;
    auto r = experiment_convergence(c);
    {
      auto f = files.open("fig2.csv");
      write_fig2_csv(f, r);
    }
    json finals = json::object();
    for (const auto& s : r.series) {
      finals[s.filter] = s.error.back();
      out << s.filter << " final_error=" << s.error.back() << '\n';
    }
    summary["config"] = {{"node_count", c.node_count}, {"order", c.order}, {"kind", c.kind}, {"rounds", c.rounds}};
    summary["final_errors"] = finals;
    summary["gamma_parallel"] = r.gamma_parallel;
    summary["gamma_periodic"] = r.gamma_periodic;
  } else if (scenario == "fig3") {
    MobilityConfig c;
    c.speeds = get_or<std::vector<double>>(cfg, "speeds", c.speeds);
    c.node_count = get_or<std::size_t>(cfg, "node_count", c.node_count);
    c.box = get_or<double>(cfg, "box", c.box);
    c.range = get_or<double>(cfg, "range", c.range);
    c.pause = get_or<std::size_t>(cfg, "pause", c.pause);
    c.duration = get_or<std::size_t>(cfg, "duration", c.duration);
    c.eval_every = get_or<std::size_t>(cfg, "eval_every", c.eval_every);
    c.repetitions = inv.repetitions.value_or(get_or<std::size_t>(cfg, "repetitions", c.repetitions));
    c.order = inv.order.value_or(get_or<std::size_t>(cfg, "order", c.order));
    c.kind = inv.kind.value_or(get_or<std::string>(cfg, "kind", c.kind));
    if (cfg.contains("lambda_max")) c.lambda_max = cfg["lambda_max"].get<double>();
    c.seed = seed;
    auto r = experiment_mobility(c);
    {
      auto f = files.open("fig3.csv");
      write_fig3_csv(f, r);
    }
    files.write_json("fig3_metadata.json", r.metadata);
    for (std::size_t s = 0; s < r.speeds.size(); ++s)
      for (std::size_t f = 0; f < r.filters.size(); ++f)
        out << "speed=" << r.speeds[s] << " " << r.filters[f] << " mean=" << r.mean[f][s] << '\n';
    summary["config"] = r.metadata;
  } else {
    throw InputError("scenario must be fig1, fig2 or fig3");
  }
  summary["outputs"] = files.written();
  files.write_json("experiment_summary.json", summary);
  return 0;
}

// ---- spectrum -----------------------------------------------------------------

int cmd_spectrum(const Invocation& inv, std::ostream& out) {
  json cfg = load_config(inv, true);
  GraphContext gc = load_graph(cfg, base_dir(inv.config));
  ShiftOperator op = build_shift_operator(gc.graph, gc.variant, config_interval(cfg));
  Spectrum spectrum = eigendecompose(op);
  Output files(inv);
  {
    auto f = files.open("spectrum.csv");
    write_spectrum_csv(f, spectrum);
  }
  json summary{{"subcommand", "spectrum"},
               {"config", cfg},
               {"operator", to_string(gc.variant)},
               {"interval", {op.interval.lambda_min, op.interval.lambda_max}},
               {"node_count", gc.graph.node_count()}};
  if (spectrum.interval_warning) {
    summary["interval_warning"] = *spectrum.interval_warning;
    out << "warning: " << *spectrum.interval_warning << '\n';
  }
  summary["outputs"] = files.written();
  files.write_json("spectrum_summary.json", summary);
  out << "nodes: " << gc.graph.node_count() << "\nlambda_max: " << spectrum.lambda(spectrum.size() - 1) << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Universal ARMA graph filters: design, distributed simulation and analysis"};
  app.require_subcommand(1);
  Invocation inv;

  auto add_common = [&inv](CLI::App* sub) {
    sub->add_option("--config", inv.config, "JSON config file");
    sub->add_option("--out", inv.out_dir, "output directory (created if absent)");
    sub->add_option("--seed", inv.seed, "random seed override");
    sub->add_flag("--force", inv.force, "overwrite outputs and run unstable filters");
    sub->add_flag("--verbose", inv.verbose, "echo written files");
  };
  auto* design = app.add_subcommand("design", "fit a FIR or ARMA design");
  add_common(design);
  design->add_option("--order", inv.order, "filter order K");
  design->add_option("--kind", inv.kind, "step, window or custom_sampled");
  design->add_option("--family", inv.family, "arma or fir");

  auto* simulate = app.add_subcommand("simulate", "run a filter on a graph, round by round");
  add_common(simulate);
  simulate->add_option("--family", inv.family, "fir, arma1, parallel or periodic");
  simulate->add_option("--rounds", inv.rounds, "number of rounds T");

  auto* analyze = app.add_subcommand("analyze", "stability report and transfer-function grid");
  add_common(analyze);
  analyze->add_option("--family", inv.family, "parallel or periodic");

  auto* experiment = app.add_subcommand("experiment", "response fits, convergence traces, mobility");
  add_common(experiment);
  experiment->add_option("--order", inv.order, "filter order K");
  experiment->add_option("--kind", inv.kind, "step or window");
  experiment->add_option("--rounds", inv.rounds, "rounds (fig2)");
  experiment->add_option("--reps", inv.repetitions, "repetitions (fig3)");

  auto* spectrum = app.add_subcommand("spectrum", "eigendecomposition of the graph operator");
  add_common(spectrum);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    int code = 0;
    std::ostringstream buf;
    if (*design) code = cmd_design(inv, buf);
    else if (*simulate) code = cmd_simulate(inv, buf);
    else if (*analyze) code = cmd_analyze(inv, buf);
    else if (*experiment) code = cmd_experiment(inv, buf);
    else if (*spectrum) code = cmd_spectrum(inv, buf);
    out << buf.str();
    if (inv.verbose) out << "output directory: " << fs::absolute(inv.out_dir).string() << '\n';
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace garma
