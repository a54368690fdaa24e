#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "garma/engine.hpp"
#include "garma/spectrum.hpp"

using namespace garma;

namespace {

using MatC = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
using VecC = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 1>;
using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

struct Setup {
  Graph graph;
  ShiftOperator op;
  NodeTable table;
};

Setup make_setup(Graph g, OperatorVariant v) {
  Setup s{std::move(g), {}, {}};
  s.op = build_shift_operator(s.graph, v);
  s.table = build_node_table(s.graph, s.op);
  return s;
}

Graph path2() {
  Graph g(2);
  g.add_edge(0, 1);
  return g;
}

Graph cycle4() {
  Graph g(4);
  for (std::size_t i = 0; i < 4; ++i) g.add_edge(std::min(i, (i + 1) % 4), std::max(i, (i + 1) % 4));
  return g;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

VecC to_vec(const std::vector<double>& v) {
  VecC out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

double rel_diff(const std::vector<double>& y, const VecC& ref) {
  long double num = 0, den = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto r = ref(static_cast<Eigen::Index>(i)).real();
    num += (y[i] - r) * (y[i] - r);
    den += r * r;
  }
  return static_cast<double>(std::sqrt(num / den));
}

MatC dense_m(const ShiftOperator& op) { return op.M.cast<long double>().cast<std::complex<long double>>(); }

std::vector<double> ideal_output(const FilterSpec& f, const ShiftOperator& op, const std::vector<double>& x) {
  auto sp = eigendecompose(op);
  return apply_filter_exact(x, sp, [&](double mu) { return static_cast<double>(f.response(mu).real()); });
}

double norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("family names parse") {
  CHECK(parse_family("periodic") == FilterFamily::periodic);
  CHECK(to_string(FilterFamily::arma1) == "arma1");
  CHECK_THROWS_AS(parse_family("iir"), InputError);
}

TEST_CASE("FIR of order zero scales the input without messages") {
  auto s = make_setup(path2(), OperatorVariant::discrete_laplacian);
  Engine e(FilterSpec::make_fir({{1.0}, s.op.interval}), s.table, {0.3, -2.0});
  e.step();
  CHECK(e.output() == std::vector<double>{0.3, -2.0});
  CHECK(e.last_stats().scalars == 0);
}

TEST_CASE("FIR h = (0, 1) on a 2-node path returns Lx") {
  auto s = make_setup(path2(), OperatorVariant::discrete_laplacian);
  Engine e(FilterSpec::make_fir({{0.0, 1.0}, s.op.interval}), s.table, {1.0, 0.0});
  e.step();
  REQUIRE(e.output_valid());
  CHECK(e.output()[0] == doctest::Approx(1.0));
  CHECK(e.output()[1] == doctest::Approx(-1.0));
}

TEST_CASE("FIR of order 5 matches a dense Horner oracle") {
  std::mt19937_64 rng(3);
  for (auto v : {OperatorVariant::discrete_laplacian, OperatorVariant::normalized_laplacian}) {
    auto s = make_setup(random_graph(50, 0.15, rng), v);
    std::vector<double> h = random_vector(6, rng), x = random_vector(50, rng);
    Engine e(FilterSpec::make_fir({h, s.op.interval}), s.table, x);
    auto trace = run(e, 5);
    CHECK(e.output_valid());
    for (std::size_t t = 1; t < 5; ++t) CHECK_FALSE(trace.rows[t].valid);
    MatC L = s.op.L.cast<long double>().cast<std::complex<long double>>();
    VecC xv = to_vec(x), acc = VecC::Zero(50);
    for (std::size_t k = h.size(); k-- > 0;) acc = L * acc + static_cast<long double>(h[k]) * xv;
    CHECK(rel_diff(e.output(), acc) < 1e-9);
  }
}

TEST_CASE("ARMA1 on a 2-node path converges to (4/3, 2/3)") {
  auto s = make_setup(path2(), OperatorVariant::discrete_laplacian);
  Engine e(FilterSpec::make_arma1(0.5L, 1.0L, s.op.interval), s.table, {1.0, 0.0});
  for (int t = 0; t < 60; ++t) e.step();
  CHECK(std::abs(e.output()[0] - 4.0 / 3) < 1e-8);
  CHECK(std::abs(e.output()[1] - 2.0 / 3) < 1e-8);
}

TEST_CASE("ARMA1 rounds equal the dense recursion") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int trial = 0; trial < 6; ++trial) {
    auto s = make_setup(random_graph(30, 0.2, rng),
                        trial % 2 ? OperatorVariant::normalized_laplacian : OperatorVariant::discrete_laplacian);
    const Real psi = u(rng) / s.op.interval.radius(), phi = 1 + u(rng);
    auto x = random_vector(30, rng);
    Engine e(FilterSpec::make_arma1(psi, phi, s.op.interval), s.table, x);
    MatC M = dense_m(s.op);
    VecC y = VecC::Zero(30), xv = to_vec(x);
    for (int t = 0; t < 40; ++t) {
      e.step();
      y = psi * (M * y) + phi * xv;
      if (t > 0) CHECK(rel_diff(e.output(), y) < 1e-12);
    }
  }
}

TEST_CASE("homogeneous ARMA1 decays and fixed points stay put") {
  std::mt19937_64 rng(9);
  auto s = make_setup(random_graph(20, 0.3, rng), OperatorVariant::normalized_laplacian);
  Engine zero_in(FilterSpec::make_arma1(0.6L, 0.0L, s.op.interval), s.table, random_vector(20, rng), {},
                 InitialCondition::random(4));
  for (int t = 0; t < 200; ++t) zero_in.step();
  for (double v : zero_in.output()) CHECK(std::abs(v) < 1e-30);

  auto x = random_vector(20, rng);
  auto f = FilterSpec::make_arma1(0.6L, 0.8L, s.op.interval);
  auto star = ideal_output(f, s.op, x);
  Engine fixed(f, s.table, x, {}, InitialCondition::given(star));
  for (int t = 0; t < 30; ++t) {
    fixed.step();
    CHECK(relative_error(fixed.output(), star) < 1e-12);
  }
}

TEST_CASE("parallel of one branch is ARMA1") {
  std::mt19937_64 rng(2);
  auto s = make_setup(random_graph(25, 0.2, rng), OperatorVariant::discrete_laplacian);
  auto x = random_vector(25, rng);
  const Real psi = 0.5L / s.op.interval.radius();
  Engine a(FilterSpec::make_arma1(psi, 0.7L, s.op.interval), s.table, x);
  Engine p(FilterSpec::make_parallel(arma1_form(psi, 0.7L, s.op.interval)), s.table, x);
  auto ta = run(a, 30), tp = run(p, 30);
  for (std::size_t t = 0; t < ta.rows.size(); ++t) CHECK(ta.rows[t].y == tp.rows[t].y);
}

TEST_CASE("conjugate branches keep the output real") {
  std::mt19937_64 rng(6);
  auto s = make_setup(random_graph(30, 0.2, rng), OperatorVariant::normalized_laplacian);
  ParallelForm form;
  form.interval = s.op.interval;
  form.branches = {{Complex(0.3, 0.4), Complex(0.5, -0.2)}, {Complex(0.3, -0.4), Complex(0.5, 0.2)}};
  Engine e(FilterSpec::make_parallel(form), s.table, random_vector(30, rng));
  for (int t = 0; t < 50; ++t) {
    e.step();
    CHECK(e.output_max_imag() < 1e-10);
  }
}

TEST_CASE("parallel step design of order 5 reaches the ideal output on 100 nodes") {
  std::mt19937_64 rng(1);
  auto s = make_setup(random_geometric_graph(100, rng), OperatorVariant::normalized_laplacian);
  auto d = design_arma(DesiredResponse::step(s.op.interval), 5);
  auto f = FilterSpec::make_parallel(d.parallel);
  auto x = random_vector(100, rng);
  auto star = ideal_output(f, s.op, x);
  Engine e(f, s.table, x);
  for (int t = 0; t < 100; ++t) e.step();
  CHECK(relative_error(e.output(), star) < 1e-4);
}

TEST_CASE("periodic period boundaries equal the dense schedule recursion") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int trial = 0; trial < 5; ++trial) {
    auto s = make_setup(random_graph(20, 0.25, rng),
                        trial % 2 ? OperatorVariant::discrete_laplacian : OperatorVariant::normalized_laplacian);
    const Real R = s.op.interval.radius();
    PeriodicForm form;
    form.interval = s.op.interval;
    form.theta = {0, 1, 1};
    for (int t = 0; t < 3; ++t) {
      form.psi.push_back(Complex(u(rng) / R));
      form.phi.push_back(Complex(1 + u(rng)));
    }
    auto x = random_vector(20, rng);
    Engine e(FilterSpec::make_periodic(form), s.table, x);
    MatC M = dense_m(s.op);
    MatC I = MatC::Identity(20, 20);
    VecC y = VecC::Zero(20), xv = to_vec(x);
    for (std::size_t t = 0; t < 60; ++t) {
      const std::size_t tau = t % 3;
      y = (form.theta[tau] * I + form.psi[tau] * M) * y + form.phi[tau] * xv;
      e.step();
      CHECK(e.output_valid() == ((t + 1) % 3 == 0));
      if (e.output_valid()) CHECK(rel_diff(e.output(), y) < 1e-10);
    }
  }
}

TEST_CASE("periodic of period one matches ARMA1 at every boundary") {
  std::mt19937_64 rng(12);
  auto s = make_setup(random_graph(15, 0.3, rng), OperatorVariant::normalized_laplacian);
  auto x = random_vector(15, rng);
  PeriodicForm form{{0}, {Complex(0.45L)}, {Complex(0.9L)}, s.op.interval};
  Engine p(FilterSpec::make_periodic(form), s.table, x);
  Engine a(FilterSpec::make_arma1(0.45L, 0.9L, s.op.interval), s.table, x);
  for (int t = 0; t < 40; ++t) {
    p.step();
    a.step();
    CHECK(p.output() == a.output());
  }
}

TEST_CASE("periodic step design settles on the ideal output") {
  std::mt19937_64 rng(4);
  auto s = make_setup(random_geometric_graph(60, rng), OperatorVariant::normalized_laplacian);
  auto d = design_arma(DesiredResponse::step(s.op.interval), 5);
  auto f = FilterSpec::make_periodic(d.periodic);
  auto x = random_vector(60, rng);
  auto sp = eigendecompose(s.op);
  auto star = apply_filter_exact(x, sp, [&](double mu) { return static_cast<double>(evaluate_response(d.rational, mu).real()); });
  Engine e(f, s.table, x);
  const double gamma = spectral_contraction(f, std::span<const double>(sp.mu.data(), sp.size()));
  const auto rounds = static_cast<std::size_t>(5 * std::ceil(std::log(1e-8) / std::log(gamma) / 5 + 1));
  for (std::size_t t = 0; t < rounds; ++t) e.step();
  REQUIRE(e.output_valid());
  CHECK(relative_error(e.output(), star) < 1e-5);
}

TEST_CASE("input switch: ARMA1 forgets the old input") {
  std::mt19937_64 rng(15);
  auto s = make_setup(random_graph(30, 0.2, rng), OperatorVariant::normalized_laplacian);
  auto xa = random_vector(30, rng), xb = random_vector(30, rng);
  auto f = FilterSpec::make_arma1(0.8L, 1.0L, s.op.interval);
  Engine e(f, s.table, xa);
  run_time_varying(e, 400, switch_signal(xa, xb, 200), {});
  MatC M = dense_m(s.op);
  MatC I = MatC::Identity(30, 30);
  VecC star = (I - 0.8L * M).lu().solve(to_vec(xb));
  CHECK(rel_diff(e.output(), star) < 1e-6);
}

TEST_CASE("a constant provider reproduces the static run") {
  std::mt19937_64 rng(16);
  auto s = make_setup(random_graph(20, 0.3, rng), OperatorVariant::discrete_laplacian);
  auto d = design_arma(DesiredResponse::window(s.op.interval), 3);
  auto x = random_vector(20, rng);
  for (auto f : {FilterSpec::make_parallel(d.parallel), FilterSpec::make_periodic(d.periodic),
                 FilterSpec::make_fir(design_fir(DesiredResponse::window(s.op.interval), 3))}) {
    Engine a(f, s.table, x), b(f, s.table, x);
    auto ta = run(a, 24);
    auto tb = run_time_varying(b, 24, constant_signal(x), [&](std::size_t) { return std::optional<NodeTable>(s.table); });
    REQUIRE(ta.rows.size() == tb.rows.size());
    for (std::size_t t = 0; t < ta.rows.size(); ++t) CHECK(ta.rows[t].y == tb.rows[t].y);
  }
}

TEST_CASE("accounting on the 4-cycle") {
  auto s = make_setup(cycle4(), OperatorVariant::discrete_laplacian);
  const std::vector<double> x{1, 2, 3, 4};
  auto design = design_arma(DesiredResponse::step(s.op.interval), 5);
  struct Case {
    FilterSpec f;
    std::size_t per_round;
    std::size_t stored;
  };
  std::vector<Case> cases{{FilterSpec::make_arma1(0.2L, 1.0L, s.op.interval), 2, 4},
                          {FilterSpec::make_parallel(design.parallel), 10, 16},
                          {FilterSpec::make_periodic(design.periodic), 2, 4},
                          {FilterSpec::make_fir(design_fir(DesiredResponse::step(s.op.interval), 5)), 2, 4}};
  for (auto& c : cases) {
    CAPTURE(to_string(c.f.family));
    Engine e(c.f, s.table, x);
    auto trace = run(e, 20);
    auto rep = accounting_report(trace);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(rep.max_sent_per_round[i] == c.per_round);
      CHECK(rep.max_stored_per_node[i] == c.stored);
    }
    // per valid output: one round for ARMA1/parallel, K rounds for periodic and FIR
    const std::size_t rounds_per_output = c.f.output_period();
    CHECK(rep.outputs == 20 / rounds_per_output);
    for (double v : rep.sent_per_output) CHECK(v == doctest::Approx(double(c.per_round * rounds_per_output)));
    for (std::size_t t = 1; t < trace.rows.size(); ++t) CHECK(trace.rows[t].scalars == 4 * c.per_round);
  }
}

TEST_CASE("serial mailboxes and OpenMP gather give bit-identical traces") {
  std::mt19937_64 rng(21);
  auto s = make_setup(random_geometric_graph(80, rng), OperatorVariant::normalized_laplacian);
  auto d = design_arma(DesiredResponse::step(s.op.interval), 5);
  auto x = random_vector(80, rng);
  for (auto f : {FilterSpec::make_parallel(d.parallel), FilterSpec::make_periodic(d.periodic)}) {
    Engine a(f, s.table, x, {false, ExecutionPolicy::serial}, InitialCondition::random(3));
    Engine b(f, s.table, x, {false, ExecutionPolicy::openmp}, InitialCondition::random(3));
    for (int t = 0; t < 25; ++t) {
      a.step();
      b.step();
      CHECK(a.state() == b.state());
    }
  }
}

TEST_CASE("messages off the graph are rejected by the reference round") {
  NodeTable t;
  t.row_ptr = {0, 1, 1};
  t.col = {1};
  t.weight = {1.0};
  t.self_weight = {0.0, 0.0};
  std::vector<Complex> psi{Complex(0.5)}, phi{Complex(1)};
  std::vector<Complex> y(2), out(2);
  std::vector<double> x{1, 1};
  CHECK_THROWS_AS(round_serial(t, {0, psi, phi}, y, x, out), NumericalError);
}

TEST_CASE("runs from different initial conditions contract toward each other") {
  std::mt19937_64 rng(30);
  for (int trial = 0; trial < 8; ++trial) {
    auto s = make_setup(random_graph(25, 0.25, rng), OperatorVariant::normalized_laplacian);
    auto sp = eigendecompose(s.op);
    auto d = design_arma(DesiredResponse::window(s.op.interval), 1 + trial % 4);
    auto f = FilterSpec::make_parallel(d.parallel);
    const double gamma = spectral_contraction(f, std::span<const double>(sp.mu.data(), sp.size()));
    auto x = random_vector(25, rng);
    Engine a(f, s.table, x, {}, InitialCondition::random(100 + trial));
    Engine b(f, s.table, x, {}, InitialCondition::random(200 + trial));
    const double d0 = norm_diff(a.output(), b.output());
    for (int t = 1; t <= 30; ++t) {
      a.step();
      b.step();
      CHECK(norm_diff(a.output(), b.output()) <= std::pow(gamma, t) * d0 * (1 + 1e-9) + 1e-13);
    }
  }
}

TEST_CASE("unstable filters are refused unless forced") {
  auto s = make_setup(path2(), OperatorVariant::discrete_laplacian);
  auto f = FilterSpec::make_arma1(1.5L, 1.0L, s.op.interval);
  try {
    Engine e(f, s.table, {1.0, 0.0});
    FAIL("expected refusal");
  } catch (const StabilityError& err) {
    CHECK(err.exit_code() == 3);
  }
  Engine forced(f, s.table, {1.0, 0.0}, {true, ExecutionPolicy::serial});
  for (int t = 0; t < 20; ++t) forced.step();
  CHECK(std::abs(forced.output()[0]) > 100);

  PeriodicForm bad{{0, 1}, {Complex(2), Complex(2)}, {Complex(1), Complex(1)}, s.op.interval};
  CHECK_THROWS_AS(Engine(FilterSpec::make_periodic(bad), s.table, {1.0, 0.0}), StabilityError);
}

TEST_CASE("node count is fixed") {
  auto s = make_setup(path2(), OperatorVariant::discrete_laplacian);
  CHECK_THROWS_AS(Engine(FilterSpec::make_arma1(0.2L, 1.0L, s.op.interval), s.table, {1.0}), InputError);
  Engine e(FilterSpec::make_arma1(0.2L, 1.0L, s.op.interval), s.table, {1.0, 0.0});
  auto big = make_setup(cycle4(), OperatorVariant::discrete_laplacian);
  CHECK_THROWS_AS(e.step_time_varying(std::nullopt, big.table), InputError);
  CHECK_THROWS_AS(e.step_time_varying(std::vector<double>{1, 2, 3}, std::nullopt), InputError);
}

TEST_CASE("graph changes take effect on the next round") {
  std::mt19937_64 rng(40);
  auto a = make_setup(random_graph(20, 0.3, rng), OperatorVariant::normalized_laplacian);
  auto b = make_setup(random_graph(20, 0.3, rng), OperatorVariant::normalized_laplacian);
  auto x = random_vector(20, rng);
  const Real psi = 0.7L;
  Engine e(FilterSpec::make_arma1(psi, 1.0L, a.op.interval), a.table, x);
  MatC Ma = dense_m(a.op), Mb = dense_m(b.op);
  VecC y = VecC::Zero(20), xv = to_vec(x);
  for (std::size_t t = 0; t < 30; ++t) {
    const bool use_b = (t / 5) % 2 == 1;
    e.step_time_varying(std::nullopt, use_b ? b.table : a.table);
    y = psi * ((use_b ? Mb : Ma) * y) + xv;
    if (t > 0) CHECK(rel_diff(e.output(), y) < 1e-12);
  }
}

TEST_CASE("trace CSV lists valid outputs only") {
  auto s = make_setup(path2(), OperatorVariant::discrete_laplacian);
  PeriodicForm form{{0, 1}, {Complex(0.2), Complex(0.1)}, {Complex(1), Complex(0.5)}, s.op.interval};
  Engine e(FilterSpec::make_periodic(form), s.table, {1.0, 0.0});
  auto trace = run(e, 4);
  std::ostringstream os;
  write_trace_csv(os, trace);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,node,value");
  std::vector<std::string> ts;
  while (std::getline(is, line)) ts.push_back(line.substr(0, line.find(',')));
  CHECK(ts == std::vector<std::string>{"0", "0", "2", "2", "4", "4"});
}
