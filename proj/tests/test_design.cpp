#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "garma/design.hpp"
#include "garma/polynomial.hpp"
#include "garma/response.hpp"

using namespace garma;

namespace {

const SpectralInterval kUnit{0.0, 2.0};

// Weighted residual of the best polynomial fit via normal equations in
// extended precision, in a centered monomial basis.
double normal_equations_residual(const std::function<double(double)>& f, double lo, double hi, std::size_t degree,
                                 std::size_t grid_size) {
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  Grid g = uniform_grid(lo, hi, grid_size);
  const long double mid = 0.5L * (lo + hi), half = 0.5L * (hi - lo);
  const auto m = static_cast<Eigen::Index>(degree + 1);
  MatL G = MatL::Zero(m, m);
  VecL r = VecL::Zero(m);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    VecL row(m);
    long double t = (g.x[i] - mid) / half, p = 1;
    for (Eigen::Index k = 0; k < m; ++k, p *= t) row(k) = p;
    G += g.w[i] * row * row.transpose();
    r += g.w[i] * f(g.x[i]) * row;
  }
  VecL c = G.ldlt().solve(r);
  long double acc = 0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    long double t = (g.x[i] - mid) / half, p = 1, v = 0;
    for (Eigen::Index k = 0; k < m; ++k, p *= t) v += c(k) * p;
    const long double e = v - f(g.x[i]);
    acc += g.w[i] * e * e;
  }
  return static_cast<double>(std::sqrt(acc));
}

template <class F>
double grid_residual(const F& approx, const std::function<double(double)>& f, double lo, double hi,
                     std::size_t grid_size) {
  Grid g = uniform_grid(lo, hi, grid_size);
  long double acc = 0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const long double e = approx(g.x[i]) - f(g.x[i]);
    acc += g.w[i] * e * e;
  }
  return static_cast<double>(std::sqrt(acc));
}

double horner_d(const std::vector<double>& c, double x) {
  long double acc = 0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return static_cast<double>(acc);
}

void check_forms_agree(const ArmaDesign& d, double tol) {
  Grid g = uniform_grid(d.rational.interval.mu_min(), d.rational.interval.mu_max(), 1000);
  auto r = evaluate_response(d.rational, std::span<const double>(g.x));
  auto p = evaluate_response(d.parallel, std::span<const double>(g.x));
  auto q = evaluate_response(d.periodic, std::span<const double>(g.x));
  CHECK(relative_sup_difference(p, r) <= tol);
  CHECK(relative_sup_difference(q, r) <= tol);
}

}  // namespace

TEST_CASE("map_to_mu substitutes and reflects the axis") {
  auto lin = DesiredResponse::function(kUnit, [](double l) { return l; });
  auto g = map_to_mu(lin);
  CHECK(g.mu_min == doctest::Approx(-1.0));
  CHECK(g.mu_max == doctest::Approx(1.0));
  for (double mu : {-1.0, -0.3, 0.0, 0.7, 1.0}) CHECK(g(mu) == doctest::Approx(1.0 - mu));
  auto step = map_to_mu(DesiredResponse::step(kUnit, 0.5));
  CHECK(step(0.6) == doctest::Approx(1.0));   // lambda = 0.4
  CHECK(step(0.4) == doctest::Approx(0.0));   // lambda = 0.6
  auto flat = map_to_mu(DesiredResponse::function(kUnit, [](double) { return 3.0; }));
  CHECK(flat(0.25) == doctest::Approx(3.0));
}

TEST_CASE("design_fir exact members and a normal-equations oracle") {
  auto lin = design_fir(DesiredResponse::function(kUnit, [](double l) { return l; }), 1);
  REQUIRE(lin.h.size() == 2);
  CHECK(std::abs(lin.h[0]) < 1e-12);
  CHECK(lin.h[1] == doctest::Approx(1.0).epsilon(1e-12));

  auto c = design_fir(DesiredResponse::function(kUnit, [](double) { return 0.7; }), 0);
  REQUIRE(c.h.size() == 1);
  CHECK(c.h[0] == doctest::Approx(0.7).epsilon(1e-12));

  auto step = DesiredResponse::step(kUnit);
  auto fir = design_fir(step, 10);
  auto f = [&](double l) { return step(l); };
  const double ours = grid_residual([&](double l) { return horner_d(fir.h, l); }, f, 0.0, 2.0, 1000);
  const double oracle = normal_equations_residual(f, 0.0, 2.0, 10, 1000);
  CHECK(std::abs(ours - oracle) < 1e-8);

  CHECK_THROWS_AS(design_fir(step, 10, 5), DesignError);
}

TEST_CASE("chebyshev prefit recovers polynomials and matches a monomial oracle") {
  const std::vector<double> p{0.3, -1.2, 0.5, 0.25, -0.125};
  auto fit = chebyshev_prefit([&](double x) { return horner_d(p, x); }, -1.0, 1.0, 4);
  REQUIRE(fit.size() == 5);
  for (std::size_t k = 0; k < p.size(); ++k) CHECK(std::abs(fit[k] - p[k]) < 1e-8);

  auto zero = chebyshev_prefit([](double) { return 0.0; }, -1.0, 1.0, 3);
  for (double v : zero) CHECK(v == 0.0);

  auto g = map_to_mu(DesiredResponse::step(kUnit));
  auto step_fit = chebyshev_prefit(g.g, -1.0, 1.0, 6);
  const double ours = grid_residual([&](double x) { return horner_d(step_fit, x); }, g.g, -1.0, 1.0, 1000);
  CHECK(std::abs(ours - normal_equations_residual(g.g, -1.0, 1.0, 6, 1000)) < 1e-6);
}

TEST_CASE("shank step 1 on a truncated geometric series") {
  const double c = 0.3;
  std::vector<double> g_hat;
  for (int k = 0; k < 6; ++k) g_hat.push_back(std::pow(c, k));
  auto a = shank_step1_denominator(g_hat, 1);
  REQUIRE(a.size() == 1);
  CHECK(std::abs(a[0] + c) < 1e-3);

  auto flat = shank_step1_denominator(std::vector<double>{2.0, 0.0, 0.0}, 1);
  CHECK(flat[0] == doctest::Approx(0.0));
}

TEST_CASE("shank step 2 recovers exact members and zero") {
  const std::vector<double> a{-0.3, 0.02};
  auto g = [&](double mu) { return 1.0 / (1.0 + a[0] * mu + a[1] * mu * mu); };
  auto b = shank_step2_numerator(g, -1.0, 1.0, a, 2);
  REQUIRE(b.size() == 2);
  CHECK(std::abs(b[0] - 1.0) < 1e-8);
  CHECK(std::abs(b[1]) < 1e-8);

  auto z = shank_step2_numerator([](double) { return 0.0; }, -1.0, 1.0, a, 2);
  CHECK(std::abs(z[0]) < 1e-15);
  CHECK(std::abs(z[1]) < 1e-15);
}

TEST_CASE("stability check margins") {
  RationalDesign ok{{1.0}, {-0.4}, kUnit};
  auto rep = check_stability_rational(ok);
  REQUIRE(rep.poles.size() == 1);
  CHECK(static_cast<double>(rep.poles[0].real()) == doctest::Approx(2.5));
  CHECK(rep.margins[0] == doctest::Approx(1.5));
  CHECK(rep.stable);

  RationalDesign bad{{1.0}, {-2.0}, kUnit};
  auto rb = check_stability_rational(bad);
  CHECK(rb.margins[0] == doctest::Approx(-0.5));
  CHECK_FALSE(rb.stable);

  RationalDesign fir{{1.0}, {}, kUnit};
  CHECK(check_stability_rational(fir).stable);
  CHECK(check_stability_rational(fir).poles.empty());
}

TEST_CASE("to_parallel: symbolic partial fractions and the first-order case") {
  // 2 mu / (mu^2 - 4) = (-mu / 2) / (1 - mu^2 / 4) = 1/(mu-2) + 1/(mu+2)
  RationalDesign d{{0.0, -0.5}, {0.0, -0.25}, kUnit};
  auto form = to_parallel(d);
  REQUIRE(form.order() == 2);
  for (const auto& br : form.branches) {
    CHECK(std::abs(br.residue() - Complex(1)) < 1e-12L);
    CHECK(std::abs(std::abs(br.pole()) - 2.0L) < 1e-12L);
  }
  CHECK(std::abs(form.branches[0].pole() + form.branches[1].pole()) < 1e-12L);

  // K = 1 with a_1 = -psi: pole 1/psi, residue -phi/psi.
  const double psi = 0.4, phi = 0.7;
  RationalDesign one{{phi}, {-psi}, kUnit};
  auto f1 = to_parallel(one);
  REQUIRE(f1.order() == 1);
  CHECK(std::abs(f1.branches[0].psi - Complex(psi)) < 1e-14L);
  CHECK(std::abs(f1.branches[0].phi - Complex(phi)) < 1e-14L);
  CHECK(std::abs(f1.branches[0].pole() - Complex(1 / psi)) < 1e-12L);
  CHECK(std::abs(f1.branches[0].residue() - Complex(-phi / psi)) < 1e-12L);
}

TEST_CASE("to_parallel: conjugate pairs give a real response") {
  // poles 1.5 +- 2i and 3
  std::vector<Complex> poles{Complex(1.5, 2), Complex(1.5, -2), Complex(3)};
  auto pa = poly::from_reciprocal_roots(poles);
  RationalDesign d{{0.5, 0.1, -0.2}, {}, kUnit};
  for (std::size_t k = 1; k < pa.size(); ++k) d.a.push_back(static_cast<double>(pa[k].real()));
  auto form = to_parallel(d);
  REQUIRE(form.order() == 3);
  int complex_branches = 0;
  for (const auto& br : form.branches) complex_branches += br.psi.imag() != 0;
  CHECK(complex_branches == 2);
  for (double mu = -1.0; mu <= 1.0; mu += 0.01) CHECK(std::abs(evaluate_response(form, mu).imag()) < 1e-10L);
}

TEST_CASE("to_parallel rejects repeated poles and high numerators") {
  RationalDesign rep{{1.0}, {-1.0, 0.25}, kUnit};  // (1 - mu/2)^2
  CHECK_THROWS_AS(to_parallel(rep), DesignError);
  RationalDesign high{{1.0, 1.0}, {-0.2}, kUnit};
  CHECK_THROWS_AS(to_parallel(high), DesignError);
}

TEST_CASE("to_periodic first-order reduction and a_K = 0 rejection") {
  RationalDesign d{{0.8}, {-0.3}, kUnit};
  auto f = to_periodic(d);
  REQUIRE(f.period() == 1);
  CHECK(f.theta[0] == 0);
  CHECK(std::abs(f.psi[0] - Complex(0.3)) < 1e-15L);
  CHECK(std::abs(f.phi[0] - Complex(0.8)) < 1e-15L);
  for (double mu : {-1.0, 0.0, 0.5, 1.0})
    CHECK(std::abs(evaluate_response(f, mu) - Complex(0.8 / (1 - 0.3 * mu))) < 1e-15L);

  RationalDesign degenerate{{1.0, 0.0}, {-0.2, 0.0}, kUnit};
  CHECK_THROWS_AS(to_periodic(degenerate), DesignError);
}

TEST_CASE("evaluate_response closed forms") {
  auto single = arma1_form(Complex(0.5), Complex(1.0), kUnit);  // r = -2, p = 2
  CHECK(std::abs(evaluate_response(single, 1.0) - Complex(2)) < 1e-15L);
  CHECK(std::abs(evaluate_response(single, -1.0) - Complex(2.0L / 3)) < 1e-15L);
  CHECK(std::isnan(static_cast<double>(evaluate_response(single, 2.0).real())));

  FirDesign fir{{0.0, 1.0}, kUnit};
  CHECK(static_cast<double>(evaluate_response(fir, 1.0 - 1.5).real()) == doctest::Approx(1.5));
}

TEST_CASE("pipeline designs agree across forms and pass every stability check") {
  for (const char* kind : {"step", "window"}) {
    for (std::size_t K : {1, 2, 3, 5, 10}) {
      CAPTURE(kind);
      CAPTURE(K);
      auto resp = std::string(kind) == "step" ? DesiredResponse::step(kUnit) : DesiredResponse::window(kUnit);
      auto d = design_arma(resp, K);
      CHECK(d.stability.stable);
      CHECK(check_stability_rational(d.rational).stable);
      CHECK(check_stability_periodic(d.periodic).stable);
      CHECK(d.parallel.order() == K);
      CHECK(d.periodic.period() == K);
      check_forms_agree(d, 1e-6);
      // conjugate closure of the branches
      for (const auto& br : d.parallel.branches) {
        if (br.psi.imag() == 0) continue;
        bool found = false;
        for (const auto& other : d.parallel.branches)
          found = found || (other.psi == std::conj(br.psi) && other.phi == std::conj(br.phi));
        CHECK(found);
      }
    }
  }
}

TEST_CASE("step design error does not grow with the order") {
  auto step = DesiredResponse::step(kUnit);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t K : {1, 5, 10}) {
    auto d = design_arma(step, K);
    CAPTURE(K);
    CHECK(d.l2_error <= prev);
    prev = d.l2_error;
  }
}

TEST_CASE("step design of order 5 is close to the FIR of equal order") {
  auto step = DesiredResponse::step(kUnit);
  auto d = design_arma(step, 5);
  auto fir = design_fir(step, 5);
  CHECK(d.l2_error <= 1.5 * l2_error(fir, map_to_mu(step)));
  for (double m : d.stability.margins) CHECK(m > 1e-6);
}

TEST_CASE("rational targets are recovered with a long prefit") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mag(1.8, 3.0), coef(-1.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t K = 1 + trial % 3;
    std::vector<Complex> poles;
    for (std::size_t k = 0; k < K; ++k) poles.push_back(Complex((k % 2 ? -1 : 1) * mag(rng) * (1 + 0.1 * k)));
    auto pa = poly::from_reciprocal_roots(poles);
    std::vector<double> a, b(K);
    for (std::size_t k = 1; k < pa.size(); ++k) a.push_back(static_cast<double>(pa[k].real()));
    for (auto& v : b) v = coef(rng);
    b[0] += 1.5;
    RationalDesign truth{b, a, kUnit};
    auto h = DesiredResponse::function(kUnit, [&](double l) {
      return static_cast<double>(evaluate_response(truth, kUnit.translation() - l).real());
    });
    DesignOptions opt;
    opt.prefit_order = std::max<std::size_t>(2 * K, 14);
    auto d = design_arma(h, K, opt);
    CAPTURE(trial);
    CHECK(d.fallback == "none");
    Grid g = uniform_grid(-1.0, 1.0, 1000);
    double worst = 0;
    for (double mu : g.x)
      worst = std::max(worst, static_cast<double>(std::abs(evaluate_response(d.rational, mu) - evaluate_response(truth, mu))));
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("flat targets give memoryless implementations") {
  auto flat = DesiredResponse::function(kUnit, [](double) { return 0.6; });
  for (std::size_t K : {1, 3, 5}) {
    auto d = design_arma(flat, K);
    CAPTURE(K);
    CHECK(d.l2_error < 1e-8);
    check_forms_agree(d, 1e-12);
    for (const auto& br : d.parallel.branches) CHECK(br.psi == Complex{});
  }
}

TEST_CASE("design_arma input validation") {
  auto step = DesiredResponse::step(kUnit);
  CHECK_THROWS_WITH_AS(design_arma(step, 0), doctest::Contains("order must be"), DesignError);
  DesignOptions opt;
  opt.prefit_order = 3;
  CHECK_THROWS_AS(design_arma(step, 3, opt), DesignError);
}
