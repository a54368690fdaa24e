#include "garma/temporal.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

namespace garma {

namespace {

void check_z(Complex z, const TransferOptions& options) {
  if (!options.allow_interior && std::abs(z) < 1.0L - 1e-12L)
    throw InputError("transfer functions are evaluated on |z| >= 1; set allow_interior to go inside");
}

Complex checked_div(Complex num, Complex den) {
  if (std::abs(den) == 0) {
    const Real nan = std::numeric_limits<Real>::quiet_NaN();
    return {nan, nan};
  }
  return num / den;
}

}  // namespace

Complex arma1_transfer(Complex psi, Complex phi, Complex z, double mu, TransferOptions options) {
  check_z(z, options);
  return checked_div(phi, z - psi * static_cast<Real>(mu));
}

Complex parallel_transfer(const ParallelForm& form, Complex z, double mu, TransferOptions options) {
  check_z(z, options);
  Complex sum{};
  for (const auto& br : form.branches) sum += checked_div(br.phi, z - br.psi * static_cast<Real>(mu));
  return sum;
}

Complex periodic_transfer(const PeriodicForm& form, Complex z, double mu, TransferOptions options) {
  check_z(z, options);
  // One period maps y -> A y + B x with A = prod (theta + psi mu) and B the
  // accumulated input gains.
  const std::size_t K = form.period();
  const Real m = mu;
  Complex A(1.0L), B{};
  for (std::size_t t = 0; t < K; ++t) {
    const Complex g = form.theta[t] + form.psi[t] * m;
    A *= g;
    B = g * B + form.phi[t];
  }
  return checked_div(B, z - A);
}

Complex filter_transfer(const FilterSpec& filter, Complex z, double mu, TransferOptions options) {
  switch (filter.family) {
    case FilterFamily::periodic: return periodic_transfer(filter.periodic, z, mu, options);
    case FilterFamily::arma1:
    case FilterFamily::parallel: return parallel_transfer(filter.parallel, z, mu, options);
    case FilterFamily::fir: break;
  }
  throw InputError("FIR filters have no temporal recursion");
}

double principal_phase(Complex value) {
  double p = static_cast<double>(std::arg(value));
  if (p <= -std::numbers::pi) p += 2 * std::numbers::pi;
  return p;
}

TemporalGain measure_temporal_gain(const FilterSpec& filter, const NodeTable& table, const Spectrum& spectrum,
                                   const GainMeasurement& req) {
  if (filter.family == FilterFamily::fir) throw InputError("temporal gain is defined for recursive filters");
  const std::size_t n = spectrum.size();
  if (table.node_count() != n) throw InputError("spectrum and graph sizes differ");
  if (req.eigen_index >= n) throw InputError("eigenvector index out of range");

  const std::size_t P = filter.output_period();
  std::vector<double> mu(spectrum.mu.data(), spectrum.mu.data() + n);
  const double gamma_round = spectral_contraction(filter, mu);
  const double gamma = std::pow(gamma_round, static_cast<double>(P));  // per output sample
  if (!(gamma < 1.0)) throw StabilityError("temporal gain needs a contracting filter on this graph");

  std::size_t discard = static_cast<std::size_t>(std::ceil(5.0 / (1.0 - gamma)));
  if (gamma > 0) discard = std::max(discard, static_cast<std::size_t>(std::ceil(std::log(1e-9) / std::log(gamma))));
  std::size_t samples = req.periods;
  if (samples == 0) {
    samples = 256;
    if (req.omega > 0) samples = std::max(samples, static_cast<std::size_t>(std::ceil(8 * std::numbers::pi / req.omega)));
  }

  std::vector<double> phi_n(n);
  for (std::size_t i = 0; i < n; ++i) phi_n[i] = spectrum.basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(req.eigen_index));

  EngineOptions opts;
  opts.policy = req.policy;
  std::vector<double> x0(phi_n);
  Engine engine(filter, table, x0, opts, req.initial);

  std::vector<double> c, cs, sn;
  const std::size_t total = discard + samples;
  for (std::size_t s = 1; s <= total; ++s) {
    // Input for sample s - 1 is held over the whole output period.
    const double drive = std::cos(req.omega * static_cast<double>(s - 1));
    std::vector<double> x(phi_n);
    for (auto& v : x) v *= drive;
    engine.set_signal(std::move(x));
    for (std::size_t r = 0; r < P; ++r) engine.step();
    if (s <= discard) continue;
    double proj = 0;
    for (std::size_t i = 0; i < n; ++i) proj += engine.output()[i] * phi_n[i];
    c.push_back(proj);
    cs.push_back(std::cos(req.omega * static_cast<double>(s)));
    sn.push_back(std::sin(req.omega * static_cast<double>(s)));
  }

  // Least squares c ~ alpha cos + beta sin; the sine column vanishes at 0 and pi.
  double scc = 0, sss = 0, scs = 0, syc = 0, sys = 0, syy = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    scc += cs[i] * cs[i];
    sss += sn[i] * sn[i];
    scs += cs[i] * sn[i];
    syc += c[i] * cs[i];
    sys += c[i] * sn[i];
    syy += c[i] * c[i];
  }
  double alpha = 0, beta = 0;
  const double det = scc * sss - scs * scs;
  if (sss > 1e-9 * static_cast<double>(c.size()) && std::abs(det) > 1e-12 * scc * sss) {
    alpha = (syc * sss - sys * scs) / det;
    beta = (sys * scc - syc * scs) / det;
  } else {
    alpha = syc / scc;
  }
  double res = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double e = c[i] - alpha * cs[i] - beta * sn[i];
    res += e * e;
  }

  TemporalGain out;
  out.samples = c.size();
  out.discarded = discard;
  out.gain = std::hypot(alpha, beta);
  out.phase = principal_phase(Complex(alpha, -beta));
  out.residual = syy > 0 ? std::sqrt(res / syy) : 0.0;
  if (out.residual > 0.05)
    throw NumericalError("sinusoid fit residual above 5%; the transient has not decayed, run longer");
  return out;
}

void write_transfer_grid_csv(std::ostream& out, const FilterSpec& filter, std::size_t omega_points,
                             std::size_t mu_points) {
  if (omega_points < 2 || mu_points < 2) throw InputError("transfer grid needs at least 2 points per axis");
  const auto iv = filter.interval();
  out << "omega,mu,magnitude,phase\n" << std::setprecision(12);
  for (std::size_t a = 0; a < omega_points; ++a) {
    const double w = std::numbers::pi * static_cast<double>(a) / static_cast<double>(omega_points - 1);
    const Complex z = std::polar(1.0L, static_cast<Real>(w));
    for (std::size_t b = 0; b < mu_points; ++b) {
      const double mu = iv.mu_min() + (iv.mu_max() - iv.mu_min()) * static_cast<double>(b) / static_cast<double>(mu_points - 1);
      const Complex h = filter_transfer(filter, z, mu);
      out << w << ',' << mu << ',' << static_cast<double>(std::abs(h)) << ',' << principal_phase(h) << '\n';
    }
  }
}

}  // namespace garma
