#include "garma/spectrum.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "garma/numeric.hpp"

namespace garma {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> s) {
  return {s.data(), static_cast<Eigen::Index>(s.size())};
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void check_size(std::size_t got, const Spectrum& spectrum) {
  if (got != spectrum.size())
    throw InputError("signal length " + std::to_string(got) + " does not match graph size " +
                     std::to_string(spectrum.size()));
}

}  // namespace

Spectrum eigendecompose(const ShiftOperator& op, std::size_t cap) {
  const auto n = op.size();
  if (n > cap) throw InputError("graph has " + std::to_string(n) + " nodes, above the dense decomposition cap");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.L);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed to converge");

  Spectrum s;
  s.lambda = solver.eigenvalues();  // Eigen returns them ascending
  s.basis = solver.eigenvectors();
  for (Eigen::Index c = 0; c < s.basis.cols(); ++c) {
    for (Eigen::Index r = 0; r < s.basis.rows(); ++r) {
      if (std::abs(s.basis(r, c)) > 1e-12) {
        if (s.basis(r, c) < 0) s.basis.col(c) *= -1.0;
        break;
      }
    }
  }
  s.mu = Eigen::VectorXd::Constant(s.lambda.size(), op.interval.translation()) - s.lambda;

  const double slack = 1e-9 * std::max(1.0, op.interval.lambda_max - op.interval.lambda_min);
  if (n > 0 && (s.lambda(0) < op.interval.lambda_min - slack || s.lambda(s.lambda.size() - 1) > op.interval.lambda_max + slack)) {
    std::ostringstream msg;
    msg << "spectrum [" << s.lambda(0) << ", " << s.lambda(s.lambda.size() - 1) << "] escapes the interval ["
        << op.interval.lambda_min << ", " << op.interval.lambda_max << "]";
    s.interval_warning = msg.str();
  }
  return s;
}

std::vector<double> gft_forward(std::span<const double> signal, const Spectrum& spectrum) {
  check_size(signal.size(), spectrum);
  return to_std(spectrum.basis.transpose() * as_vector(signal));
}

std::vector<double> gft_inverse(std::span<const double> coeffs, const Spectrum& spectrum) {
  check_size(coeffs.size(), spectrum);
  return to_std(spectrum.basis * as_vector(coeffs));
}

std::vector<double> apply_filter_exact(std::span<const double> signal, const Spectrum& spectrum,
                                       const std::function<double(double)>& response, FrequencyVariable variable) {
  check_size(signal.size(), spectrum);
  Eigen::VectorXd coeffs = spectrum.basis.transpose() * as_vector(signal);
  const Eigen::VectorXd& freq = variable == FrequencyVariable::mu ? spectrum.mu : spectrum.lambda;
  for (Eigen::Index n = 0; n < coeffs.size(); ++n) {
    double g = response(freq(n));
    if (!std::isfinite(g)) {
      std::ostringstream msg;
      msg << "response is not finite at eigenvalue " << freq(n);
      throw NumericalError(msg.str());
    }
    coeffs(n) *= g;
  }
  return to_std(spectrum.basis * coeffs);
}

std::vector<std::optional<double>> measure_response(std::span<const double> output, std::span<const double> input,
                                                    const Spectrum& spectrum, double relative_tolerance) {
  check_size(output.size(), spectrum);
  check_size(input.size(), spectrum);
  Eigen::VectorXd xin = spectrum.basis.transpose() * as_vector(input);
  Eigen::VectorXd yout = spectrum.basis.transpose() * as_vector(output);
  const double floor = relative_tolerance * as_vector(input).norm();
  std::vector<std::optional<double>> gains(xin.size());
  for (Eigen::Index n = 0; n < xin.size(); ++n)
    if (std::abs(xin(n)) > floor) gains[n] = yout(n) / xin(n);
  return gains;
}

}  // namespace garma
