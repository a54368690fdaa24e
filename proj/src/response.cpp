#include "garma/response.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "garma/numeric.hpp"

namespace garma {

DesiredResponse DesiredResponse::step(SpectralInterval interval, std::optional<double> cutoff) {
  const double lc = cutoff.value_or(0.25 * (interval.lambda_min + interval.lambda_max));
  std::ostringstream d;
  d << "step(cutoff=" << lc << ")";
  return {ResponseKind::step, interval, [lc](double lambda) { return lambda < lc ? 1.0 : 0.0; }, d.str()};
}

DesiredResponse DesiredResponse::window(SpectralInterval interval, std::optional<double> lo, std::optional<double> hi) {
  const double a = lo.value_or(interval.lambda_max / 3.0);
  const double b = hi.value_or(2.0 * interval.lambda_max / 3.0);
  if (!(a <= b)) throw InputError("window edges must satisfy lo <= hi");
  std::ostringstream d;
  d << "window(" << a << ", " << b << ")";
  return {ResponseKind::window, interval, [a, b](double lambda) { return lambda >= a && lambda <= b ? 1.0 : 0.0; },
          d.str()};
}

DesiredResponse DesiredResponse::sampled(SpectralInterval interval, std::vector<std::pair<double, double>> samples) {
  if (samples.empty()) throw InputError("sampled response needs at least one sample");
  std::sort(samples.begin(), samples.end());
  for (const auto& [x, v] : samples)
    if (!std::isfinite(x) || !std::isfinite(v)) throw InputError("sampled response must be finite");
  auto h = [s = std::move(samples)](double lambda) {
    if (lambda <= s.front().first) return s.front().second;
    if (lambda >= s.back().first) return s.back().second;
    auto hi = std::upper_bound(s.begin(), s.end(), lambda, [](double v, const auto& p) { return v < p.first; });
    auto lo = hi - 1;
    double t = (lambda - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
  };
  return {ResponseKind::custom_sampled, interval, std::move(h), "custom_sampled"};
}

DesiredResponse DesiredResponse::function(SpectralInterval interval, std::function<double(double)> h_star) {
  return {ResponseKind::function, interval, std::move(h_star), "function"};
}

MuResponse map_to_mu(const DesiredResponse& response) {
  const double c = response.interval().translation();
  return {[response, c](double mu) { return response(c - mu); }, response.interval().mu_min(),
          response.interval().mu_max()};
}

std::vector<std::pair<double, double>> read_response_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open response samples '" + path + "'");
  std::vector<std::pair<double, double>> samples;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    if (row == 1 && line.find_first_of("0123456789") != 0 && line.find("lambda") != std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, v;
    if (!(ls >> x >> v)) throw InputError("response samples row " + std::to_string(row) + ": expected 'lambda,value'");
    samples.emplace_back(x, v);
  }
  if (samples.empty()) throw InputError("response samples file is empty");
  return samples;
}

}  // namespace garma
