#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "garma/shift_operator.hpp"

namespace garma {

enum class ResponseKind { step, window, custom_sampled, function };

/// User-facing target response h*(lambda) on a universal interval.
class DesiredResponse {
 public:
  /// 1 on [lambda_min, cutoff), 0 after. Default cutoff (lambda_min + lambda_max) / 4.
  static DesiredResponse step(SpectralInterval interval, std::optional<double> cutoff = std::nullopt);
  /// 1 on [lo, hi], 0 elsewhere. Defaults lo = lambda_max / 3, hi = 2 lambda_max / 3.
  static DesiredResponse window(SpectralInterval interval, std::optional<double> lo = std::nullopt,
                                std::optional<double> hi = std::nullopt);
  /// Linear interpolation through (lambda, value) samples, held constant past the ends.
  static DesiredResponse sampled(SpectralInterval interval, std::vector<std::pair<double, double>> samples);
  static DesiredResponse function(SpectralInterval interval, std::function<double(double)> h_star);

  ResponseKind kind() const noexcept { return kind_; }
  const SpectralInterval& interval() const noexcept { return interval_; }
  double operator()(double lambda) const { return h_star_(lambda); }
  const std::string& description() const noexcept { return description_; }

 private:
  DesiredResponse(ResponseKind kind, SpectralInterval interval, std::function<double(double)> h, std::string description)
      : kind_(kind), interval_(interval), h_star_(std::move(h)), description_(std::move(description)) {}

  ResponseKind kind_;
  SpectralInterval interval_;
  std::function<double(double)> h_star_;
  std::string description_;
};

/// g*(mu) = h*(c - mu) on [mu_min, mu_max].
struct MuResponse {
  std::function<double(double)> g;
  double mu_min;
  double mu_max;
  double operator()(double mu) const { return g(mu); }
};

MuResponse map_to_mu(const DesiredResponse& response);

std::vector<std::pair<double, double>> read_response_samples_csv(const std::string& path);

}  // namespace garma
