#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "garma/design.hpp"
#include "garma/engine.hpp"
#include "garma/spectrum.hpp"

namespace garma {

struct TransferOptions {
  /// Evaluation inside the unit circle is refused unless set.
  bool allow_interior = false;
};

/// phi / (z - psi mu). Non-finite at the pole.
Complex arma1_transfer(Complex psi, Complex phi, Complex z, double mu, TransferOptions options = {});
/// sum_k phi_k / (z - psi_k mu).
Complex parallel_transfer(const ParallelForm& form, Complex z, double mu, TransferOptions options = {});
/// Per-period transfer function; z advances by one period (K rounds) and the
/// input is held over each period.
Complex periodic_transfer(const PeriodicForm& form, Complex z, double mu, TransferOptions options = {});
/// Dispatch on the engine family; FIR has no recursion and is rejected.
Complex filter_transfer(const FilterSpec& filter, Complex z, double mu, TransferOptions options = {});

/// Principal phase in (-pi, pi].
double principal_phase(Complex value);

struct TemporalGain {
  double gain = 0.0;
  double phase = 0.0;     // radians, (-pi, pi]
  double residual = 0.0;  // relative rms residual of the sinusoid fit
  std::size_t samples = 0;
  std::size_t discarded = 0;
};

struct GainMeasurement {
  std::size_t eigen_index = 0;
  double omega = 0.0;  // per round, or per period for periodic filters
  std::size_t periods = 0;  // fitted samples after the transient; 0 picks a default
  InitialCondition initial;
  ExecutionPolicy policy = ExecutionPolicy::openmp;
};

/// Drives x_t = cos(omega t) phi_n (t in output samples, i.e. periods for
/// periodic filters) and fits a sinusoid to <y_t, phi_n> after discarding the
/// first 5 / (1 - gamma) samples. Throws NumericalError when the fit residual
/// exceeds 5%.
TemporalGain measure_temporal_gain(const FilterSpec& filter, const NodeTable& table, const Spectrum& spectrum,
                                   const GainMeasurement& request);

/// CSV "omega,mu,magnitude,phase" over an omega x mu grid on the unit circle.
void write_transfer_grid_csv(std::ostream& out, const FilterSpec& filter, std::size_t omega_points,
                             std::size_t mu_points);

}  // namespace garma
