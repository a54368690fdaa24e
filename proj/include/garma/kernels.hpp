#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "garma/node_table.hpp"
#include "garma/numeric.hpp"

namespace garma {

/// Coefficients of one round of y' = theta y + psi_k M y + phi_k x, one
/// (psi_k, phi_k) pair per branch. State is branch-major: y[k * N + i].
struct RoundCoefficients {
  Real theta = 0;
  std::span<const Complex> psi;
  std::span<const Complex> phi;
  std::size_t branches() const { return psi.size(); }
};

struct RoundMessage {
  std::size_t sender;
  std::size_t receiver;
  std::vector<Complex> payload;  // one value per branch
};

struct RoundStats {
  std::size_t messages = 0;
  std::size_t scalars = 0;
};

/// Reference round: every node posts its branch states to each neighbor's
/// mailbox, then every node combines its inbox. Throws NumericalError if a
/// message arrives from a non-neighbor.
RoundStats round_serial(const NodeTable& table, const RoundCoefficients& coef, std::span<const Complex> y,
                        std::span<const double> x, std::span<Complex> out);

/// OpenMP round over the CSR rows. Uses the same per-node summation order as
/// round_serial, so results are bit-identical.
RoundStats round_openmp(const NodeTable& table, const RoundCoefficients& coef, std::span<const Complex> y,
                        std::span<const double> x, std::span<Complex> out);

}  // namespace garma
