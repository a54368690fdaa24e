#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "garma/design.hpp"
#include "garma/response.hpp"

namespace garma {

using json = nlohmann::json;

/// In-memory form of a design document. FIR documents carry only `fir`; ARMA
/// documents carry `rational` and whichever implementation forms were stored
/// or could be derived on import.
struct DesignDocument {
  std::string family;  // "arma" or "fir"
  std::string response_description;
  std::optional<FirDesign> fir;
  std::optional<RationalDesign> rational;
  std::optional<ParallelForm> parallel;
  std::optional<PeriodicForm> periodic;
  std::optional<StabilityReport> stability;
  std::optional<PeriodicStability> periodic_stability;
  std::size_t prefit_order = 0;
  std::string fallback = "none";
  std::optional<double> l2_error;
  /// Derivation failures on import, e.g. for hand-written unstable designs.
  std::vector<std::string> notes;
};

DesignDocument make_document(const ArmaDesign& design, const std::string& response_description);
DesignDocument make_document(const FirDesign& design, const std::string& response_description, double l2_error);

/// Extended-precision values are written as 21-digit strings, doubles as JSON
/// numbers with round-trip precision.
json to_json(const DesignDocument& doc);
/// Missing parallel/periodic forms are derived from `rational` when possible.
/// The stability report is always recomputed when absent.
DesignDocument design_from_json(const json& j);

DesignDocument read_design_file(const std::filesystem::path& path);
void write_design_file(const std::filesystem::path& path, const DesignDocument& doc);

/// Design request as read from a config file.
struct DesignConfig {
  std::string family = "arma";  // "arma" or "fir"
  std::string kind = "step";    // step, window, custom_sampled
  SpectralInterval interval;
  std::size_t order = 5;
  std::optional<double> cutoff;
  std::optional<double> window_lo;
  std::optional<double> window_hi;
  std::optional<std::filesystem::path> samples_file;
  DesignOptions options;
};

/// Relative paths inside the config resolve against `base_dir`.
DesignConfig design_config_from_json(const json& j, const std::filesystem::path& base_dir = {});
json to_json(const DesignConfig& config);

DesiredResponse make_response(const DesignConfig& config);

json read_json_file(const std::filesystem::path& path);

std::string format_real(Real value);
Real parse_real(const json& value);

}  // namespace garma
