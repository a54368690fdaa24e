#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "garma/spectrum.hpp"

namespace garma {

/// CSV with header "node,value", 1-based node ids, one row per node.
std::vector<double> read_signal_csv(std::istream& in);
std::vector<double> read_signal_csv_file(const std::string& path);
void write_signal_csv(std::ostream& out, const std::vector<double>& values);

/// CSV with header "t,node,value". Returns one full signal per listed round.
std::map<std::size_t, std::vector<double>> read_signal_series_csv(std::istream& in);
std::map<std::size_t, std::vector<double>> read_signal_series_csv_file(const std::string& path);

/// CSV "n,lambda,mu" with 1-based n.
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);

}  // namespace garma
