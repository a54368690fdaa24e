#include "garma/signal_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "garma/numeric.hpp"

namespace garma {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) cells.push_back(cell);
  return cells;
}

std::string trim(std::string s) {
  const char* ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  s.erase(s.find_last_not_of(ws) + 1);
  return s;
}

void expect_header(std::istream& in, const std::vector<std::string>& header) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty CSV input");
  auto cells = split_csv(line);
  bool ok = cells.size() == header.size();
  for (std::size_t i = 0; ok && i < cells.size(); ++i) ok = trim(cells[i]) == header[i];
  if (!ok) {
    std::string want;
    for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
    throw InputError("expected CSV header '" + want + "'");
  }
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

double parse_double(const std::string& s, std::size_t row) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (trim(s.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("row " + std::to_string(row) + ": bad number '" + s + "'");
}

std::size_t parse_index(const std::string& s, std::size_t row, bool one_based) {
  double v = parse_double(s, row);
  if (v != static_cast<double>(static_cast<long long>(v)) || v < (one_based ? 1 : 0))
    throw InputError("row " + std::to_string(row) + ": bad index '" + s + "'");
  return static_cast<std::size_t>(v) - (one_based ? 1 : 0);
}

}  // namespace

std::vector<double> read_signal_csv(std::istream& in) {
  expect_header(in, {"node", "value"});
  std::map<std::size_t, double> rows;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != 2) throw InputError("row " + std::to_string(row) + ": expected 2 columns");
    auto node = parse_index(cells[0], row, true);
    if (!rows.emplace(node, parse_double(cells[1], row)).second)
      throw InputError("row " + std::to_string(row) + ": duplicate node");
  }
  if (rows.empty()) throw InputError("signal CSV has no rows");
  if (rows.rbegin()->first + 1 != rows.size()) throw InputError("signal CSV must list nodes 1..N exactly once");
  std::vector<double> values;
  values.reserve(rows.size());
  for (const auto& [node, v] : rows) values.push_back(v);
  return values;
}

std::vector<double> read_signal_csv_file(const std::string& path) {
  auto in = open(path);
  return read_signal_csv(in);
}

void write_signal_csv(std::ostream& out, const std::vector<double>& values) {
  out << "node,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < values.size(); ++i) out << i + 1 << ',' << values[i] << '\n';
}

std::map<std::size_t, std::vector<double>> read_signal_series_csv(std::istream& in) {
  expect_header(in, {"t", "node", "value"});
  std::map<std::size_t, std::map<std::size_t, double>> rows;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != 3) throw InputError("row " + std::to_string(row) + ": expected 3 columns");
    auto t = parse_index(cells[0], row, false);
    auto node = parse_index(cells[1], row, true);
    rows[t][node] = parse_double(cells[2], row);
  }
  std::map<std::size_t, std::vector<double>> series;
  std::size_t n = 0;
  for (const auto& [t, nodes] : rows) {
    if (nodes.rbegin()->first + 1 != nodes.size())
      throw InputError("round " + std::to_string(t) + " must list nodes 1..N exactly once");
    if (n == 0) n = nodes.size();
    if (nodes.size() != n) throw InputError("all rounds must list the same number of nodes");
    auto& v = series[t];
    for (const auto& [node, value] : nodes) v.push_back(value);
  }
  if (series.empty()) throw InputError("signal series CSV has no rows");
  return series;
}

std::map<std::size_t, std::vector<double>> read_signal_series_csv_file(const std::string& path) {
  auto in = open(path);
  return read_signal_series_csv(in);
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "n,lambda,mu\n" << std::setprecision(17);
  for (std::size_t n = 0; n < spectrum.size(); ++n)
    out << n + 1 << ',' << spectrum.lambda(n) << ',' << spectrum.mu(n) << '\n';
}

}  // namespace garma
