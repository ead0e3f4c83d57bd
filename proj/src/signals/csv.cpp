#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "plab/error.hpp"
#include "plab/signals.hpp"

namespace plab::signals {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v))
    fail(ErrorCode::ParseError, "row " + std::to_string(row) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

Signal read_csv(std::istream& in, Interp interp) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, "empty input");
  const auto header = split_fields(line);
  if (header.size() < 2 || header[0] != "t")
    fail(ErrorCode::ParseError, "header must be t,x1,...,xn");
  const std::size_t dim = header.size() - 1;

  std::vector<double> times;
  std::vector<double> data;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (fields.size() != dim + 1)
      fail(ErrorCode::ParseError, "row " + std::to_string(row) + ": expected " +
                                      std::to_string(dim + 1) + " fields");
    times.push_back(parse_number(fields[0], row));
    for (std::size_t c = 0; c < dim; ++c) data.push_back(parse_number(fields[c + 1], row));
  }
  if (times.empty()) fail(ErrorCode::ParseError, "no data rows");
  if (times.size() == 1) return Signal(times[0], 1.0, dim, std::move(data), interp);

  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      fail(ErrorCode::ParseError, "times must be strictly increasing (row " +
                                      std::to_string(i + 2) + ")");
  const double t0 = times.front();
  const double dt = (times.back() - t0) / static_cast<double>(times.size() - 1);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = t0 + dt * static_cast<double>(i);
    if (std::abs(times[i] - expected) > 1e-9 * dt)
      fail(ErrorCode::ParseError, "non-uniform time grid at row " + std::to_string(i + 2));
  }
  return Signal(t0, dt, dim, std::move(data), interp);
}

Signal read_csv_file(const std::string& path, Interp interp) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  return read_csv(in, interp);
}

void write_csv(std::ostream& out, const Signal& f) {
  out << "t";
  for (std::size_t c = 0; c < f.dim(); ++c) out << ",x" << (c + 1);
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", f.time(i));
    out << buf;
    for (std::size_t c = 0; c < f.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", f.at(i, c));
      out << ',' << buf;
    }
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const Signal& f) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + path);
  write_csv(out, f);
}

}  // namespace plab::signals
