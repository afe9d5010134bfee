#include "exgrad/harness/trace_csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "exgrad/harness/experiment.hpp"

namespace exgrad::harness {

namespace {

std::string join(const Vector<double>& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_number(v[i]);
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("trace line " + std::to_string(line) + ": bad number \"" + s + "\"", line);
  }
}

Vector<double> parse_vector(const std::string& s, std::size_t line) {
  const auto parts = split(s, ';');
  Vector<double> v(static_cast<Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Index>(i)] = parse_double(parts[i], line);
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord<double>>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.k << ',' << join(r.x.coords()) << ',' << join(r.u.coords()) << ',' << join(r.y.coords()) << ','
        << join(r.z.coords()) << ',' << format_number(r.step_norm) << ','
        << (r.phi_gap ? format_number(*r.phi_gap) : std::string()) << ',' << format_number(r.resolvent_violation)
        << '\n';
  }
}

void write_trace_csv(const std::string& path, const std::vector<IterationRecord<double>>& trace) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trace to " + path);
  write_trace_csv(out, trace);
  if (!out) throw Error("failed while writing trace to " + path);
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw ParseError("trace: missing or unexpected header", 1);
  std::vector<TraceRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 8) throw ParseError("trace line " + std::to_string(number) + ": expected 8 columns", number);
    TraceRow row;
    row.k = static_cast<int>(parse_double(cells[0], number));
    row.x = parse_vector(cells[1], number);
    row.u = parse_vector(cells[2], number);
    row.y = parse_vector(cells[3], number);
    row.z = parse_vector(cells[4], number);
    row.step_norm = parse_double(cells[5], number);
    if (!cells[6].empty()) row.phi_gap = parse_double(cells[6], number);
    row.resolvent_violation = parse_double(cells[7], number);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_trace_csv(in);
}

}  // namespace exgrad::harness
