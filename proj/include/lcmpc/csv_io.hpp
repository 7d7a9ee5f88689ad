#pragma once

// CSV emission and ingestion for simulation logs, solver period stats,
// phase portraits, and harmonic reports.  All floating-point fields are
// written with 17 significant digits so that write -> read -> write is
// bit-identical.

#include "analysis.hpp"
#include "simulator.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace lcmpc {

/// Shortest decimal form that round-trips a double exactly.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_sample_log_csv(std::ostream& out, const SimulationLog& log) {
  out << "k,t,v_c,i_l,i_c,i_d,v_s,xt1,xt2\n";
  for (const SampleRecord& s : log.samples) {
    out << s.k << ',' << format_g17(s.t) << ',' << format_g17(s.v_c) << ','
        << format_g17(s.i_l) << ',' << format_g17(s.i_c) << ',' << format_g17(s.i_d)
        << ',' << format_g17(s.v_s) << ',' << format_g17(s.xt1) << ','
        << format_g17(s.xt2) << '\n';
  }
}

inline void write_period_log_csv(std::ostream& out, const SimulationLog& log) {
  out << "period,objective,iterations,wall_ms,solver_ok\n";
  for (const PeriodRecord& p : log.periods) {
    out << p.period << ',' << format_g17(p.objective) << ',' << p.iterations << ','
        << format_g17(p.wall_ms) << ',' << (p.solver_ok ? 1 : 0) << '\n';
  }
}

inline void write_portrait_csv(std::ostream& out,
                               const std::vector<MapTrajectory>& trajectories) {
  out << "traj_id,k,x1,x2\n";
  for (std::size_t id = 0; id < trajectories.size(); ++id) {
    const auto& states = trajectories[id].states;
    for (std::size_t k = 0; k < states.size(); ++k)
      out << id << ',' << k << ',' << format_g17(states[k].x()) << ','
          << format_g17(states[k].y()) << '\n';
  }
}

inline void write_thd_report_csv(std::ostream& out, const ThdReport& report,
                                 int max_order) {
  out << "signal,thd_percent";
  for (int n = 1; n <= max_order; ++n) out << ",a" << n;
  out << '\n';
  for (const SignalThd& e : report.entries) {
    out << e.signal << ',' << format_g17(e.thd_percent);
    for (int n = 1; n <= max_order; ++n) {
      const double a = n <= e.spectrum.max_order() ? e.spectrum.amplitude[n] : 0.0;
      out << ',' << format_g17(a);
    }
    out << '\n';
  }
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Column-oriented numeric CSV: one named vector per header field.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

  const std::vector<double>& column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return columns[i];
    throw std::out_of_range("no CSV column named '" + name + "'");
  }

  bool has_column(const std::string& name) const {
    for (const std::string& h : header)
      if (h == name) return true;
    return false;
  }
};

/// Parses a strictly numeric CSV (header row of names, data rows of
/// doubles).  Ragged rows or non-numeric fields throw.
inline CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::istringstream head(line);
  std::string field;
  while (std::getline(head, field, ',')) table.header.push_back(field);
  if (table.header.empty()) throw std::runtime_error("empty CSV header");
  table.columns.resize(table.header.size());

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t col = 0;
    while (std::getline(row, field, ',')) {
      if (col >= table.header.size())
        throw std::runtime_error("CSV row " + std::to_string(line_no) +
                                 " has too many fields");
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0')
        throw std::runtime_error("CSV row " + std::to_string(line_no) +
                                 ": non-numeric field '" + field + "'");
      table.columns[col].push_back(v);
      ++col;
    }
    if (col != table.header.size())
      throw std::runtime_error("CSV row " + std::to_string(line_no) +
                               " has too few fields");
  }
  return table;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path);
  return read_csv(in);
}

}  // namespace lcmpc
