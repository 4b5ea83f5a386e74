#include "hjb/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hjb {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_field_csv(const ValueField& field, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,x,value\n";
  for (int j = 0; j < field.grid.t_nodes; ++j) {
    const double t = field.grid.t_node(j, field.horizon);
    for (int i = 0; i < field.grid.x_nodes; ++i) {
      out << format_double(t) << ',' << format_double(field.grid.x_node(i)) << ','
          << format_double(field.at(j, i)) << '\n';
    }
  }
}

FieldCsv read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "t,x,value")
    throw std::runtime_error("bad field csv header in " + path);
  FieldCsv csv;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t, x, v;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &x, &v) != 3)
      throw std::runtime_error("bad field csv row: " + line);
    csv.t.push_back(t);
    csv.x.push_back(x);
    csv.value.push_back(v);
  }
  return csv;
}

void write_error_table_csv(std::span<const LevelError> table, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "level,sup_err,mean_err\n";
  for (const auto& row : table)
    out << row.level << ',' << format_double(row.sup_err) << ','
        << format_double(row.mean_err) << '\n';
}

void write_ratio_scan_csv(const RatioScan& scan, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "parameter,ratio\n";
  for (std::size_t i = 0; i < scan.parameters.size(); ++i)
    out << format_double(scan.parameters[i]) << ',' << format_double(scan.ratios[i]) << '\n';
}

std::string format_residual_report(const ResidualReport& r) {
  std::ostringstream os;
  os << format_double(r.point.t) << ',' << format_double(r.point.x) << ','
     << format_double(r.costate.pt) << ',' << format_double(r.costate.px) << ','
     << format_double(r.residual) << ',' << regime_name(r.regime) << ','
     << (r.pass ? "pass" : "fail");
  return os.str();
}

void write_residual_reports(std::span<const ResidualReport> reports, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,x,p_t,p_x,residual,regime,verdict\n";
  for (const auto& r : reports) out << format_residual_report(r) << '\n';
}

}  // namespace hjb
