#pragma once

#include <span>
#include <string>
#include <vector>

#include "hjb/dp.hpp"
#include "hjb/probes.hpp"
#include "hjb/subgradient.hpp"

namespace hjb {

// All numeric CSV output uses 17 significant digits so that re-reading a file
// reproduces the doubles bit-exactly.
std::string format_double(double v);

// header "t,x,value", row-major by time slice.
void write_field_csv(const ValueField& field, const std::string& path);

struct FieldCsv {
  std::vector<double> t, x, value;
};
FieldCsv read_field_csv(const std::string& path);

// header "level,sup_err,mean_err".
void write_error_table_csv(std::span<const LevelError> table, const std::string& path);

// header "parameter,ratio".
void write_ratio_scan_csv(const RatioScan& scan, const std::string& path);

// One report per line: t,x,p_t,p_x,residual,regime,verdict.
std::string format_residual_report(const ResidualReport& report);
void write_residual_reports(std::span<const ResidualReport> reports, const std::string& path);

}  // namespace hjb
