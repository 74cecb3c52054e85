#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "xkerr/fitting.hpp"

namespace xkerr::io {

/// 12 significant digits, "%.12g"; non-finite values print as inf/-inf/nan.
std::string format_number(double v);

/// Writes one CSV row of numbers.
void write_csv_row(std::ostream& out, const std::vector<double>& values);

inline constexpr const char* kDatasetHeader = "freq_hz,power_dbm,t_re,t_im,weight";

/// Dataset CSV: header `freq_hz,power_dbm,t_re,t_im,weight`. A power of
/// "-inf" or "off" marks a control-off record; an empty weight means 1.
Dataset read_dataset_csv(std::istream& in);
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace xkerr::io
