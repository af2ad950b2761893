#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "weldcrack/types.hpp"

namespace weldcrack {

/// Canonical CSV header for labeled sample files.
inline constexpr const char* kCsvHeader = "I,tau,t_b,d_w,A_w,T_i,T_p,t_500,d,label,source,weight";

/// Fixed 9-significant-digit, locale-independent number rendering used for
/// every value this project writes; byte-identical reruns depend on it.
std::string format_number(double v);

using Dataset = std::vector<LabeledSample>;

void write_csv(std::ostream& os, const Dataset& data);
void write_csv_file(const std::string& path, const Dataset& data);

/// Strict reader: exact header, label in {0,1}, known source tag,
/// positive weight. Errors carry the 1-based line number.
Dataset read_csv(std::istream& is);
Dataset read_csv_file(const std::string& path);

}  // namespace weldcrack
