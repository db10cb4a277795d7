#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "smoothcop/linalg.hpp"

namespace smoothcop {

//! Reads a numeric CSV. A first line that does not parse as numbers is
//! treated as a header.
SampleMatrix read_csv_matrix(const std::filesystem::path& path);
SampleMatrix read_csv_matrix(std::istream& in);

//! Writes with header u1,...,ud.
void write_sample_csv(std::ostream& out, const SampleMatrix& x);
void write_sample_csv(const std::filesystem::path& path, const SampleMatrix& x);

//! Parses "a:b:step" into an inclusive arithmetic grid.
std::vector<double> parse_grid(std::string_view spec);
std::vector<double> arithmetic_grid(double from, double to, double step);
std::vector<std::string> split(std::string_view s, char sep);
std::string trim(std::string_view s);
double parse_double(std::string_view s);
//! Shortest round-trippable-ish text for labels (up to 12 significant digits).
std::string format_number(double x);
long long parse_int(std::string_view s);

} // namespace smoothcop
