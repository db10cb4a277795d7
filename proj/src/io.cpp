#include "smoothcop/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace smoothcop {

std::string
trim(std::string_view s)
{
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
    return {};
  auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string>
split(std::string_view s, char sep)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

double
parse_double(std::string_view s)
{
  std::string t = trim(s);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw std::invalid_argument("not a number: '" + t + "'");
  return value;
}

long long
parse_int(std::string_view s)
{
  std::string t = trim(s);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw std::invalid_argument("not an integer: '" + t + "'");
  return value;
}

namespace {

bool
parse_row(const std::string& line, std::vector<double>& row)
{
  row.clear();
  try {
    for (const auto& field : split(line, ','))
      row.push_back(parse_double(field));
  } catch (const std::invalid_argument&) {
    return false;
  }
  return true;
}

} // namespace

SampleMatrix
read_csv_matrix(std::istream& in)
{
  std::vector<std::vector<double>> rows;
  std::string line;
  std::vector<double> row;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty())
      continue;
    if (!parse_row(line, row)) {
      if (first) {
        first = false;
        continue;
      }
      throw std::invalid_argument("read_csv_matrix: malformed row '" + line + "'");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("read_csv_matrix: ragged rows");
    rows.push_back(row);
  }
  if (rows.empty())
    throw std::invalid_argument("read_csv_matrix: no data rows");
  SampleMatrix x(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      x(Eigen::Index(i), Eigen::Index(j)) = rows[i][j];
  return x;
}

SampleMatrix
read_csv_matrix(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  return read_csv_matrix(in);
}

void
write_sample_csv(std::ostream& out, const SampleMatrix& x)
{
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    out << (j ? "," : "") << "u" << j + 1;
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out << (j ? "," : "") << x(i, j);
    out << '\n';
  }
}

void
write_sample_csv(const std::filesystem::path& path, const SampleMatrix& x)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  write_sample_csv(out, x);
}

std::vector<double>
arithmetic_grid(double from, double to, double step)
{
  if (!(step > 0.0) || to < from)
    throw std::invalid_argument("grid: need from <= to and step > 0");
  auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k)
    grid[k] = parse_double(format_number(from + double(k) * step)); // drops accumulated 1e-16 noise
  return grid;
}

std::vector<double>
parse_grid(std::string_view spec)
{
  auto parts = split(spec, ':');
  if (parts.size() != 3)
    throw std::invalid_argument("grid must look like from:to:step");
  return arithmetic_grid(parse_double(parts[0]), parse_double(parts[1]),
                         parse_double(parts[2]));
}

std::string
format_number(double x)
{
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

} // namespace smoothcop
