#include "liouplan/table_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "liouplan/errors.hpp"

namespace liouplan {

namespace {

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t end = line.find(',', start);
    std::string field = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
    field.erase(0, field.find_first_not_of(" \t"));
    field.erase(field.find_last_not_of(" \t\r") + 1);
    out.push_back(field);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

double parse_double(const std::string& field, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw InputError("CSV line " + std::to_string(line) + ": cannot parse number '" + field + "'");
  }
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const TrajectoryTable& table,
               const std::vector<std::string>& columns) {
  const auto& cols = columns.empty() ? table.column_names() : columns;
  std::vector<const std::vector<double>*> data;
  out << 't';
  for (const auto& c : cols) {
    out << ',' << c;
    data.push_back(&table.grid(c));
  }
  out << '\n';
  for (std::size_t k = 0; k < table.points(); ++k) {
    out << format17(table.time(k));
    for (const auto* d : data) out << ',' << format17((*d)[k]);
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const TrajectoryTable& table,
                    const std::vector<std::string>& columns) {
  // Write to a sibling temporary, then rename, so readers never see a partial file.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError("cannot open '" + tmp + "' for writing");
    write_csv(out, table, columns);
    if (!out) throw InputError("failed writing '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

TrajectoryTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("CSV is empty");
  const auto header = split_csv_line(line);
  if (header.empty() || header.front() != "t") throw InputError("CSV header must start with 't'");
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (!is_valid_variable_name(header[i])) {
      throw InputError("CSV header has invalid column name '" + header[i] + "'");
    }
  }

  std::vector<std::vector<double>> cols(header.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw InputError("CSV line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) cols[i].push_back(parse_double(fields[i], line_no));
  }
  const auto& t = cols.front();
  if (t.size() < 2) throw InputError("CSV needs at least two rows");

  TrajectoryTable table(t.front(), t.back(), t.size() - 1);
  const double tol = 1e-9 * (t.back() - t.front());
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (std::fabs(t[k] - table.time(k)) > tol) {
      throw InputError("CSV time column is not uniform at row " + std::to_string(k));
    }
  }
  for (std::size_t i = 1; i < header.size(); ++i) table.set_column(header[i], std::move(cols[i]));
  fill_midpoints(table);
  return table;
}

TrajectoryTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_csv(in);
}

void fill_midpoints(TrajectoryTable& table) {
  const std::size_t n = table.intervals();
  for (const auto& name : std::vector<std::string>(table.column_names())) {
    if (table.has_midpoints(name)) continue;
    const std::vector<double> g = table.grid(name);
    std::vector<double> mid(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (n == 1) {
        mid[k] = 0.5 * (g[0] + g[1]);
      } else if (n == 2) {
        mid[k] = k == 0 ? (3.0 * g[0] + 6.0 * g[1] - g[2]) / 8.0
                        : (-g[0] + 6.0 * g[1] + 3.0 * g[2]) / 8.0;
      } else if (k == 0) {
        mid[k] = (5.0 * g[0] + 15.0 * g[1] - 5.0 * g[2] + g[3]) / 16.0;
      } else if (k == n - 1) {
        mid[k] = (g[n - 3] - 5.0 * g[n - 2] + 15.0 * g[n - 1] + 5.0 * g[n]) / 16.0;
      } else {
        mid[k] = (-g[k - 1] + 9.0 * g[k] + 9.0 * g[k + 1] - g[k + 2]) / 16.0;
      }
    }
    table.set_column(name, g, std::move(mid));
  }
}

}  // namespace liouplan
