#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fcnf::csv {

// Shortest round-trip decimal representation; parse(format(x)) == x bitwise.
std::string format_double(double value);

double parse_double(const std::string& cell, const std::string& context);
long long parse_int(const std::string& cell, const std::string& context);

void write_row(std::ostream& out, std::span<const std::string> cells);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_file(const std::filesystem::path& path);

}  // namespace fcnf::csv
