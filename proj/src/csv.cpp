#include "fcnf/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace fcnf::csv {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& cell, const std::string& context) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw std::runtime_error(context + ": not a number: '" + cell + "'");
  }
  return value;
}

long long parse_int(const std::string& cell, const std::string& context) {
  long long value = 0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw std::runtime_error(context + ": not an integer: '" + cell + "'");
  }
  return value;
}

namespace {

bool needs_quotes(const std::string& cell) {
  return cell.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quoted(const std::string& cell) {
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void write_row(std::ostream& out, std::span<const std::string> cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out << ',';
    out << (needs_quotes(cells[i]) ? quoted(cells[i]) : cells[i]);
  }
  out << '\n';
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  Table table;
  std::vector<std::string> row;
  std::string cell;
  bool in_quotes = false;
  bool row_started = false;
  size_t line = 1;

  auto end_cell = [&] {
    row.push_back(std::move(cell));
    cell.clear();
  };
  auto end_row = [&] {
    end_cell();
    if (table.header.empty()) {
      table.header = std::move(row);
    } else {
      table.rows.push_back(std::move(row));
    }
    row.clear();
    row_started = false;
  };

  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          cell += '"';
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!cell.empty()) {
          throw std::runtime_error(path.string() + " line " + std::to_string(line) +
                                   ": stray quote");
        }
        in_quotes = true;
        row_started = true;
        break;
      case ',':
        end_cell();
        row_started = true;
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        if (row_started || !cell.empty() || !row.empty()) end_row();
        break;
      default:
        cell += c;
        row_started = true;
    }
  }
  if (in_quotes) {
    throw std::runtime_error(path.string() + ": unterminated quote at EOF");
  }
  if (row_started || !cell.empty() || !row.empty()) end_row();
  return table;
}

}  // namespace fcnf::csv
