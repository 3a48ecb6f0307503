#include "ep/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ep/errors.hpp"

namespace ep {

std::string format_sig(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void CsvFile::append_line(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += cells[i];
  }
  buf_ += '\n';
}

void CsvFile::header(const std::vector<std::string>& cols) { append_line(cols); }

void CsvFile::row(const std::vector<std::string>& cells) { append_line(cells); }

void CsvFile::num_row(const std::vector<double>& vals) {
  std::vector<std::string> cells;
  cells.reserve(vals.size());
  for (double v : vals) cells.push_back(format_sig(v));
  append_line(cells);
}

void CsvFile::write(const std::string& path) const { write_text_file(path, buf_); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::config_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(errc::config_error, "cannot write " + path);
  out << content;
  if (!out) fail(errc::config_error, "write failed for " + path);
}

} // namespace ep
