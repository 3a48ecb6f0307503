#pragma once

#include <string>
#include <vector>

namespace ep {

// 17 significant digits (%.17g): enough to round-trip any double, and the
// same bytes on every run, so output files can be compared verbatim.
std::string format_sig(double x);

// Line-buffered CSV builder; nothing touches the filesystem until write().
class CsvFile {
public:
  void header(const std::vector<std::string>& cols);
  void row(const std::vector<std::string>& cells);
  void num_row(const std::vector<double>& vals);
  const std::string& text() const { return buf_; }
  void write(const std::string& path) const;

private:
  void append_line(const std::vector<std::string>& cells);
  std::string buf_;
};

// Whole-file helpers shared by the command layer.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace ep
