#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace cliffock {

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Deterministic CSV writer: fixed %.17g formatting, LF endings, UTF-8.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    os_.open(path, std::ios::binary);
    if (!os_) throw std::runtime_error("cannot open " + path.string());
    os_ << header << "\n";
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) os_ << ",";
      os_ << csv_num(v);
      first = false;
    }
    os_ << "\n";
  }

  void raw(const std::string& line) { os_ << line << "\n"; }

 private:
  std::ofstream os_;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << content;
}

}  // namespace cliffock
