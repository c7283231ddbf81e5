#pragma once

#include <map>
#include <string>
#include <vector>

#include "shellred/geometry.hpp"

namespace shellred {

// Shortest text that round-trips the double; "inf", "-inf" and "nan" for non-finite values.
std::string fmt_num(double x);
std::string fmt_short(double x, int digits = 6);

// RFC 4180: fields containing a comma, quote, CR or LF are quoted, quotes doubled.
std::string csv_field(const std::string& s);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(const std::vector<std::string>& row);
  std::string str() const;
  void write(const std::string& path) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Flat "key = value" configuration; "[section]" lines prefix later keys with "section.".
// '#' starts a comment. Keys are unique.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  // keys below "prefix." with the prefix stripped
  std::map<std::string, std::string> section(const std::string& prefix) const;
  const std::map<std::string, std::string>& all() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
  std::string origin_;
};

// Legacy VTK structured grid, ASCII. Optional point scalars are written as POINT_DATA.
struct VtkSurface {
  int n1 = 0, n2 = 0;
  std::vector<Vec3> points;  // i fastest
  std::vector<std::pair<std::string, std::vector<double>>> scalars;
};

void write_vtk(const std::string& path, const VtkSurface& s, const std::string& title = "shellred surface");
VtkSurface read_vtk(const std::string& path);

}  // namespace shellred
