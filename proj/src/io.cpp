#include "shellred/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "shellred/errors.hpp"

namespace shellred {

std::string fmt_num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string fmt_short(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void CsvTable::add_row(const std::vector<std::string>& row) {
  if (row.size() != header_.size()) throw ShellError(ErrorKind::Config, "csv row width does not match header");
  rows_.push_back(row);
}

std::string CsvTable::str() const {
  std::string out;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) out += ',';
      out += csv_field(r[k]);
    }
    out += "\r\n";
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ShellError(ErrorKind::Config, "cannot write " + path);
  f << str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(field);
      rows.push_back(row);
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& what) {
  std::string t = trim(s);
  if (t == "inf" || t == "+inf") return INFINITY;
  if (t == "-inf") return -INFINITY;
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty())
    throw ShellError(ErrorKind::Config, what + ": not a number: '" + s + "'");
  return v;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ShellError(ErrorKind::Config, where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ShellError(ErrorKind::Config, where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ShellError(ErrorKind::Config, where + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (c.kv_.count(key)) throw ShellError(ErrorKind::Config, where + ": duplicate key " + key);
    c.kv_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ShellError(ErrorKind::Config, "cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::string Config::require(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ShellError(ErrorKind::Config, origin_ + ": missing key " + key);
  return it->second;
}

double Config::num(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : parse_double(it->second, origin_ + ": " + key);
}

int Config::integer(const std::string& key, int fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::string t = trim(it->second);
  int v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty())
    throw ShellError(ErrorKind::Config, origin_ + ": " + key + ": not an integer: '" + it->second + "'");
  return v;
}

bool Config::flag(const std::string& key, bool fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ShellError(ErrorKind::Config, origin_ + ": " + key + ": not a boolean: '" + v + "'");
}

std::map<std::string, std::string> Config::section(const std::string& prefix) const {
  std::map<std::string, std::string> out;
  std::string p = prefix + ".";
  for (const auto& [k, v] : kv_)
    if (k.compare(0, p.size(), p) == 0) out[k.substr(p.size())] = v;
  return out;
}

void write_vtk(const std::string& path, const VtkSurface& s, const std::string& title) {
  const std::size_t n = std::size_t(s.n1) * s.n2;
  if (s.points.size() != n) throw ShellError(ErrorKind::Config, "vtk: point count does not match dimensions");
  std::ofstream f(path);
  if (!f) throw ShellError(ErrorKind::Config, "cannot write " + path);
  f << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_GRID\n";
  f << "DIMENSIONS " << s.n1 << " " << s.n2 << " 1\n";
  f << "POINTS " << n << " double\n";
  for (const Vec3& p : s.points) f << fmt_num(p(0)) << " " << fmt_num(p(1)) << " " << fmt_num(p(2)) << "\n";
  if (!s.scalars.empty()) {
    f << "POINT_DATA " << n << "\n";
    for (const auto& [name, vals] : s.scalars) {
      if (vals.size() != n) throw ShellError(ErrorKind::Config, "vtk: scalar field " + name + " has wrong size");
      f << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : vals) f << fmt_num(v) << "\n";
    }
  }
}

VtkSurface read_vtk(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ShellError(ErrorKind::Config, "cannot read " + path);
  std::string line;
  std::getline(f, line);
  if (line.rfind("# vtk DataFile", 0) != 0) throw ShellError(ErrorKind::Config, path + ": not a legacy VTK file");
  std::getline(f, line);  // title
  std::string tok;
  f >> tok;
  if (tok != "ASCII") throw ShellError(ErrorKind::Config, path + ": only ASCII VTK is supported");
  VtkSurface s;
  int n3 = 0;
  std::size_t n = 0;
  auto read_num = [&](const std::string& what) {
    std::string t;
    if (!(f >> t)) throw ShellError(ErrorKind::Config, path + ": truncated " + what);
    return parse_double(t, path + ": " + what);
  };
  while (f >> tok) {
    if (tok == "DATASET") {
      f >> tok;
      if (tok != "STRUCTURED_GRID") throw ShellError(ErrorKind::Config, path + ": expected STRUCTURED_GRID");
    } else if (tok == "DIMENSIONS") {
      f >> s.n1 >> s.n2 >> n3;
      if (n3 != 1 || s.n1 <= 0 || s.n2 <= 0) throw ShellError(ErrorKind::Config, path + ": bad DIMENSIONS");
    } else if (tok == "POINTS") {
      f >> n >> tok;
      if (n != std::size_t(s.n1) * s.n2) throw ShellError(ErrorKind::Config, path + ": POINTS count mismatch");
      s.points.resize(n);
      for (std::size_t k = 0; k < n; ++k)
        for (int c = 0; c < 3; ++c) s.points[k](c) = read_num("POINTS");
    } else if (tok == "POINT_DATA") {
      f >> n;
    } else if (tok == "SCALARS") {
      std::string name, type;
      int ncomp = 1;
      f >> name >> type;
      std::getline(f, line);
      if (!trim(line).empty()) ncomp = std::stoi(trim(line));
      if (ncomp != 1) throw ShellError(ErrorKind::Config, path + ": only scalar fields are supported");
      f >> tok >> tok;  // LOOKUP_TABLE default
      std::vector<double> vals(n);
      for (std::size_t k = 0; k < n; ++k) vals[k] = read_num("SCALARS " + name);
      s.scalars.emplace_back(name, std::move(vals));
    } else {
      throw ShellError(ErrorKind::Config, path + ": unexpected token " + tok);
    }
  }
  if (s.points.empty()) throw ShellError(ErrorKind::Config, path + ": no POINTS section");
  return s;
}

}  // namespace shellred
