#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ends_lab/params.hpp"

namespace ends_lab::io {

/// %.17g, so every double round-trips.
inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Minimal CSV table: fixed header, rows of preformatted cells.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  class Row {
   public:
    Row& operator<<(double x) { return add(num(x)); }
    Row& operator<<(int x) { return add(std::to_string(x)); }
    Row& operator<<(std::size_t x) { return add(std::to_string(x)); }
    Row& operator<<(bool x) { return add(x ? "1" : "0"); }
    Row& operator<<(std::string_view s) { return add(std::string(s)); }
    Row& operator<<(const char* s) { return add(s); }

   private:
    friend class Table;
    explicit Row(std::vector<std::string>& cells) : cells_(cells) {}
    Row& add(std::string s) {
      cells_.push_back(std::move(s));
      return *this;
    }
    std::vector<std::string>& cells_;
  };

  Row row() {
    rows_.emplace_back();
    return Row(rows_.back());
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string csv() const {
    std::string out = join(header_);
    for (const auto& r : rows_) out += join(r);
    return out;
  }

  /// Array of objects keyed by the header; numeric cells stay numbers.
  nlohmann::ordered_json json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows_) {
      nlohmann::ordered_json o;
      for (std::size_t i = 0; i < header_.size() && i < r.size(); ++i) o[header_[i]] = cell(r[i]);
      arr.push_back(std::move(o));
    }
    return arr;
  }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    return line + '\n';
  }

  static nlohmann::ordered_json cell(const std::string& s) {
    if (s.empty()) return s;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end && *end == '\0' && std::isfinite(v)) return v;
    return s;
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// JSON text; doubles use the shortest form that round-trips exactly.
inline std::string dump(const nlohmann::ordered_json& j) {
  return j.dump(2) + '\n';
}

inline nlohmann::ordered_json params_json(const ModelParams& p) {
  nlohmann::ordered_json j;
  j["n"] = p.n;
  j["m"] = p.m;
  j["delta_K"] = p.delta_K;
  j["mu_K"] = p.mu_K;
  j["sphere_radius"] = p.sphere_radius;
  j["quad_tol"] = p.quad_tol;
  j["quad_max_depth"] = p.quad_max_depth;
  j["seed"] = p.seed;
  return j;
}

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace ends_lab::io
