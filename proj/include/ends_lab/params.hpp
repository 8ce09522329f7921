#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ends_lab {

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when adaptive quadrature (or another iterative scheme) exhausts its
/// depth or evaluation budget.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Regions and points
// ---------------------------------------------------------------------------

/// The three pieces of M: the large end (dimension m at infinity), the small
/// end (dimension n at infinity, carrying a sphere factor) and the core.
enum class Region { EndM, EndN, Core };

inline constexpr std::array<Region, 2> kEnds{Region::EndM, Region::EndN};

inline std::string_view region_name(Region r) {
  switch (r) {
    case Region::EndM: return "endM";
    case Region::EndN: return "endN";
    case Region::Core: return "core";
  }
  return "?";
}

inline Region parse_region(std::string_view s) {
  if (s == "endM" || s == "M" || s == "m" || s == "endm") return Region::EndM;
  if (s == "endN" || s == "N" || s == "n" || s == "endn") return Region::EndN;
  if (s == "core" || s == "K" || s == "Core") return Region::Core;
  throw DomainError("unknown region '" + std::string(s) + "'");
}

inline bool is_end(Region r) { return r != Region::Core; }

/// A point of M up to the rotational symmetry of each end: the region plus the
/// radial coordinate s >= 1. The core is a single atom and carries s = 1.
struct RadialPoint {
  Region region = Region::Core;
  double s = 1.0;

  static RadialPoint end_m(double s) { return checked(Region::EndM, s); }
  static RadialPoint end_n(double s) { return checked(Region::EndN, s); }
  static RadialPoint core() { return {Region::Core, 1.0}; }
  static RadialPoint in(Region r, double s) {
    return r == Region::Core ? core() : checked(r, s);
  }

  friend bool operator==(const RadialPoint&, const RadialPoint&) = default;

 private:
  static RadialPoint checked(Region r, double s) {
    if (!(s >= 1.0) || !std::isfinite(s)) {
      throw DomainError("radial coordinate must be finite and >= 1");
    }
    return {r, s};
  }
};

/// |x|: the radial coordinate for end points, 1 on the core.
inline double norm(const RadialPoint& p) {
  return p.region == Region::Core ? 1.0 : p.s;
}

/// Parses `core` or `REGION:s`, e.g. `endN:3.5`.
inline RadialPoint parse_point(std::string_view text) {
  const auto colon = text.find(':');
  const Region r = parse_region(text.substr(0, colon));
  if (r == Region::Core) {
    if (colon != std::string_view::npos) throw DomainError("the core takes no coordinate");
    return RadialPoint::core();
  }
  if (colon == std::string_view::npos) throw DomainError("point '" + std::string(text) + "' needs a coordinate");
  const std::string num(text.substr(colon + 1));
  std::size_t used = 0;
  double s = 0;
  try {
    s = std::stod(num, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != num.size()) throw DomainError("bad coordinate in '" + std::string(text) + "'");
  return RadialPoint::in(r, s);
}

/// Open geodesic ball; the center sits on the reference axis of its end.
struct Ball {
  RadialPoint center;
  double radius = 1.0;
};

// ---------------------------------------------------------------------------
// Model parameters
// ---------------------------------------------------------------------------

inline constexpr int kMaxDim = 16;

struct ModelParams {
  int n = 3;
  int m = 5;
  double delta_K = 2.0;
  double mu_K = 1.0;
  double sphere_radius = 1.0 / 3.14159265358979323846;
  double quad_tol = 1e-8;
  int quad_max_depth = 40;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(2 < n && n < m)) throw ConfigError("dimensions must satisfy 2 < n < m");
    if (m > kMaxDim) throw ConfigError("m exceeds the supported maximum of 16");
    if (!(delta_K > 0) || !(mu_K > 0) || !(sphere_radius > 0)) {
      throw ConfigError("delta_K, mu_K and sphere_radius must be positive");
    }
    if (!(quad_tol > 0 && quad_tol <= 1e-2)) {
      throw ConfigError("quad_tol must lie in (0, 1e-2]");
    }
    if (quad_max_depth < 1) throw ConfigError("quad_max_depth must be >= 1");
  }

  /// Applies one `key=value` assignment. Keys are the field names.
  void set(std::string_view key, std::string_view value) {
    const std::string v(value);
    try {
      std::size_t used = 0;
      auto whole = [&](std::size_t u) {
        if (u != v.size()) throw std::invalid_argument("trailing characters");
      };
      if (key == "n") { n = std::stoi(v, &used); whole(used); }
      else if (key == "m") { m = std::stoi(v, &used); whole(used); }
      else if (key == "delta_K") { delta_K = std::stod(v, &used); whole(used); }
      else if (key == "mu_K") { mu_K = std::stod(v, &used); whole(used); }
      else if (key == "sphere_radius") { sphere_radius = std::stod(v, &used); whole(used); }
      else if (key == "quad_tol") { quad_tol = std::stod(v, &used); whole(used); }
      else if (key == "quad_max_depth") { quad_max_depth = std::stoi(v, &used); whole(used); }
      else if (key == "seed") { seed = std::stoull(v, &used); whole(used); }
      else throw ConfigError("unknown config key '" + std::string(key) + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("bad value '" + v + "' for key '" + std::string(key) + "'");
    }
  }

  std::map<std::string, std::string> to_map() const {
    auto g = [](double x) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      return std::string(buf);
    };
    return {{"n", std::to_string(n)},
            {"m", std::to_string(m)},
            {"delta_K", g(delta_K)},
            {"mu_K", g(mu_K)},
            {"sphere_radius", g(sphere_radius)},
            {"quad_tol", g(quad_tol)},
            {"quad_max_depth", std::to_string(quad_max_depth)},
            {"seed", std::to_string(seed)}};
  }
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

/// Reads a flat `key=value` file (one assignment per line, `#` comments) on top
/// of `base`.
inline ModelParams load_params(std::istream& in, ModelParams base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    base.set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
  }
  base.validate();
  return base;
}

inline ModelParams load_params_file(const std::string& path, ModelParams base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return load_params(in, base);
}

}  // namespace ends_lab
