#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ends_lab {

/// Log-spaced grid from lo to hi (both included) with `per_decade` points per
/// factor of ten.
inline std::vector<double> log_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0) || !(hi >= lo) || per_decade < 1) {
    throw std::invalid_argument("log_grid: need 0 < lo <= hi and per_decade >= 1");
  }
  const double decades = std::log10(hi / lo);
  const auto steps = static_cast<std::size_t>(std::ceil(decades * per_decade - 1e-9));
  std::vector<double> g;
  g.reserve(steps + 1);
  if (steps == 0) {
    g.push_back(lo);
    if (hi > lo) g.push_back(hi);
    return g;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i <= steps; ++i) {
    g.push_back(i == steps ? hi : std::exp(llo + (lhi - llo) * static_cast<double>(i) / steps));
  }
  g.front() = lo;
  return g;
}

struct ArgMax {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section maximization of a function of x over [a, b], carried out in
/// log x when `log_scale` is set. Returns the best point actually evaluated.
template <class F>
ArgMax golden_max(F&& f, double a, double b, int iters, bool log_scale = true) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  auto to = [&](double x) { return log_scale ? std::log(x) : x; };
  auto from = [&](double y) { return log_scale ? std::exp(y) : y; };
  double lo = to(a), hi = to(b);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = f(from(c)), fd = f(from(d));
  ArgMax best = fc >= fd ? ArgMax{from(c), fc} : ArgMax{from(d), fd};
  for (int i = 0; i < iters; ++i) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = f(from(c));
      if (fc > best.value) best = {from(c), fc};
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = f(from(d));
      if (fd > best.value) best = {from(d), fd};
    }
  }
  return best;
}

/// Least-squares slope of log(y) against log(x).
inline double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_loglog_slope: need two or more paired samples");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace ends_lab
