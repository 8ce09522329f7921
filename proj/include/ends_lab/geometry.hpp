#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "ends_lab/params.hpp"
#include "ends_lab/quadrature.hpp"
#include "ends_lab/search.hpp"

namespace ends_lab {

inline constexpr double kPi = std::numbers::pi;

/// Area of the unit sphere S^{d-1} in R^d (d = 1 gives the two-point sphere).
inline double sphere_area(int d) {
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

inline double euclidean_ball_volume(int d, double r) {
  return sphere_area(d) / d * std::pow(r, d);
}

namespace detail {

inline double sin_power_full(int k) {
  double v = (k % 2 == 0) ? kPi : 2.0;
  for (int j = (k % 2 == 0) ? 2 : 3; j <= k; j += 2) v *= (j - 1.0) / j;
  return v;
}

inline double sin_power_small(int k, double theta) {
  return quad::fixed<20>([k](double p) { return std::pow(std::sin(p), k); }, 0.0, theta);
}

}  // namespace detail

/// ∫_0^θ sin^k φ dφ for θ in [0, π]. Moderate angles use the reduction formula;
/// angles within 0.3 of either pole use a 20-point Gauss rule on the short arc,
/// which keeps full relative accuracy for tiny caps.
inline double sin_power_integral(int k, double theta) {
  if (k == 0) return theta;
  if (k == 1) {
    const double h = std::sin(0.5 * theta);
    return 2.0 * h * h;
  }
  constexpr double kEdge = 0.3;
  if (theta < kEdge) return detail::sin_power_small(k, theta);
  if (theta > kPi - kEdge) {
    return detail::sin_power_full(k) - detail::sin_power_small(k, kPi - theta);
  }
  const double s = std::sin(theta), c = std::cos(theta);
  double prev = (k % 2 == 0) ? theta : 1.0 - c;
  double sp = (k % 2 == 0) ? s : s * s;  // sin^{j-1} for the first j
  for (int j = (k % 2 == 0) ? 2 : 3; j <= k; j += 2) {
    prev = -sp * c / j + (j - 1.0) / j * prev;
    sp *= s * s;
  }
  return prev;
}

/// Area of the geodesic cap of angular radius θ on the unit sphere S^{d-1}.
inline double cap_integral(int d, double theta) {
  if (d < 2 || !(theta >= 0.0 && theta <= kPi)) {
    throw DomainError("cap_integral: need d >= 2 and theta in [0, pi]");
  }
  return sphere_area(d - 1) * sin_power_integral(d - 2, theta);
}

/// Cap angle from 1 - cos θ, stable for small caps.
inline double cap_angle_from_omc(double omc) {
  if (omc <= 0.0) return 0.0;
  if (omc >= 2.0) return kPi;
  return 2.0 * std::asin(std::sqrt(0.5 * omc));
}

/// Point of M with explicit coordinates: `flat` lives in the end's Euclidean
/// factor (|flat| >= 1) and `fiber` is a unit vector of the sphere factor of
/// the small end.
struct EmbeddedPoint {
  Region region = Region::Core;
  int flat_dim = 0;
  int fiber_dim = 0;  // ambient dimension of the fiber vector (m - n + 1)
  std::array<double, kMaxDim> flat{};
  std::array<double, kMaxDim> fiber{};

  double radius() const {
    double r2 = 0;
    for (int i = 0; i < flat_dim; ++i) r2 += flat[i] * flat[i];
    return std::sqrt(r2);
  }
};

/// The connected sum M = R^m # R^n as an explicit metric-measure model.
///
/// EndM is Euclidean R^m outside the unit ball. EndN is (R^n outside the unit
/// ball) x S^{m-n} of radius `sphere_radius`, with the product metric. The core
/// is an atom of measure mu_K crossed in length delta_K. Same-end distances are
/// the minimum of the product-Euclidean and through-core routes; all other
/// distances go through the core.
class Model {
 public:
  explicit Model(ModelParams p = {}) : p_(p) {
    p_.validate();
    area_m_ = sphere_area(p_.m);
    area_n_ = sphere_area(p_.n);
    fiber_area_ = sphere_area(p_.m - p_.n + 1) * std::pow(p_.sphere_radius, p_.m - p_.n);
    fiber_polar_ = sphere_area(p_.m - p_.n) * std::pow(p_.sphere_radius, p_.m - p_.n);
    full_fiber_cap_ = area_n_ * sin_power_integral(p_.m - p_.n - 1, kPi);
  }

  const ModelParams& params() const { return p_; }
  int n() const { return p_.n; }
  int m() const { return p_.m; }

  /// Dimension of the flat factor of an end (its dimension at infinity).
  int flat_dim(Region e) const { return e == Region::EndM ? p_.m : p_.n; }

  double fiber_area() const { return fiber_area_; }

  /// ρ_E(u): measure density of the radial shell at u.
  double shell_density(Region e, double u) const {
    if (e == Region::EndM) return area_m_ * std::pow(u, p_.m - 1);
    return area_n_ * std::pow(u, p_.n - 1) * fiber_area_;
  }

  double shell_coefficient(Region e) const {
    return e == Region::EndM ? area_m_ : area_n_ * fiber_area_;
  }

  /// Measure of {a <= u < b} in an end.
  double shell_measure(Region e, double a, double b) const {
    const int d = flat_dim(e);
    return shell_coefficient(e) * (std::pow(b, d) - std::pow(a, d)) / d;
  }

  // ---- metric -------------------------------------------------------------

  /// Length of the route from an end point at radial coordinate s through the
  /// core to radial coordinate u (either end).
  double through_core(double s, double u) const {
    return ((s - 1.0) + (u - 1.0)) + p_.delta_K;
  }

  double distance_to_core(double s) const { return (s - 1.0) + 0.5 * p_.delta_K; }

  double distance(const EmbeddedPoint& a, const EmbeddedPoint& b) const {
    if (a.region == Region::Core && b.region == Region::Core) return 0.0;
    if (a.region == Region::Core) return distance_to_core(b.radius());
    if (b.region == Region::Core) return distance_to_core(a.radius());
    const double sa = a.radius(), sb = b.radius();
    const double via_core = through_core(sa, sb);
    if (a.region != b.region) return via_core;
    double flat2 = 0.0;
    for (int i = 0; i < a.flat_dim; ++i) {
      const double d = a.flat[i] - b.flat[i];
      flat2 += d * d;
    }
    if (a.region == Region::EndN) {
      double dm = 0.0, dp = 0.0;
      for (int i = 0; i < a.fiber_dim; ++i) {
        dm += (a.fiber[i] - b.fiber[i]) * (a.fiber[i] - b.fiber[i]);
        dp += (a.fiber[i] + b.fiber[i]) * (a.fiber[i] + b.fiber[i]);
      }
      const double angle = 2.0 * std::atan2(std::sqrt(dm), std::sqrt(dp));
      const double arc = p_.sphere_radius * angle;
      flat2 += arc * arc;
    }
    return std::min(std::sqrt(flat2), via_core);
  }

  /// Distance from a (radial) center to the nearest point of the shell at u in
  /// `end`, minimized over orientations.
  double min_distance(const RadialPoint& x, Region end, double u) const {
    if (x.region == Region::Core) return distance_to_core(u);
    if (x.region == end) return std::abs(x.s - u);
    return through_core(x.s, u);
  }

  /// Distance between two radial points after minimizing over orientations.
  double min_distance(const RadialPoint& x, const RadialPoint& y) const {
    if (x.region == Region::Core && y.region == Region::Core) return 0.0;
    if (y.region == Region::Core) return distance_to_core(x.s);
    return min_distance(x, y.region, y.s);
  }

  // ---- balls ----------------------------------------------------------------

  /// Fraction of the core atom inside B(center, r): a linear ramp across the
  /// crossing length for end centers, everything for the core itself.
  double core_fraction(const RadialPoint& c, double r) const {
    if (c.region == Region::Core) return 1.0;
    return std::clamp((r - (c.s - 1.0)) / p_.delta_K, 0.0, 1.0);
  }

  /// Largest u for which the whole shell at u in `end` is reached through the
  /// core (the shell is fully inside the ball for u < this value).
  double core_reach(const RadialPoint& c, double r) const {
    if (c.region == Region::Core) return r + 1.0 - 0.5 * p_.delta_K;
    return r - (c.s - 1.0) - p_.delta_K + 1.0;
  }

  /// Measure density of the shell {u} x (end) intersected with B(center, r).
  double slice_weight(const RadialPoint& c, double r, Region end, double u) const {
    if (!(r > 0) || !(u >= 1.0) || end == Region::Core) {
      throw DomainError("slice_weight: need r > 0, u >= 1 and an end region");
    }
    if (u < core_reach(c, r)) return shell_density(end, u);
    if (c.region != end) return 0.0;
    const double s = c.s;
    if (end == Region::EndM) {
      const double omc = (r * r - (s - u) * (s - u)) / (2.0 * s * u);
      if (omc <= 0.0) return 0.0;
      if (omc >= 2.0) return shell_density(end, u);
      return std::pow(u, p_.m - 1) * cap_integral(p_.m, cap_angle_from_omc(omc));
    }
    return std::pow(u, p_.n - 1) * fiber_polar_ * fiber_cap_integral(s, u, r);
  }

  /// Integration breakpoints for the slices of `end` met by B(center, r); the
  /// first entry is 1 and the last bounds the support. Empty if no slice of
  /// `end` meets the ball.
  std::vector<double> slice_breaks(const RadialPoint& c, double r, Region end) const {
    const double reach = core_reach(c, r);
    if (c.region != end) {
      if (reach <= 1.0) return {};
      return {1.0, reach};
    }
    const double s = c.s;
    const double hi = std::max(s + r, reach);
    if (hi <= 1.0) return {};
    std::vector<double> cand{reach, s - r, s + r, r - s, s};
    if (end == Region::EndN) {
      const double R = p_.sphere_radius;
      const double q2 = r * r - R * R * kPi * kPi;
      if (q2 > 0) {
        const double q = std::sqrt(q2);
        cand.insert(cand.end(), {q - s, s - q, s + q});
      }
    }
    const double lo = reach > 1.0 ? 1.0 : std::max(1.0, s - r);
    if (!(hi > lo)) return {};
    return quad::breakpoints(std::move(cand), lo, hi);
  }

  quad::Options quad_options(double rel_scale = 1.0) const {
    quad::Options o;
    o.rel_tol = p_.quad_tol * rel_scale;
    o.max_depth = p_.quad_max_depth;
    return o;
  }

  /// Computes {μ(B), ∫_B g} where g is radial: `weight(end, u)` on the ends and
  /// `core_value` on the core. `extra[e]` adds breakpoints (discontinuities of
  /// the weight) for end e.
  template <class W>
  std::array<double, 2> ball_moments(const Ball& b, W&& weight, double core_value,
                                     const std::array<std::vector<double>, 2>& extra = {}) const {
    if (!(b.radius > 0)) throw DomainError("ball radius must be positive");
    std::array<double, 2> out{};
    for (int ei = 0; ei < 2; ++ei) {
      const Region e = kEnds[ei];
      auto br = slice_breaks(b.center, b.radius, e);
      if (br.empty()) continue;
      if (!extra[ei].empty()) {
        std::vector<double> cand(br.begin() + 1, br.end() - 1);
        cand.insert(cand.end(), extra[ei].begin(), extra[ei].end());
        br = quad::breakpoints(std::move(cand), br.front(), br.back());
      }
      auto integrand = [&](double u) {
        const double w = slice_weight(b.center, b.radius, e, u);
        return std::array<double, 2>{w, w == 0.0 ? 0.0 : w * weight(e, u)};
      };
      const auto part = quad::integrate_vec<2>(integrand, br, quad_options());
      out[0] += part[0];
      out[1] += part[1];
    }
    const double core = p_.mu_K * core_fraction(b.center, b.radius);
    out[0] += core;
    out[1] += core * core_value;
    return out;
  }

  /// V(x, r) = μ(B(x, r)).
  double ball_volume(const Ball& b) const {
    if (!(b.radius > 0)) throw DomainError("ball radius must be positive");
    double v = p_.mu_K * core_fraction(b.center, b.radius);
    for (Region e : kEnds) {
      const auto br = slice_breaks(b.center, b.radius, e);
      if (br.empty()) continue;
      v += quad::integrate([&](double u) { return slice_weight(b.center, b.radius, e, u); }, br,
                           quad_options());
    }
    return v;
  }

  double ball_volume(const RadialPoint& x, double r) const { return ball_volume(Ball{x, r}); }

  /// Volume of a ball of radius r whose center lies at least r + 1 from the
  /// core side of its end (Euclidean in the large end, a product ball in the
  /// small end).
  double deep_volume(Region e, double r) const {
    if (e == Region::EndM) return euclidean_ball_volume(p_.m, r);
    const double R = p_.sphere_radius;
    const int k = p_.m - p_.n - 1;
    auto f = [&](double phi) {
      const double rho2 = r * r - R * R * phi * phi;
      return rho2 <= 0 ? 0.0 : std::pow(rho2, 0.5 * p_.n) * std::pow(std::sin(phi), k);
    };
    return fiber_polar_ * sphere_area(p_.n) / p_.n *
           quad::integrate(f, 0.0, std::min(kPi, r / R), quad_options(0.1));
  }

 private:
  /// ∫_0^π cap_n(θ0(φ)) sin^{m-n-1}φ dφ for a small-end center at s and the
  /// small-end shell at u, where θ0(φ) is the flat cap angle left once the
  /// fiber displacement R φ is spent.
  double fiber_cap_integral(double s, double u, double r) const {
    const double R = p_.sphere_radius;
    const int k = p_.m - p_.n - 1;
    const double phi_full = std::min(kPi, std::sqrt(std::max(0.0, r * r - (s + u) * (s + u))) / R);
    const double phi_empty = std::min(kPi, std::sqrt(std::max(0.0, r * r - (s - u) * (s - u))) / R);
    double total = area_n_ * sin_power_integral(k, phi_full);
    if (phi_empty > phi_full) {
      auto f = [&](double phi) {
        const double rho2 = r * r - R * R * phi * phi;
        const double omc = (rho2 - (s - u) * (s - u)) / (2.0 * s * u);
        return cap_integral(p_.n, cap_angle_from_omc(omc)) * std::pow(std::sin(phi), k);
      };
      // Absolute floor at the scale of the whole fiber integral: near grazing
      // incidence the cap angle suffers cancellation and relative accuracy on a
      // vanishing remainder is meaningless.
      auto opt = quad_options(0.1);
      opt.abs_tol = opt.rel_tol * full_fiber_cap_;
      total += quad::integrate(f, phi_full, phi_empty, opt);
    }
    return total;
  }

  ModelParams p_;
  double area_m_ = 0, area_n_ = 0, fiber_area_ = 0, fiber_polar_ = 0, full_fiber_cap_ = 0;
};

// ---------------------------------------------------------------------------
// Scans
// ---------------------------------------------------------------------------

struct DoublingRow {
  RadialPoint x;
  double r = 0, volume = 0, volume_2r = 0, ratio = 0;
};

inline DoublingRow doubling_row(const Model& model, const RadialPoint& x, double r) {
  DoublingRow row{x, r, model.ball_volume(x, r), model.ball_volume(x, 2.0 * r), 0.0};
  row.ratio = row.volume_2r / row.volume;
  return row;
}

/// One row per (center, radius) pair, centers outermost.
inline std::vector<DoublingRow> doubling_scan(const Model& model, std::span<const RadialPoint> centers,
                                              std::span<const double> radii) {
  if (centers.empty() || radii.empty()) throw DomainError("doubling_scan: empty input");
  std::vector<DoublingRow> rows;
  rows.reserve(centers.size() * radii.size());
  for (const auto& x : centers) {
    for (double r : radii) rows.push_back(doubling_row(model, x, r));
  }
  return rows;
}

enum class VolumeRegime { Local, SmallEnd, Large };

inline std::string_view regime_tag(VolumeRegime r) {
  switch (r) {
    case VolumeRegime::Local: return "a";
    case VolumeRegime::SmallEnd: return "b";
    case VolumeRegime::Large: return "c";
  }
  return "?";
}

struct RegimeCheck {
  VolumeRegime regime;
  double volume;
  double ratio;  // V / r^{d(regime)}
};

/// (a) r <= 1; (b) ball inside the small end (does not reach the core);
/// (c) everything else.
inline RegimeCheck volume_regime_check(const Model& model, const RadialPoint& x, double r) {
  VolumeRegime regime = VolumeRegime::Large;
  if (r <= 1.0) {
    regime = VolumeRegime::Local;
  } else if (x.region == Region::EndN && r <= x.s - 1.0) {
    regime = VolumeRegime::SmallEnd;
  }
  const double v = model.ball_volume(x, r);
  const int d = regime == VolumeRegime::SmallEnd ? model.n() : model.m();
  return {regime, v, v / std::pow(r, d)};
}

/// Least-squares log-log slope of r -> V(x, r) over `count` log-spaced radii.
inline double volume_growth_slope(const Model& model, const RadialPoint& x, double r_lo, double r_hi,
                                  int count = 25) {
  std::vector<double> rs(count), vs(count);
  for (int i = 0; i < count; ++i) {
    rs[i] = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (count - 1));
    vs[i] = model.ball_volume(x, rs[i]);
  }
  return fit_loglog_slope(rs, vs);
}

}  // namespace ends_lab
