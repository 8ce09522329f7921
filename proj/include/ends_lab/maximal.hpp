#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ends_lab/functions.hpp"
#include "ends_lab/geometry.hpp"
#include "ends_lab/parallel.hpp"
#include "ends_lab/search.hpp"

namespace ends_lab {

struct SearchConfig {
  double r_min = 1e-3;
  double r_max_factor = 1e4;  // r_max = r_max_factor * norm(x)
  int grid_per_decade = 24;
  int refine_iters = 60;
  int center_grid_per_decade = 24;

  double r_max(const RadialPoint& x) const { return r_max_factor * norm(x); }

  void validate() const {
    if (!(r_min > 0) || !(r_max_factor * 1.0 > r_min)) throw DomainError("need 0 < r_min < r_max");
    if (grid_per_decade < 1 || refine_iters < 0 || center_grid_per_decade < 1) {
      throw DomainError("grid densities must be positive");
    }
  }
};

/// Best ball found by a maximal-function search.
struct MaxResult {
  double value = 0.0;
  RadialPoint center;
  double r = 0.0;
  bool boundary = false;  // argmax on the edge of the radius bracket
};

/// (1 / V(B)) ∫_B |f| dμ.
inline double ball_average(const Model& model, const RadialFunction& f, const Ball& b) {
  if (f.is_zero()) {
    if (!(b.radius > 0)) throw DomainError("ball radius must be positive");
    return 0.0;
  }
  const std::array<std::vector<double>, 2> extra{f.breaks(Region::EndM), f.breaks(Region::EndN)};
  const auto mom = model.ball_moments(
      b, [&f](Region e, double u) { return std::abs(f.eval(e, u)); }, std::abs(f.core_value()), extra);
  return mom[1] / mom[0];
}

/// M_c f(x): log grid in r over [r_min, r_max(x)] and golden-section refinement
/// in log r around the first grid maximum.
inline MaxResult maximal_centered(const Model& model, const RadialFunction& f, const RadialPoint& x,
                                  const SearchConfig& cfg = {}) {
  cfg.validate();
  const auto grid = log_grid(cfg.r_min, cfg.r_max(x), cfg.grid_per_decade);
  auto avg = [&](double r) { return ball_average(model, f, Ball{x, r}); };
  std::size_t best = 0;
  double best_v = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = avg(grid[i]);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  MaxResult res{best_v, x, grid[best], best == 0 || best + 1 == grid.size()};
  if (cfg.refine_iters > 0 && grid.size() >= 3) {
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    const auto g = golden_max(avg, lo, hi, cfg.refine_iters);
    if (g.value > res.value) {
      res.value = g.value;
      res.r = g.x;
    }
  }
  return res;
}

/// Uncentered maximal function of one fixed f at many points.
///
/// For radial f the average over B(y, r) depends only on (region of y, |y|, r),
/// and x lies in some ball of that family iff r exceeds the orientation-minimized
/// distance from x to the shell of y. Averages on a (center, radius) grid are
/// tabulated once; each query scans the feasible part of the table, adds balls
/// whose radius sits just above the feasibility threshold, includes the centered
/// result, and refines the winner by golden-section search.
class UncenteredMaximizer {
 public:
  /// Prepares the table for query points with norm(x) <= s_max.
  UncenteredMaximizer(const Model& model, RadialFunction f, SearchConfig cfg, double s_max)
      : model_(model), f_(std::move(f)), cfg_(cfg) {
    cfg_.validate();
    const double r_top = cfg_.r_max_factor * s_max;
    r_ = log_grid(cfg_.r_min, r_top, cfg_.grid_per_decade);
    u_ = log_grid(1.0, std::max(2.0, s_max + r_top), cfg_.center_grid_per_decade);
    const std::size_t nr = r_.size(), nu = u_.size();
    table_.assign((2 * nu + 1) * nr, 0.0);
    if (f_.is_zero()) return;
    parallel_for(2 * nu + 1, [&](std::size_t row) {
      const RadialPoint c = row_center(row);
      for (std::size_t j = 0; j < nr; ++j) table_[row * nr + j] = average(c, r_[j]);
    });
  }

  const RadialFunction& function() const { return f_; }
  const SearchConfig& config() const { return cfg_; }

  MaxResult operator()(const RadialPoint& x) const {
    MaxResult best = maximal_centered(model_, f_, x, cfg_);
    if (f_.is_zero()) return best;
    const double rmax = cfg_.r_max(x);
    const std::size_t nr = r_.size(), nu = u_.size();

    enum class Kind { Centered, Table, Edge };
    Kind kind = Kind::Centered;
    std::size_t best_row = 0;
    std::size_t best_j = 0;

    std::vector<double> edge_v(2 * nu + 1, 0.0);
    for (std::size_t row = 0; row < 2 * nu + 1; ++row) {
      const RadialPoint c = row_center(row);
      const double dmin = model_.min_distance(x, c);
      if (dmin >= rmax) continue;
      const double* vals = &table_[row * nr];
      for (std::size_t j = std::upper_bound(r_.begin(), r_.end(), dmin) - r_.begin(); j < nr && r_[j] <= rmax;
           ++j) {
        if (vals[j] > best.value) {
          best = {vals[j], c, r_[j], false};
          kind = Kind::Table;
          best_row = row;
          best_j = j;
        }
      }
      const double re = edge_radius(dmin);
      if (dmin >= cfg_.r_min && re <= rmax) {
        const double v = average(c, re);
        edge_v[row] = v;
        if (v > best.value) {
          best = {v, c, re, false};
          kind = Kind::Edge;
          best_row = row;
        }
      }
    }

    if (cfg_.refine_iters > 0) {
      if (kind == Kind::Table) refine_interior(x, best_row, best_j, rmax, best);
      if (kind == Kind::Edge) refine_edge(x, best_row, rmax, best);
      // edge peaks can be narrower than the center grid: refine every local
      // maximum along each end, not only the winner
      for (std::size_t row = 0; row < 2 * nu; ++row) {
        const std::size_t i = row % nu;
        const double v = edge_v[row];
        if (!(v > 0) || (kind == Kind::Edge && row == best_row)) continue;
        if (i > 0 && edge_v[row - 1] > v) continue;
        if (i + 1 < nu && edge_v[row + 1] > v) continue;
        refine_edge(x, row, rmax, best);
      }
    }
    best.boundary = best.r >= rmax * (1 - 1e-12);
    return best;
  }

 private:
  static double edge_radius(double dmin) { return dmin * (1 + 1e-10) + 1e-12; }

  RadialPoint row_center(std::size_t row) const {
    const std::size_t nu = u_.size();
    if (row == 2 * nu) return RadialPoint::core();
    return {row < nu ? Region::EndM : Region::EndN, u_[row % nu]};
  }

  double average(const RadialPoint& c, double r) const { return ball_average(model_, f_, Ball{c, r}); }

  std::pair<double, double> u_bracket(std::size_t row) const {
    const std::size_t i = row % u_.size();
    return {u_[i == 0 ? 0 : i - 1], u_[std::min(i + 1, u_.size() - 1)]};
  }

  void refine_interior(const RadialPoint& x, std::size_t row, std::size_t j, double rmax, MaxResult& best) const {
    RadialPoint c = best.center;
    const double dmin = model_.min_distance(x, c);
    const double lo = std::max(r_[j == 0 ? 0 : j - 1], edge_radius(dmin));
    const double hi = std::min(r_[std::min(j + 1, r_.size() - 1)], rmax);
    if (hi > lo) {
      const auto g = golden_max([&](double r) { return average(c, r); }, lo, hi, cfg_.refine_iters);
      if (g.value > best.value) {
        best.value = g.value;
        best.r = g.x;
      }
    }
    if (c.region == Region::Core) return;
    const double r = best.r;
    const auto [ulo, uhi] = u_bracket(row);
    auto along_u = [&](double u) {
      const RadialPoint y{c.region, u};
      return model_.min_distance(x, y) < r ? average(y, r) : 0.0;
    };
    const auto g = golden_max(along_u, ulo, uhi, cfg_.refine_iters);
    if (g.value > best.value) {
      best.value = g.value;
      best.center = {c.region, g.x};
    }
  }

  void refine_edge(const RadialPoint& x, std::size_t row, double rmax, MaxResult& best) const {
    const RadialPoint c = row_center(row);
    if (c.region == Region::Core) return;
    const auto [ulo, uhi] = u_bracket(row);
    auto edge = [&](double u) {
      const RadialPoint y{c.region, u};
      const double re = edge_radius(model_.min_distance(x, y));
      return re <= rmax && re >= cfg_.r_min ? average(y, re) : 0.0;
    };
    const auto g = golden_max(edge, ulo, uhi, cfg_.refine_iters);
    if (g.value > best.value) {
      const RadialPoint y{c.region, g.x};
      best = {g.value, y, edge_radius(model_.min_distance(x, y)), false};
    }
  }

  Model model_;
  RadialFunction f_;
  SearchConfig cfg_;
  std::vector<double> u_, r_;
  std::vector<double> table_;  // row-major: EndM centers, EndN centers, core
};

inline MaxResult maximal_uncentered(const Model& model, const RadialFunction& f, const RadialPoint& x,
                                    const SearchConfig& cfg = {}) {
  return UncenteredMaximizer(model, f, cfg, norm(x))(x);
}

// ---------------------------------------------------------------------------
// Counterexample: large-end points against the small-end indicator
// ---------------------------------------------------------------------------

struct CounterexampleRow {
  double s = 0;
  double uncentered = 0;
  double centered = 0;
  double ratio = 0;
  double argmax_r = 0;    // centered argmax radius
  double predicted_r = 0; // m s / (m - n)
  MaxResult uncentered_arg;
};

inline std::vector<CounterexampleRow> counterexample_profile(const Model& model, std::span<const double> s_list,
                                                             const SearchConfig& cfg = {}) {
  if (s_list.empty()) throw DomainError("counterexample_profile: empty s list");
  const auto chi2 = RadialFunction::indicator(Region::EndN);
  const double s_max = *std::max_element(s_list.begin(), s_list.end());
  const UncenteredMaximizer big(model, chi2, cfg, s_max);
  std::vector<CounterexampleRow> rows(s_list.size());
  parallel_for(s_list.size(), [&](std::size_t i) {
    const auto x = RadialPoint::end_m(s_list[i]);
    const auto mc = maximal_centered(model, chi2, x, cfg);
    const auto mu = big(x);
    rows[i] = {s_list[i], mu.value, mc.value, mu.value / mc.value, mc.r,
               model.m() * s_list[i] / (model.m() - model.n()), mu};
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Decay bounds and minimal ball volumes
// ---------------------------------------------------------------------------

struct DecayCheck {
  double constant = 0;            // sup over the grid of s^e M f / ‖f‖₁
  double max_decade_variation = 0; // largest max/min of s^e M f within one decade
  std::vector<double> s, normalized;
};

/// Largest ratio max/min among values whose abscissae lie within a factor 10.
inline double max_decade_variation(std::span<const double> s, std::span<const double> v) {
  double worst = 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double lo = v[i], hi = v[i];
    for (std::size_t j = i; j < s.size() && s[j] <= 10.0 * s[i] * (1 + 1e-12); ++j) {
      lo = std::min(lo, v[j]);
      hi = std::max(hi, v[j]);
    }
    worst = std::max(worst, hi / lo);
  }
  return worst;
}

inline DecayCheck decay_bound_check(const Model& model, const RadialFunction& f, Region end, int exponent,
                                    std::span<const double> s_grid, const SearchConfig& cfg = {}) {
  if (end == Region::Core) throw DomainError("decay_bound_check: evaluation region must be an end");
  if (s_grid.empty()) throw DomainError("decay_bound_check: empty grid");
  for (Region e : kEnds) {
    if (e == end && !f.segments(e).empty()) {
      throw DomainError("decay_bound_check: f must be supported away from the evaluation end");
    }
  }
  const double l1 = lp_norm(model, f, 1.0);
  if (!(l1 > 0)) throw DomainError("decay_bound_check: f must be nonzero");
  const UncenteredMaximizer mx(model, f, cfg, *std::max_element(s_grid.begin(), s_grid.end()));
  DecayCheck out;
  out.s.assign(s_grid.begin(), s_grid.end());
  out.normalized.resize(s_grid.size());
  parallel_for(s_grid.size(), [&](std::size_t i) {
    const double s = s_grid[i];
    out.normalized[i] = std::pow(s, exponent) * mx(RadialPoint::in(end, s)).value / l1;
  });
  out.constant = *std::max_element(out.normalized.begin(), out.normalized.end());
  out.max_decade_variation = max_decade_variation(out.s, out.normalized);
  return out;
}

struct MinimalVolume {
  double volume = 0;
  double normalized = 0;  // volume / |x|^n
  RadialPoint center;
  double r = 0;
};

/// Smallest V(y, r) over balls containing x (in the small end) that meet
/// `target` (the large end or the core).
inline MinimalVolume minimal_volume_bound(const Model& model, const RadialPoint& x, Region target,
                                          int grid_per_decade = 96, int refine_iters = 60) {
  if (x.region != Region::EndN) throw DomainError("minimal_volume_bound: x must lie in the small end");
  if (target == Region::EndN) throw InfeasibleError("minimal_volume_bound: target must be endM or core");
  const double delta = model.params().delta_K;
  // smallest radius at which a ball centered at y meets the target
  auto reach = [&](const RadialPoint& y) {
    if (y.region == Region::Core) return target == Region::EndM ? 0.5 * delta : 0.0;
    if (target == Region::Core) return y.s - 1.0;
    return y.region == Region::EndM ? 0.0 : y.s - 1.0 + delta;
  };
  auto radius = [&](const RadialPoint& y) {
    const double r = std::max(model.min_distance(x, y), reach(y));
    return r * (1 + 1e-10) + 1e-12;
  };
  auto volume = [&](const RadialPoint& y) { return model.ball_volume(y, radius(y)); };

  MinimalVolume best{volume(RadialPoint::core()), 0, RadialPoint::core(), radius(RadialPoint::core())};
  const auto grid = log_grid(1.0, 4.0 * x.s + 4.0, grid_per_decade);
  for (Region e : kEnds) {
    std::size_t arg = grid.size();
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = volume({e, grid[i]});
      if (v < vmin) {
        vmin = v;
        arg = i;
      }
    }
    const double lo = grid[arg == 0 ? 0 : arg - 1], hi = grid[std::min(arg + 1, grid.size() - 1)];
    const auto g = golden_max([&](double u) { return -volume({e, u}); }, lo, hi, refine_iters);
    RadialPoint y{e, grid[arg]};
    if (-g.value < vmin) {
      vmin = -g.value;
      y = {e, g.x};
    }
    if (vmin < best.volume) best = {vmin, 0, y, radius(y)};
  }
  best.normalized = best.volume / std::pow(x.s, model.n());
  return best;
}

}  // namespace ends_lab
