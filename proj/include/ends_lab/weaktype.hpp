#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "ends_lab/functions.hpp"
#include "ends_lab/geometry.hpp"
#include "ends_lab/heat.hpp"
#include "ends_lab/maximal.hpp"
#include "ends_lab/parallel.hpp"
#include "ends_lab/search.hpp"

namespace ends_lab {

enum class Operator { Centered, Uncentered, Heat };

inline constexpr std::array<Operator, 3> kAllOperators{Operator::Centered, Operator::Uncentered, Operator::Heat};

inline std::string_view operator_name(Operator op) {
  switch (op) {
    case Operator::Centered: return "M_centered";
    case Operator::Uncentered: return "M_uncentered";
    case Operator::Heat: return "M_heat";
  }
  return "?";
}

inline Operator parse_operator(std::string_view s) {
  for (Operator op : kAllOperators)
    if (s == operator_name(op)) return op;
  if (s == "centered") return Operator::Centered;
  if (s == "uncentered") return Operator::Uncentered;
  if (s == "heat") return Operator::Heat;
  throw DomainError("unknown operator '" + std::string(s) + "'");
}

/// Radial evaluation grid: the same log-spaced s nodes in both ends, plus the core.
struct ProfileGrid {
  double s_max = 1e3;
  int per_decade = 8;

  std::vector<double> nodes() const { return log_grid(1.0, s_max, per_decade); }
};

/// Values of an operator applied to f on a radial grid. In each end the
/// profile is the piecewise interpolant of (s, value): linear in (log s, log
/// value) between positive values, linear in s otherwise. Repeated s values
/// encode jumps.
struct MaximalProfile {
  Operator op = Operator::Centered;
  std::array<std::vector<double>, 2> s;
  std::array<std::vector<double>, 2> value;
  std::array<std::vector<double>, 2> argmax;  // radius for M, time for M_heat
  double core_value = 0.0;
  double core_argmax = 0.0;

  std::vector<double>& nodes(Region e) { return s[e == Region::EndM ? 0 : 1]; }
  std::vector<double>& values(Region e) { return value[e == Region::EndM ? 0 : 1]; }
  const std::vector<double>& nodes(Region e) const { return s[e == Region::EndM ? 0 : 1]; }
  const std::vector<double>& values(Region e) const { return value[e == Region::EndM ? 0 : 1]; }

  double max_value() const {
    double v = core_value;
    for (const auto& vs : value)
      for (double x : vs) v = std::max(v, x);
    return v;
  }

  /// Largest value at the outermost node of either end.
  double edge_value() const {
    double v = 0.0;
    for (const auto& vs : value)
      if (!vs.empty()) v = std::max(v, vs.back());
    return v;
  }

  void validate() const {
    for (int k = 0; k < 2; ++k) {
      if (s[k].size() != value[k].size()) throw DomainError("profile: node and value counts differ");
      for (std::size_t i = 0; i < s[k].size(); ++i) {
        if (!(s[k][i] >= 1.0) || (i > 0 && s[k][i] < s[k][i - 1])) throw DomainError("profile: bad nodes");
        if (!(value[k][i] >= 0.0) || !std::isfinite(value[k][i])) throw DomainError("profile: bad value");
      }
    }
  }
};

struct ProfileConfig {
  ProfileGrid grid;
  SearchConfig search;
  HeatSearchConfig heat;
  KernelConstants kernel;
};

/// Evaluates `op` f at every grid node of both ends and at the core.
inline MaximalProfile operator_profile(const Model& model, const RadialFunction& f, Operator op,
                                       const ProfileConfig& cfg = {}) {
  const auto nodes = cfg.grid.nodes();
  const std::size_t ns = nodes.size();
  MaximalProfile prof;
  prof.op = op;
  for (int k = 0; k < 2; ++k) {
    prof.s[k] = nodes;
    prof.value[k].assign(ns, 0.0);
    prof.argmax[k].assign(ns, 0.0);
  }
  if (f.is_zero()) return prof;

  // every operator is positively homogeneous: search on the normalized input
  const double scale = f.coefficient_scale();
  const RadialFunction g = f.normalized();
  auto point = [&](std::size_t i) {
    return i == 2 * ns ? RadialPoint::core() : RadialPoint{kEnds[i / ns], nodes[i % ns]};
  };
  std::vector<double> val(2 * ns + 1), arg(2 * ns + 1);
  switch (op) {
    case Operator::Centered:
      parallel_for(val.size(), [&](std::size_t i) {
        const auto r = maximal_centered(model, g, point(i), cfg.search);
        val[i] = r.value;
        arg[i] = r.r;
      });
      break;
    case Operator::Uncentered: {
      const UncenteredMaximizer um(model, g, cfg.search, nodes.back());
      parallel_for(val.size(), [&](std::size_t i) {
        const auto r = um(point(i));
        val[i] = r.value;
        arg[i] = r.r;
      });
      break;
    }
    case Operator::Heat: {
      const HeatKernel hk(model, cfg.kernel);
      parallel_for(val.size(), [&](std::size_t i) {
        const auto r = heat_maximal(hk, g, point(i), cfg.heat);
        val[i] = r.value;
        arg[i] = r.t;
      });
      break;
    }
  }
  for (std::size_t i = 0; i < 2 * ns; ++i) {
    prof.value[i / ns][i % ns] = scale * val[i];
    prof.argmax[i / ns][i % ns] = arg[i];
  }
  prof.core_value = scale * val[2 * ns];
  prof.core_argmax = arg[2 * ns];
  return prof;
}

namespace detail {

/// Part of [s0, s1] where the interpolant from v0 to v1 exceeds alpha.
inline std::pair<double, double> piece_above(double s0, double s1, double v0, double v1, double alpha) {
  const bool a0 = v0 > alpha, a1 = v1 > alpha;
  if (a0 && a1) return {s0, s1};
  if (!a0 && !a1) return {s0, s0};
  double cross;
  if (v0 > 0 && v1 > 0) {
    const double w = (std::log(alpha) - std::log(v0)) / (std::log(v1) - std::log(v0));
    cross = std::exp(std::log(s0) + w * (std::log(s1) - std::log(s0)));
  } else {
    cross = s0 + (alpha - v0) / (v1 - v0) * (s1 - s0);
  }
  cross = std::clamp(cross, s0, s1);
  return a0 ? std::pair{s0, cross} : std::pair{cross, s1};
}

}  // namespace detail

/// μ{x : profile(x) > α} within the profile's radial range.
inline double distribution_function(const Model& model, const MaximalProfile& prof, double alpha) {
  if (!(alpha > 0)) throw DomainError("distribution_function: alpha must be positive");
  double mu = prof.core_value > alpha ? model.params().mu_K : 0.0;
  for (Region e : kEnds) {
    const auto& s = prof.nodes(e);
    const auto& v = prof.values(e);
    if (s.size() == 1 && v[0] > alpha) continue;  // a single node spans no interval
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (!(s[i + 1] > s[i])) continue;
      const auto [a, b] = detail::piece_above(s[i], s[i + 1], v[i], v[i + 1], alpha);
      if (b > a) mu += model.shell_measure(e, a, b);
    }
  }
  return mu;
}

struct DistributionProfile {
  std::vector<double> alpha_grid;
  std::vector<double> lambda;
  double l1_norm = 0;
  double k_weak = 0;
  double argmax_alpha = 0;
};

struct WeakConfig {
  int alpha_per_decade = 16;
  double floor = 1e-12;  // smallest α relative to the profile maximum
};

/// sup over α of α λ(α) / ‖f‖₁. The α grid is log-spaced over the band where
/// every super-level set lies inside the grid (above the outermost node
/// values) up to the profile maximum, and includes each node value approached
/// from below.
inline DistributionProfile weak11_constant(const Model& model, const MaximalProfile& prof, double l1_norm,
                                           const WeakConfig& cfg = {}) {
  if (!(l1_norm > 0) || !std::isfinite(l1_norm)) throw DomainError("weak11_constant: need 0 < ||f||_1 < inf");
  DistributionProfile out;
  out.l1_norm = l1_norm;
  const double top = prof.max_value();
  if (!(top > 0)) return out;
  const double lo = std::max(prof.edge_value(), cfg.floor * top);
  const double hi = top;
  if (!(hi > lo)) return out;
  std::vector<double> alphas = log_grid(lo, hi, cfg.alpha_per_decade);
  const double below = 1.0 - 1e-12;
  for (Region e : kEnds)
    for (double v : prof.values(e))
      if (v * below > lo && v * below < hi) alphas.push_back(v * below);
  if (prof.core_value * below > lo && prof.core_value * below < hi) alphas.push_back(prof.core_value * below);
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  out.alpha_grid = alphas;
  out.lambda.reserve(alphas.size());
  for (double a : alphas) {
    const double lam = distribution_function(model, prof, a);
    out.lambda.push_back(lam);
    const double k = a * lam / l1_norm;
    if (k > out.k_weak) {
      out.k_weak = k;
      out.argmax_alpha = a;
    }
  }
  return out;
}

/// ‖profile‖_p over the model measure. Each end is integrated exactly on the
/// interpolant and extended past the last node by the last log-log slope;
/// returns +inf when that extension is not p-integrable.
inline double profile_lp_norm(const Model& model, const MaximalProfile& prof, double p) {
  if (std::isinf(p)) return prof.max_value();
  if (!(p >= 1.0)) throw DomainError("profile_lp_norm: need p >= 1");
  double acc = std::pow(prof.core_value, p) * model.params().mu_K;
  for (Region e : kEnds) {
    const auto& s = prof.nodes(e);
    const auto& v = prof.values(e);
    const int d = model.flat_dim(e);
    const double coef = model.shell_coefficient(e);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (!(s[i + 1] > s[i])) continue;
      if (v[i] > 0 && v[i + 1] > 0) {
        const double g = std::log(v[i + 1] / v[i]) / std::log(s[i + 1] / s[i]);
        acc += coef * std::pow(v[i], p) * std::pow(s[i], -g * p) * power_integral(g * p + d - 1, s[i], s[i + 1]);
      } else if (v[i] > 0 || v[i + 1] > 0) {
        const double lin = (v[i + 1] - v[i]) / (s[i + 1] - s[i]);
        acc += coef * quad::integrate(
                          [&](double u) { return std::pow(v[i] + lin * (u - s[i]), p) * std::pow(u, d - 1); },
                          s[i], s[i + 1], model.quad_options());
      }
    }
    if (s.size() >= 2 && v.back() > 0) {
      const std::size_t k = s.size() - 1;
      if (!(v[k - 1] > 0)) return kInf;
      const double g = std::log(v[k] / v[k - 1]) / std::log(s[k] / s[k - 1]);
      const double tail = power_integral(g * p + d - 1, s[k], kInf);
      if (!std::isfinite(tail)) return kInf;
      acc += coef * std::pow(v[k], p) * std::pow(s[k], -g * p) * tail;
    }
  }
  return std::pow(acc, 1.0 / p);
}

/// ‖op f‖_p / ‖f‖_p, with p = inf giving the sup ratio.
inline double lp_ratio(const Model& model, const MaximalProfile& prof, const RadialFunction& f, double p) {
  if (!(p > 1.0)) throw DomainError("lp_ratio: need p in (1, inf]");
  return profile_lp_norm(model, prof, p) / lp_norm(model, f, p);
}

struct FamilyRow {
  std::string function;
  Operator op;
  double k_weak = 0;
  double l2_ratio = 0;
  double linf_ratio = 0;
  double k_weak_scaled = 0;   // k_weak of 3f
  double k_weak_fine = 0;     // k_weak with the α grid density doubled
  double argmax_alpha = 0;
};

struct FamilyReportConfig {
  ProfileConfig profile;
  WeakConfig weak;
  bool check_scaling = true;
};

/// One row per (family member, operator), in family order then operator order.
inline std::vector<FamilyRow> family_report(const Model& model, const FamilyReportConfig& cfg = {},
                                            std::span<const Operator> ops = kAllOperators) {
  std::vector<FamilyRow> rows;
  WeakConfig fine = cfg.weak;
  fine.alpha_per_decade *= 2;
  for (const auto& nf : standard_family(model)) {
    const double l1 = lp_norm(model, nf.f, 1.0);
    for (Operator op : ops) {
      FamilyRow row{nf.name, op};
      const auto prof = operator_profile(model, nf.f, op, cfg.profile);
      const auto w = weak11_constant(model, prof, l1, cfg.weak);
      row.k_weak = w.k_weak;
      row.argmax_alpha = w.argmax_alpha;
      row.k_weak_fine = weak11_constant(model, prof, l1, fine).k_weak;
      row.l2_ratio = lp_ratio(model, prof, nf.f, 2.0);
      row.linf_ratio = lp_ratio(model, prof, nf.f, kInf);
      if (cfg.check_scaling) {
        const auto f3 = nf.f.scaled(3.0);
        const auto prof3 = operator_profile(model, f3, op, cfg.profile);
        row.k_weak_scaled = weak11_constant(model, prof3, lp_norm(model, f3, 1.0), cfg.weak).k_weak;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace ends_lab
