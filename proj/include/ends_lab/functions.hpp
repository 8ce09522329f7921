#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "ends_lab/geometry.hpp"
#include "ends_lab/params.hpp"

namespace ends_lab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// c * u^beta on [a, b); b may be infinite.
struct Segment {
  double a = 1.0;
  double b = 2.0;
  double c = 1.0;
  double beta = 0.0;

  double operator()(double u) const { return beta == 0.0 ? c : c * std::pow(u, beta); }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Piecewise power-law radial function: sorted disjoint segments in each end
/// plus a value on the core atom. Zero off the segments.
class RadialFunction {
 public:
  RadialFunction() = default;

  static RadialFunction zero() { return {}; }
  static RadialFunction constant(double c) {
    RadialFunction f;
    for (Region e : kEnds) f.add_segment(e, {1.0, kInf, c, 0.0});
    f.core_ = c;
    return f;
  }
  static RadialFunction indicator(Region r) {
    RadialFunction f;
    if (r == Region::Core) {
      f.core_ = 1.0;
    } else {
      f.add_segment(r, {1.0, kInf, 1.0, 0.0});
    }
    return f;
  }
  static RadialFunction shell(Region e, double a, double b, double c = 1.0) {
    RadialFunction f;
    f.add_segment(e, {a, b, c, 0.0});
    return f;
  }

  RadialFunction& add_segment(Region e, Segment seg) {
    if (e == Region::Core) throw DomainError("segments live in an end; use set_core");
    if (!(seg.a >= 1.0) || !(seg.b > seg.a) || !std::isfinite(seg.a) || !std::isfinite(seg.c) ||
        !std::isfinite(seg.beta)) {
      throw DomainError("segment needs 1 <= a < b and finite c, beta");
    }
    auto& v = segs_[idx(e)];
    const auto pos = std::lower_bound(v.begin(), v.end(), seg, [](const Segment& x, const Segment& y) {
      return x.a < y.a;
    });
    if ((pos != v.end() && pos->a < seg.b) || (pos != v.begin() && std::prev(pos)->b > seg.a)) {
      throw DomainError("segments must not overlap");
    }
    v.insert(pos, seg);
    return *this;
  }

  RadialFunction& set_core(double v) {
    if (!std::isfinite(v)) throw DomainError("core value must be finite");
    core_ = v;
    return *this;
  }

  const std::vector<Segment>& segments(Region e) const { return segs_[idx(e)]; }
  double core_value() const { return core_; }

  double eval(Region e, double u) const {
    if (e == Region::Core) return core_;
    for (const auto& sg : segs_[idx(e)]) {
      if (u < sg.a) break;
      if (u < sg.b) return sg(u);
    }
    return 0.0;
  }
  double eval(const RadialPoint& p) const { return eval(p.region, p.s); }
  double operator()(const RadialPoint& p) const { return eval(p); }

  /// Segment endpoints in an end (discontinuities of f).
  std::vector<double> breaks(Region e) const {
    std::vector<double> out;
    for (const auto& sg : segs_[idx(e)]) {
      out.push_back(sg.a);
      if (std::isfinite(sg.b)) out.push_back(sg.b);
    }
    return out;
  }

  bool is_zero() const {
    if (core_ != 0.0) return false;
    for (const auto& v : segs_) {
      for (const auto& sg : v) {
        if (sg.c != 0.0) return false;
      }
    }
    return true;
  }

  bool bounded_support() const {
    for (const auto& v : segs_) {
      if (!v.empty() && !std::isfinite(v.back().b)) return false;
    }
    return true;
  }

  RadialFunction scaled(double k) const {
    RadialFunction f = *this;
    for (auto& v : f.segs_) {
      for (auto& sg : v) sg.c *= k;
    }
    f.core_ *= k;
    return f;
  }

  /// Largest |coefficient| over segments and the core (0 for f = 0).
  double coefficient_scale() const {
    double k = std::abs(core_);
    for (const auto& v : segs_) {
      for (const auto& sg : v) k = std::max(k, std::abs(sg.c));
    }
    return k;
  }

  /// f / coefficient_scale(), by division so that f and 3f map to the same
  /// coefficients whenever the ratios are exact.
  RadialFunction normalized() const {
    const double k = coefficient_scale();
    if (k == 0.0) return *this;
    RadialFunction f = *this;
    for (auto& v : f.segs_) {
      for (auto& sg : v) sg.c /= k;
    }
    f.core_ /= k;
    return f;
  }

  /// f restricted to one region (the product of f with that region's indicator).
  RadialFunction restricted(Region r) const {
    RadialFunction f;
    if (r == Region::Core) {
      f.core_ = core_;
    } else {
      f.segs_[idx(r)] = segs_[idx(r)];
    }
    return f;
  }

  /// Sum of two functions whose segments are disjoint, or coincide with equal
  /// exponents.
  friend RadialFunction operator+(const RadialFunction& f, const RadialFunction& g) {
    RadialFunction h = f;
    h.core_ += g.core_;
    for (Region e : kEnds) {
      for (const auto& sg : g.segs_[idx(e)]) {
        auto& v = h.segs_[idx(e)];
        auto same = std::find_if(v.begin(), v.end(), [&](const Segment& x) {
          return x.a == sg.a && x.b == sg.b && x.beta == sg.beta;
        });
        if (same != v.end()) {
          same->c += sg.c;
        } else {
          h.add_segment(e, sg);
        }
      }
    }
    return h;
  }

  friend bool operator==(const RadialFunction&, const RadialFunction&) = default;

 private:
  static std::size_t idx(Region e) { return e == Region::EndM ? 0 : 1; }

  std::array<std::vector<Segment>, 2> segs_{};
  double core_ = 0.0;
};

/// ∫_a^b u^q du, b possibly infinite (returns +inf when divergent).
inline double power_integral(double q, double a, double b) {
  if (q == -1.0) return std::isfinite(b) ? std::log(b / a) : kInf;
  const double e = q + 1.0;
  if (!std::isfinite(b)) return e < 0.0 ? -std::pow(a, e) / e : kInf;
  return (std::pow(b, e) - std::pow(a, e)) / e;
}

/// ‖f‖_p against the model measure, by closed-form integration of each
/// segment against the shell density. p = inf gives the essential sup.
inline double lp_norm(const Model& model, const RadialFunction& f, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: need p >= 1");
  if (std::isinf(p)) {
    double sup = std::abs(f.core_value());
    for (Region e : kEnds) {
      for (const auto& sg : f.segments(e)) {
        if (sg.c == 0.0) continue;
        if (sg.beta > 0 && !std::isfinite(sg.b)) throw DivergenceError("unbounded power tail");
        const double hi = sg.beta > 0 ? std::pow(sg.b, sg.beta) : std::pow(sg.a, sg.beta);
        sup = std::max(sup, std::abs(sg.c) * hi);
      }
    }
    return sup;
  }
  double acc = std::pow(std::abs(f.core_value()), p) * model.params().mu_K;
  for (Region e : kEnds) {
    const int d = model.flat_dim(e);
    for (const auto& sg : f.segments(e)) {
      if (sg.c == 0.0) continue;
      const double v = power_integral(p * sg.beta + d - 1, sg.a, sg.b);
      if (!std::isfinite(v)) throw DivergenceError("lp_norm: divergent tail integral");
      acc += model.shell_coefficient(e) * std::pow(std::abs(sg.c), p) * v;
    }
  }
  return std::pow(acc, 1.0 / p);
}

/// μ(supp f); infinite for unbounded support.
inline double support_measure(const Model& model, const RadialFunction& f) {
  double mu = f.core_value() != 0.0 ? model.params().mu_K : 0.0;
  for (Region e : kEnds) {
    for (const auto& sg : f.segments(e)) {
      if (sg.c == 0.0) continue;
      if (!std::isfinite(sg.b)) return kInf;
      mu += model.shell_measure(e, sg.a, sg.b);
    }
  }
  return mu;
}

struct NamedFunction {
  std::string name;
  RadialFunction f;
};

/// Test family with finite L¹ norm: the core indicator, dyadic shell indicators
/// [2^k, 2^{k+1}) for k = 1..3 in each end, a power tail in each end decaying
/// faster than the end's volume growth, and a mixed function touching all
/// three regions.
inline std::vector<NamedFunction> standard_family(const Model& model) {
  std::vector<NamedFunction> fam;
  fam.push_back({"chi3", RadialFunction::indicator(Region::Core)});
  for (Region e : kEnds) {
    for (int k = 1; k <= 3; ++k) {
      const double a = std::ldexp(1.0, k), b = 2 * a;
      char name[64];
      std::snprintf(name, sizeof name, "%s_shell_%g_%g", std::string(region_name(e)).c_str(), a, b);
      fam.push_back({name, RadialFunction::shell(e, a, b)});
    }
  }
  const int m = model.m(), n = model.n();
  RadialFunction tail_m, tail_n;
  tail_m.add_segment(Region::EndM, {1.0, kInf, 1.0, -(m + 1.0)});
  tail_n.add_segment(Region::EndN, {1.0, kInf, 1.0, -(n + 1.0)});
  fam.push_back({"endM_tail_s^-" + std::to_string(m + 1), tail_m});
  fam.push_back({"endN_tail_s^-" + std::to_string(n + 1), tail_n});
  RadialFunction mixed = RadialFunction::shell(Region::EndM, 1.0, 2.0, 2.0);
  mixed.add_segment(Region::EndN, {3.0, 5.0, 0.5, 0.0});
  mixed.set_core(1.0);
  fam.push_back({"mixed", mixed});
  return fam;
}

// ---------------------------------------------------------------------------
// Text literals
// ---------------------------------------------------------------------------
//
//   literal := name | item (';' item)*
//   name    := zero | one | chi1 | chi2 | chi3
//   item    := REGION ':' '[' a ',' b ')' ':' form  |  'core' ':' value
//   form    := c | c '*s^' beta | 's^' beta
//
// REGION is endM or endN (aliases M, N); b may be `inf`.
// Example: "endN:[1,2):1; endM:[1,inf):s^-6; core:0.5".

namespace detail {

inline double parse_number(std::string_view s) {
  const std::string t = trim(s);
  if (t == "inf" || t == "+inf") return kInf;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (t.empty() || used != t.size()) throw DomainError("bad number '" + t + "' in function literal");
  return v;
}

}  // namespace detail

inline RadialFunction parse_function(std::string_view text) {
  const std::string whole = trim(text);
  if (whole == "zero") return RadialFunction::zero();
  if (whole == "one") return RadialFunction::constant(1.0);
  if (whole == "chi1") return RadialFunction::indicator(Region::EndM);
  if (whole == "chi2") return RadialFunction::indicator(Region::EndN);
  if (whole == "chi3") return RadialFunction::indicator(Region::Core);
  if (whole.empty()) throw DomainError("empty function literal");

  RadialFunction f;
  std::string_view rest = whole;
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    const std::string item = trim(rest.substr(0, semi));
    rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw DomainError("expected REGION:... in '" + item + "'");
    const Region region = parse_region(trim(std::string_view(item).substr(0, colon)));
    const std::string body = trim(std::string_view(item).substr(colon + 1));
    if (region == Region::Core) {
      f.set_core(detail::parse_number(body));
      continue;
    }
    const auto close = body.find(')');
    if (body.empty() || body[0] != '[' || close == std::string::npos) {
      throw DomainError("expected [a,b) interval in '" + item + "'");
    }
    const std::string range = body.substr(1, close - 1);
    const auto comma = range.find(',');
    if (comma == std::string::npos) throw DomainError("expected a,b in '" + item + "'");
    Segment sg;
    sg.a = detail::parse_number(std::string_view(range).substr(0, comma));
    sg.b = detail::parse_number(std::string_view(range).substr(comma + 1));
    std::string form = trim(std::string_view(body).substr(close + 1));
    if (form.empty() || form[0] != ':') throw DomainError("expected :FORM in '" + item + "'");
    form = trim(std::string_view(form).substr(1));
    const auto pw = form.find("s^");
    if (pw == std::string::npos) {
      sg.c = detail::parse_number(form);
    } else {
      sg.beta = detail::parse_number(std::string_view(form).substr(pw + 2));
      std::string coef = trim(std::string_view(form).substr(0, pw));
      if (!coef.empty()) {
        if (coef.back() != '*') throw DomainError("expected c*s^beta in '" + item + "'");
        coef.pop_back();
        sg.c = detail::parse_number(coef);
      }
    }
    f.add_segment(region, sg);
  }
  return f;
}

inline std::string format_function(const RadialFunction& f) {
  std::string out;
  char buf[128];
  for (Region e : kEnds) {
    for (const auto& sg : f.segments(e)) {
      char upper[32] = "inf";
      if (std::isfinite(sg.b)) std::snprintf(upper, sizeof upper, "%.17g", sg.b);
      std::snprintf(buf, sizeof buf, "%s:[%.17g,%s):", std::string(region_name(e)).c_str(), sg.a, upper);
      out += buf;
      if (sg.beta == 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", sg.c);
      } else {
        std::snprintf(buf, sizeof buf, "%.17g*s^%.17g", sg.c, sg.beta);
      }
      out += buf;
      out += "; ";
    }
  }
  std::snprintf(buf, sizeof buf, "core:%.17g", f.core_value());
  return out + buf;
}

}  // namespace ends_lab
