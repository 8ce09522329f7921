#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ends_lab/functions.hpp"
#include "ends_lab/geometry.hpp"
#include "ends_lab/maximal.hpp"
#include "ends_lab/parallel.hpp"

namespace ends_lab {

struct McConfig {
  std::size_t samples = 200000;
  std::uint64_t seed = 1;
  std::size_t batch = 8192;

  void validate() const {
    if (samples < 1000) throw DomainError("Monte-Carlo needs at least 1000 samples");
    if (batch < 1) throw DomainError("batch must be positive");
  }
};

struct McEstimate {
  double estimate = 0.0;
  double stderr = 0.0;
  std::size_t hits = 0;
  bool degenerate = false;  // no sample landed in the ball
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for a (seed, a, b, c) tuple.
inline std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (c + 0x8cb92ba72f3d8dd7ULL));
  return std::mt19937_64(h);
}

namespace detail {

template <class Rng>
void random_unit_vector(Rng& rng, double* out, int dim) {
  std::normal_distribution<double> g;
  double n2 = 0;
  do {
    n2 = 0;
    for (int i = 0; i < dim; ++i) {
      out[i] = g(rng);
      n2 += out[i] * out[i];
    }
  } while (n2 < 1e-300);
  const double inv = 1.0 / std::sqrt(n2);
  for (int i = 0; i < dim; ++i) out[i] *= inv;
}

template <class Rng>
void random_fiber(const Model& model, Rng& rng, EmbeddedPoint& p) {
  p.fiber_dim = model.m() - model.n() + 1;
  random_unit_vector(rng, p.fiber.data(), p.fiber_dim);
}

}  // namespace detail

/// Point of `region` with |flat| in [lo, hi], distributed proportionally to the
/// model measure: radius by inverse CDF of u^{d-1}, direction from a normalized
/// Gaussian vector, small-end fiber uniform on the sphere factor.
template <class Rng>
EmbeddedPoint sample_point(const Model& model, Region region, double lo, double hi, Rng& rng) {
  if (region == Region::Core) return EmbeddedPoint{};
  if (!(lo >= 1.0) || !(hi >= lo) || !std::isfinite(hi)) throw DomainError("sample_point: need 1 <= lo <= hi < inf");
  std::uniform_real_distribution<double> U(0.0, 1.0);
  EmbeddedPoint p;
  p.region = region;
  p.flat_dim = model.flat_dim(region);
  const int d = p.flat_dim;
  const double a = std::pow(lo, d), b = std::pow(hi, d);
  const double u = std::pow(a + U(rng) * (b - a), 1.0 / d);
  detail::random_unit_vector(rng, p.flat.data(), d);
  for (int i = 0; i < d; ++i) p.flat[i] *= u;
  if (region == Region::EndN) detail::random_fiber(model, rng, p);
  return p;
}

/// The ball center as an embedded point on the reference axis.
inline EmbeddedPoint embed_center(const Model& model, const RadialPoint& c) {
  EmbeddedPoint p;
  p.region = c.region;
  if (c.region == Region::Core) return p;
  p.flat_dim = model.flat_dim(c.region);
  p.flat[0] = c.s;
  if (c.region == Region::EndN) {
    p.fiber_dim = model.m() - model.n() + 1;
    p.fiber[0] = 1.0;
  }
  return p;
}

struct McMoments {
  McEstimate volume;
  McEstimate average;
};

/// Stratified hit-or-miss estimate of μ(B) and of the ball average of |f|.
///
/// The enclosing region is split into pieces of known measure: for each end,
/// the shells reached through the core; in the center's own end, a Cartesian
/// box around the center (times the whole fiber) minus those shells; and the
/// core, represented as a uniform segment of length delta_K carrying mass mu_K.
/// Every sample is classified with the embedded-point distance.
inline McMoments mc_moments(const Model& model, const RadialFunction& f, const Ball& ball, const McConfig& cfg,
                            std::uint64_t stream = 0) {
  cfg.validate();
  if (!(ball.radius > 0)) throw DomainError("ball radius must be positive");
  const RadialPoint& c = ball.center;
  const double r = ball.radius;
  const double delta = model.params().delta_K;
  const EmbeddedPoint center = embed_center(model, c);

  struct Piece {
    enum Kind { Shell, Box, Core } kind;
    Region end;
    double lo, hi;  // shell range, or box half-width in `hi`
    double measure;
  };
  std::vector<Piece> pieces;
  for (Region e : kEnds) {
    const double reach = model.core_reach(c, r);
    if (reach > 1.0) pieces.push_back({Piece::Shell, e, 1.0, reach, model.shell_measure(e, 1.0, reach)});
    if (c.region == e && c.s + r > std::max(1.0, reach)) {
      const int d = model.flat_dim(e);
      double meas = std::pow(2.0 * r, d);
      if (e == Region::EndN) meas *= model.fiber_area();
      pieces.push_back({Piece::Box, e, std::max(1.0, reach), r, meas});
    }
  }
  pieces.push_back({Piece::Core, Region::Core, 0.0, delta, model.params().mu_K});

  double total_measure = 0;
  for (const auto& p : pieces) total_measure += p.measure;

  const double fabs_core = std::abs(f.core_value());
  McMoments out;
  struct Acc {
    double n = 0, a = 0, b = 0, aa = 0, bb = 0, ab = 0;
  };
  std::vector<Acc> acc(pieces.size());

  for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
    const Piece& piece = pieces[pi];
    const double share = 0.8 * piece.measure / total_measure + 0.2 / pieces.size();
    const std::size_t n = std::max<std::size_t>(1000, static_cast<std::size_t>(share * cfg.samples));
    const std::size_t nb = (n + cfg.batch - 1) / cfg.batch;
    std::vector<Acc> parts(nb);
    parallel_for(nb, [&](std::size_t bi) {
      auto rng = derived_rng(cfg.seed, stream, pi, bi);
      std::uniform_real_distribution<double> U(0.0, 1.0);
      const std::size_t count = std::min(cfg.batch, n - bi * cfg.batch);
      Acc& A = parts[bi];
      for (std::size_t k = 0; k < count; ++k) {
        bool hit = false;
        double val = 0.0;
        if (piece.kind == Piece::Core) {
          const double tau = U(rng) * delta;
          double d = 0.0;
          if (c.region == Region::EndM) d = (c.s - 1.0) + tau;
          if (c.region == Region::EndN) d = (c.s - 1.0) + (delta - tau);
          hit = d < r;
          val = fabs_core;
        } else {
          EmbeddedPoint y;
          if (piece.kind == Piece::Shell) {
            y = sample_point(model, piece.end, piece.lo, piece.hi, rng);
          } else {
            y.region = piece.end;
            y.flat_dim = model.flat_dim(piece.end);
            y.flat[0] = c.s + (2.0 * U(rng) - 1.0) * r;
            for (int i = 1; i < y.flat_dim; ++i) y.flat[i] = (2.0 * U(rng) - 1.0) * r;
            if (piece.end == Region::EndN) detail::random_fiber(model, rng, y);
          }
          const double u = y.radius();
          const bool inside_piece = piece.kind == Piece::Shell || u >= piece.lo;
          hit = inside_piece && model.distance(center, y) < r;
          val = hit ? std::abs(f.eval(piece.end, u)) : 0.0;
        }
        const double a = hit ? 1.0 : 0.0, b = hit ? val : 0.0;
        A.n += 1;
        A.a += a;
        A.b += b;
        A.aa += a * a;
        A.bb += b * b;
        A.ab += a * b;
      }
    });
    for (const auto& p : parts) {
      acc[pi].n += p.n;
      acc[pi].a += p.a;
      acc[pi].b += p.b;
      acc[pi].aa += p.aa;
      acc[pi].bb += p.bb;
      acc[pi].ab += p.ab;
    }
  }

  double V = 0, I = 0, var_v = 0;
  std::size_t hits = 0;
  for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
    const Acc& A = acc[pi];
    const double w = pieces[pi].measure;
    const double ma = A.a / A.n, mb = A.b / A.n;
    V += w * ma;
    I += w * mb;
    var_v += w * w * std::max(0.0, A.aa / A.n - ma * ma) / A.n;
    hits += static_cast<std::size_t>(A.a);
  }
  out.volume = {V, std::sqrt(var_v), hits, hits == 0};
  if (hits == 0) {
    out.average = {0.0, 0.0, 0, true};
    return out;
  }
  const double R = I / V;
  double var_r = 0;
  for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
    const Acc& A = acc[pi];
    const double w = pieces[pi].measure;
    // variance of b - R a within the piece
    const double m1 = (A.b - R * A.a) / A.n;
    const double m2 = (A.bb - 2 * R * A.ab + R * R * A.aa) / A.n;
    var_r += w * w * std::max(0.0, m2 - m1 * m1) / A.n;
  }
  out.average = {R, std::sqrt(var_r) / V, hits, false};
  return out;
}

inline McEstimate mc_volume(const Model& model, const Ball& ball, const McConfig& cfg, std::uint64_t stream = 0) {
  return mc_moments(model, RadialFunction::zero(), ball, cfg, stream).volume;
}

inline McEstimate mc_ball_average(const Model& model, const RadialFunction& f, const Ball& ball, const McConfig& cfg,
                                  std::uint64_t stream = 0) {
  return mc_moments(model, f, ball, cfg, stream).average;
}

/// Monte-Carlo ∫|f| over the segments of f truncated at u_cap, plus the core.
/// Each segment is stratified into dyadic shells in u with equal sample counts,
/// so steep power laws are resolved near their lower end.
inline McEstimate mc_integral(const Model& model, const RadialFunction& f, const McConfig& cfg, double u_cap,
                              std::uint64_t stream = 0) {
  cfg.validate();
  double est = std::abs(f.core_value()) * model.params().mu_K, var = 0;
  std::size_t piece = 0;
  for (Region e : kEnds) {
    for (const auto& sg : f.segments(e)) {
      const double hi = std::min(sg.b, u_cap);
      ++piece;
      if (!(hi > sg.a)) continue;
      const int strata = std::max(1, static_cast<int>(std::ceil(std::log2(hi / sg.a) - 1e-12)));
      const std::size_t per = std::max<std::size_t>(1, cfg.samples / strata);
      for (int k = 0; k < strata; ++k) {
        const double lo_k = sg.a * std::exp2(k), hi_k = std::min(hi, sg.a * std::exp2(k + 1));
        const double w = model.shell_measure(e, lo_k, hi_k);
        auto rng = derived_rng(cfg.seed, stream, piece, static_cast<std::uint64_t>(k));
        double s1 = 0, s2 = 0;
        for (std::size_t i = 0; i < per; ++i) {
          const double v = std::abs(f.eval(e, sample_point(model, e, lo_k, hi_k, rng).radius()));
          s1 += v;
          s2 += v * v;
        }
        const double mean = s1 / per;
        est += w * mean;
        var += w * w * std::max(0.0, s2 / per - mean * mean) / per;
      }
    }
  }
  return {est, std::sqrt(var), cfg.samples, false};
}

/// |q - mc| <= max(3 stderr, 1% of |q|).
inline bool mc_agrees(double quad, const McEstimate& mc) {
  return std::abs(quad - mc.estimate) <= std::max(3.0 * mc.stderr, 0.01 * std::abs(quad));
}

// ---------------------------------------------------------------------------
// Engine comparison
// ---------------------------------------------------------------------------

struct EngineRow {
  std::size_t trial = 0;
  std::string function;
  Ball ball;
  double quad_volume = 0, quad_average = 0;
  McEstimate mc_volume, mc_average;
  double volume_dev = 0, average_dev = 0;  // |quad - mc| / max(3 stderr, 1% |quad|)
  bool pass = false;
};

struct EngineReport {
  std::size_t trials = 0;
  double max_rel_dev = 0;  // largest normalized deviation (<= 1 passes)
  std::vector<EngineRow> rows;
  std::vector<std::size_t> failures;
  bool pass() const { return failures.empty(); }
};

/// The quadrature engine checked against the oracle.
struct QuadratureEngine {
  const Model& model;
  double volume(const Ball& b) const { return model.ball_volume(b); }
  double average(const RadialFunction& f, const Ball& b) const { return ball_average(model, f, b); }
};

namespace detail {

inline double normalized_dev(double quad, const McEstimate& mc) {
  const double tol = std::max(3.0 * mc.stderr, 0.01 * std::abs(quad));
  const double diff = std::abs(quad - mc.estimate);
  if (tol == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / tol;
}

}  // namespace detail

/// Random (f, ball) pairs, alternating large-end and small-end centers. Pairs
/// whose expected number of Monte-Carlo hits inside supp f is below 100 (but
/// nonzero) are redrawn, since hit-or-miss cannot resolve them.
template <class Engine = QuadratureEngine>
EngineReport compare_engines(const Model& model, std::size_t trials, const McConfig& cfg,
                             std::optional<Engine> engine = std::nullopt) {
  if (trials < 10) throw DomainError("compare_engines: need at least 10 trials");
  cfg.validate();
  const Engine eng = engine ? *engine : Engine{model};
  auto family = standard_family(model);
  family.push_back({"one", RadialFunction::constant(1.0)});
  family.push_back({"chi2", RadialFunction::indicator(Region::EndN)});
  family.push_back({"chi1", RadialFunction::indicator(Region::EndM)});

  EngineReport rep;
  rep.trials = trials;
  rep.rows.resize(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    auto rng = derived_rng(cfg.seed, 0xC0FFEEULL, t);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const Region end = t % 2 == 0 ? Region::EndM : Region::EndN;
    EngineRow& row = rep.rows[t];
    row.trial = t;
    for (int attempt = 0;; ++attempt) {
      const auto& nf = family[static_cast<std::size_t>(U(rng) * family.size()) % family.size()];
      const double s = std::exp(U(rng) * std::log(40.0));
      const double r = 0.05 * std::exp(U(rng) * std::log(2000.0));
      const Ball b{RadialPoint::in(end, s), r};
      // expected hits in supp f, estimated from the quadrature side
      const double vol = eng.volume(b);
      RadialFunction ind;
      for (Region e : kEnds) {
        for (const auto& sg : nf.f.segments(e)) {
          if (sg.c != 0.0) ind.add_segment(e, {sg.a, sg.b, 1.0, 0.0});
        }
      }
      if (nf.f.core_value() != 0.0) ind.set_core(1.0);
      const double frac = eng.average(ind, b);
      // assumes at least a tenth of the samples land in the ball
      const double expected = frac * static_cast<double>(cfg.samples) * 0.1;
      if ((frac == 0.0 || expected >= 100.0) || attempt >= 1000) {
        row.function = nf.name;
        row.ball = b;
        row.quad_volume = vol;
        row.quad_average = eng.average(nf.f, b);
        break;
      }
    }
  }
  parallel_for(trials, [&](std::size_t t) {
    EngineRow& row = rep.rows[t];
    const auto& nf = *std::find_if(family.begin(), family.end(), [&](const NamedFunction& x) {
      return x.name == row.function;
    });
    const auto mc = mc_moments(model, nf.f, row.ball, cfg, t + 1);
    row.mc_volume = mc.volume;
    row.mc_average = mc.average;
    row.volume_dev = detail::normalized_dev(row.quad_volume, mc.volume);
    row.average_dev = detail::normalized_dev(row.quad_average, mc.average);
    row.pass = row.volume_dev <= 1.0 && row.average_dev <= 1.0;
  });
  for (const auto& row : rep.rows) {
    rep.max_rel_dev = std::max({rep.max_rel_dev, row.volume_dev, row.average_dev});
    if (!row.pass) rep.failures.push_back(row.trial);
  }
  return rep;
}

}  // namespace ends_lab
