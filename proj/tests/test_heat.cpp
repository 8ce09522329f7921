#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ends_lab/heat.hpp"
#include "ends_lab/oracle.hpp"

using namespace ends_lab;

namespace {

Model default_model() { return Model(ModelParams{}); }

std::vector<RadialPoint> mixed_points() {
  return {RadialPoint::core(),    RadialPoint::end_m(1.5), RadialPoint::end_m(4), RadialPoint::end_m(30),
          RadialPoint::end_n(1.2), RadialPoint::end_n(6),  RadialPoint::end_n(50)};
}

// Monte-Carlo estimate of ∫ h_t(x, y) f(y) dμ(y) over the segments of f
// (bounded support, no core value), using sampled embedded points and the
// exact model distance.
McEstimate mc_semigroup(const HeatKernel& hk, const RadialFunction& f, const RadialPoint& x, double t,
                        std::size_t samples, std::uint64_t seed) {
  const Model& model = hk.model();
  const EmbeddedPoint ex = embed_center(model, x);
  double est = 0, var = 0;
  std::uint64_t piece = 0;
  for (Region e : kEnds) {
    for (const auto& sg : f.segments(e)) {
      auto rng = derived_rng(seed, ++piece);
      const double w = model.shell_measure(e, sg.a, sg.b);
      double s1 = 0, s2 = 0;
      for (std::size_t k = 0; k < samples; ++k) {
        const EmbeddedPoint y = sample_point(model, e, sg.a, sg.b, rng);
        const RadialPoint yr{e, y.radius()};
        const double v = hk.eval(x, yr, model.distance(ex, y), t) * f.eval(yr);
        s1 += v;
        s2 += v * v;
      }
      const double mean = s1 / samples;
      est += w * mean;
      var += w * w * std::max(0.0, s2 / samples - mean * mean) / samples;
    }
  }
  return {est, std::sqrt(var), samples, false};
}

}  // namespace

TEST(Regime, Examples) {
  EXPECT_EQ(classify_regime(RadialPoint::core(), RadialPoint::core(), 2), KernelRegime::CoreCore);
  EXPECT_EQ(classify_regime(RadialPoint::end_m(3), RadialPoint::core(), 2), KernelRegime::MCore);
  EXPECT_EQ(classify_regime(RadialPoint::core(), RadialPoint::end_m(3), 2), KernelRegime::MCore);
  EXPECT_EQ(classify_regime(RadialPoint::end_n(3), RadialPoint::core(), 2), KernelRegime::NCore);
  EXPECT_EQ(classify_regime(RadialPoint::end_n(3), RadialPoint::end_m(7), 2), KernelRegime::MN);
  EXPECT_EQ(classify_regime(RadialPoint::end_m(3), RadialPoint::end_m(7), 2), KernelRegime::MM);
  EXPECT_EQ(classify_regime(RadialPoint::end_n(3), RadialPoint::end_n(7), 2), KernelRegime::NN);
  for (const auto& x : mixed_points()) {
    for (const auto& y : mixed_points()) EXPECT_EQ(classify_regime(x, y, 0.5), KernelRegime::SmallTime);
  }
}

TEST(Regime, TotalAndExclusive) {
  std::set<KernelRegime> seen;
  for (const auto& x : mixed_points()) {
    for (const auto& y : mixed_points()) {
      for (double t : {1e-6, 0.5, 1.0, std::nextafter(1.0, 2.0), 2.0, 1e9}) {
        const auto r = classify_regime(x, y, t);
        EXPECT_EQ(r, classify_regime(y, x, t));
        EXPECT_EQ(r == KernelRegime::SmallTime, t <= 1.0);
        const auto hits = std::count(kAllRegimes.begin(), kAllRegimes.end(), r);
        EXPECT_EQ(hits, 1);
        seen.insert(r);
      }
    }
  }
  EXPECT_EQ(seen.size(), kAllRegimes.size());
  EXPECT_THROW(classify_regime(RadialPoint::core(), RadialPoint::core(), 0.0), DomainError);
  EXPECT_THROW(classify_regime(RadialPoint::core(), RadialPoint::core(), -1.0), DomainError);
}

TEST(Kernel, CoreCoreValue) {
  const HeatKernel hk(default_model(), KernelConstants{1.0, 0.25});
  EXPECT_NEAR(hk.eval(RadialPoint::core(), RadialPoint::core(), 1.0, 4.0), std::pow(4.0, -1.5) * std::exp(-1.0 / 16),
              1e-15);
  EXPECT_NEAR(hk.eval(RadialPoint::core(), RadialPoint::core(), 1.0, 4.0), 0.11743, 5e-6);
}

TEST(Kernel, MCoreFormula) {
  const HeatKernel hk(default_model(), KernelConstants{1.0, 0.25});
  const double s = 4, t = 9, d = 3;
  const double expect = (std::pow(t, -1.5) * std::pow(s, -3.0) + std::pow(t, -2.5)) * std::exp(-0.25 * d * d / t);
  EXPECT_NEAR(hk.eval(RadialPoint::end_m(s), RadialPoint::core(), d, t), expect, 1e-15);
}

TEST(Kernel, MNFormula) {
  const HeatKernel hk(default_model(), KernelConstants{1.0, 0.25});
  const double a = 4, b = 7, t = 9, d = 12;
  const double expect =
      (std::pow(t, -1.5) * std::pow(a, -3.0) + std::pow(t, -2.5) * std::pow(b, -1.0)) * std::exp(-0.25 * d * d / t);
  EXPECT_NEAR(hk.eval(RadialPoint::end_m(a), RadialPoint::end_n(b), d, t), expect, 1e-15);
}

TEST(Kernel, SymmetricExactly) {
  const HeatKernel hk(default_model(), {});
  for (const auto& x : mixed_points()) {
    for (const auto& y : mixed_points()) {
      for (double t : {0.01, 0.7, 3.0, 500.0}) {
        for (double d : {0.1, 2.0, 40.0}) EXPECT_EQ(hk.eval(x, y, d, t), hk.eval(y, x, d, t));
      }
    }
  }
}

TEST(Kernel, DecreasingInDistance) {
  const HeatKernel hk(default_model(), {});
  for (const auto& x : mixed_points()) {
    for (const auto& y : mixed_points()) {
      for (double t : {0.05, 0.9, 2.0, 50.0}) {
        double prev = kInf;
        for (double d = 0.25; d < 30; d *= 1.5) {
          const double v = hk.eval(x, y, d, t);
          EXPECT_GE(v, 0.0);
          // strict until the Gaussian factor underflows
          if (prev > 0) {
            EXPECT_LT(v, prev) << regime_name(classify_regime(x, y, t)) << " d=" << d;
          } else {
            EXPECT_EQ(v, 0.0);
          }
          prev = v;
        }
      }
    }
  }
}

TEST(Kernel, ConstantsValidated) {
  EXPECT_THROW((KernelConstants{0.0, 0.25}.validate()), ConfigError);
  EXPECT_THROW((KernelConstants{1.0, -1.0}.validate()), ConfigError);
  EXPECT_THROW(HeatKernel(default_model(), KernelConstants{1.0, 0.0}), ConfigError);
}

TEST(Semigroup, ZeroFunction) {
  const HeatKernel hk(default_model(), {});
  for (const auto& x : mixed_points()) EXPECT_EQ(hk.semigroup(RadialFunction::zero(), x, 2.0), 0.0);
}

TEST(Semigroup, CoreIndicatorIsTheCoreColumn) {
  const Model model = default_model();
  const HeatKernel hk(model, {});
  const auto chi3 = RadialFunction::indicator(Region::Core);
  for (double s : {2.0, 10.0, 80.0}) {
    const auto x = RadialPoint::end_m(s);
    for (double t : {2.0, 40.0, 3000.0}) {
      const double d = model.distance_to_core(s);
      const double expect = hk.eval(x, RadialPoint::core(), d, t) * model.params().mu_K;
      EXPECT_NEAR(hk.semigroup(chi3, x, t), expect, 1e-14 * expect);
      // the same quantity from the displayed large-time formula
      const auto k = hk.constants();
      const double formula = k.C * (std::pow(t, -1.5) * std::pow(s, -3.0) + std::pow(t, -2.5)) *
                             std::exp(-k.c * d * d / t) * model.params().mu_K;
      EXPECT_NEAR(hk.semigroup(chi3, x, t), formula, 1e-13 * formula);
    }
  }
}

TEST(Semigroup, Linear) {
  const HeatKernel hk(default_model(), {});
  const auto f = RadialFunction::shell(Region::EndM, 2, 4);
  const auto g = RadialFunction::shell(Region::EndN, 1, 3, 2.0);
  for (const auto& x : mixed_points()) {
    for (double t : {0.3, 5.0}) {
      const double a = hk.semigroup(f, x, t), b = hk.semigroup(g, x, t), ab = hk.semigroup(f + g, x, t);
      EXPECT_NEAR(ab, a + b, 1e-7 * (a + b) + 1e-300);
    }
  }
}

TEST(Semigroup, BoundedBySupTimesMass) {
  const Model model = default_model();
  const HeatKernel hk(model, {});
  for (const auto& nf : standard_family(model)) {
    const double sup = lp_norm(model, nf.f, kInf);
    for (const auto& x : {RadialPoint::core(), RadialPoint::end_m(3), RadialPoint::end_n(5)}) {
      for (double t : {0.05, 4.0, 400.0}) {
        const double v = hk.semigroup(nf.f, x, t);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, sup * hk.kernel_mass(x, t).total() * (1 + 1e-6)) << nf.name;
      }
    }
  }
}

TEST(Semigroup, MatchesMonteCarloIntegral) {
  const Model model = default_model();
  const HeatKernel hk(model, {});
  struct Case {
    RadialFunction f;
    RadialPoint x;
    double t;
  };
  const std::vector<Case> cases{
      {RadialFunction::shell(Region::EndM, 2, 4), RadialPoint::end_m(3), 0.5},
      {RadialFunction::shell(Region::EndM, 2, 4), RadialPoint::end_m(3), 3.0},
      {RadialFunction::shell(Region::EndN, 1, 3), RadialPoint::end_n(2), 0.8},
      {RadialFunction::shell(Region::EndN, 2, 6), RadialPoint::end_n(4), 6.0},
      {RadialFunction::shell(Region::EndN, 1, 4), RadialPoint::end_m(2), 5.0},
      {RadialFunction::shell(Region::EndM, 1, 3), RadialPoint::end_n(2), 0.9},
      {RadialFunction::shell(Region::EndM, 1, 3), RadialPoint::core(), 2.0},
  };
  std::uint64_t seed = 40;
  for (const auto& c : cases) {
    const double q = hk.semigroup(c.f, c.x, c.t);
    const auto mc = mc_semigroup(hk, c.f, c.x, c.t, 200000, ++seed);
    EXPECT_TRUE(mc_agrees(q, mc)) << region_name(c.x.region) << " s=" << c.x.s << " t=" << c.t << " quad=" << q
                                  << " mc=" << mc.estimate << " +- " << mc.stderr;
  }
}

TEST(Semigroup, RejectsNonPositiveTime) {
  const HeatKernel hk(default_model(), {});
  EXPECT_THROW(hk.semigroup(RadialFunction::indicator(Region::Core), RadialPoint::core(), 0.0), DomainError);
}

TEST(KernelMass, WithinBracket) {
  const HeatKernel hk(default_model(), {});
  for (const auto& x : {RadialPoint::core(), RadialPoint::end_m(1.1), RadialPoint::end_m(20), RadialPoint::end_n(1.1),
                        RadialPoint::end_n(20)}) {
    for (double t : log_grid(1e-2, 1e6, 1)) {
      const auto m = hk.kernel_mass(x, t);
      EXPECT_GE(m.mass, 1e-2) << region_name(x.region) << " " << x.s << " t=" << t;
      EXPECT_LE(m.total(), 1e2) << region_name(x.region) << " " << x.s << " t=" << t;
      EXPECT_GE(m.tail_bound, 0.0);
      EXPECT_LE(m.tail_bound, 1e-6 * m.mass);
    }
  }
}

TEST(KernelMass, DeepSmallTimeBaseline) {
  // deep in the large end the small-time kernel is C/V(x,√t) e^{-c d²/t} with
  // Euclidean V; its mass is C (π/c)^{m/2} / ω_m t^{m/2} · t^{m/2}
  const Model model = default_model();
  const KernelConstants k{};
  const HeatKernel hk(model, k);
  const double t = 0.01;
  const double omega = std::pow(kPi, 2.5) / std::tgamma(3.5);
  const double expect = k.C * std::pow(kPi / k.c, 2.5) / omega;
  EXPECT_NEAR(hk.kernel_mass(RadialPoint::end_m(50), t).mass, expect, 1e-6 * expect);
}

TEST(KernelMass, ContinuousWithinRegime) {
  const HeatKernel hk(default_model(), {});
  const auto x = RadialPoint::end_n(3);
  for (double t = 1.5; t < 1e4; t *= 1.3) {
    const double a = hk.kernel_mass(x, t).mass, b = hk.kernel_mass(x, t * 1.001).mass;
    EXPECT_NEAR(a, b, 0.01 * a) << t;
  }
}

TEST(HeatMaximal, ZeroAndScaling) {
  const Model model = default_model();
  const HeatKernel hk(model, {});
  EXPECT_EQ(heat_maximal(hk, RadialFunction::zero(), RadialPoint::end_m(3)).value, 0.0);
  HeatSearchConfig cfg;
  cfg.per_decade = 6;
  const auto f = RadialFunction::shell(Region::EndN, 2, 4);
  for (const auto& x : {RadialPoint::end_m(5), RadialPoint::end_n(2)}) {
    const double a = heat_maximal(hk, f, x, cfg).value;
    const double b = heat_maximal(hk, f.scaled(2.0), x, cfg).value;
    EXPECT_NEAR(b, 2 * a, 1e-12 * a);
  }
}

TEST(HeatMaximal, DominatesGridValues) {
  const HeatKernel hk(default_model(), {});
  const auto f = RadialFunction::indicator(Region::Core);
  const auto x = RadialPoint::end_n(4);
  HeatSearchConfig cfg;
  const auto res = heat_maximal(hk, f, x, cfg);
  for (double t : log_grid(cfg.t_min, cfg.t_max, 4)) EXPECT_GE(res.value, hk.semigroup(f, x, t));
  EXPECT_FALSE(res.boundary);
}

TEST(HeatMaximal, CoreIndicatorDecay) {
  // max(s^{2-m-n}, s^{-m}) = s^{-5} at the defaults
  const HeatKernel hk(default_model(), {});
  const auto f = RadialFunction::indicator(Region::Core);
  std::vector<double> s, v;
  for (double x = 100; x <= 1e4; x *= 2) {
    s.push_back(x);
    v.push_back(heat_maximal(hk, f, RadialPoint::end_m(x)).value);
  }
  EXPECT_NEAR(fit_loglog_slope(s, v), -5.0, 0.15);
}

TEST(Inequalities, FiniteAndNearReferences) {
  const HeatKernel hk(default_model(), {});
  const auto reps = inequality_checks(hk, 2000, 1, false);
  ASSERT_EQ(reps.size(), 5u);
  for (const auto& r : reps) {
    EXPECT_TRUE(std::isfinite(r.empirical_sup)) << r.name;
    EXPECT_GT(r.empirical_sup, 0.0) << r.name;
    EXPECT_GE(r.stability_ratio, 1.0);
    EXPECT_EQ(r.samples, 4000u);
    if (r.reference > 0) {
      EXPECT_LE(r.empirical_sup, r.reference * (1 + 1e-12)) << r.name;
    }
  }
  const auto& gp = reps[4];
  EXPECT_EQ(gp.name, "gaussian_polynomial");
  EXPECT_NEAR(gp.empirical_sup / gp.reference, 1.0, 1e-3);
  EXPECT_THROW(inequality_checks(hk, 999, 1, false), DomainError);
}

TEST(Inequalities, Reproducible) {
  const HeatKernel hk(default_model(), {});
  const auto a = inequality_checks(hk, 1000, 9, false), b = inequality_checks(hk, 1000, 9, false);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].empirical_sup, b[i].empirical_sup);
}

TEST(Poisson, AverageOfCompactShell) {
  // for a ball far away the kernel is nearly constant over the shell
  const Model model = default_model();
  const auto f = RadialFunction::shell(Region::EndM, 1, 1.01);
  const auto x = RadialPoint::end_m(500);
  const double t = 4;
  const double d = 500;
  const double expect = std::pow(t, 2.5) / std::pow(2 + d, 10) * lp_norm(model, f, 1.0);
  EXPECT_NEAR(poisson_average(model, f, x, t), expect, 0.05 * expect);
  EXPECT_THROW(poisson_average(model, RadialFunction::indicator(Region::EndM), x, t), DomainError);
}
