#include <gtest/gtest.h>

#include <cmath>

#include "ends_lab/oracle.hpp"

using namespace ends_lab;

namespace {

Model default_model() { return Model(ModelParams{}); }

McConfig quick(std::uint64_t seed) {
  McConfig c;
  c.samples = 20000;
  c.seed = seed;
  return c;
}

// quadrature with a 20% bias on every ball volume
struct BiasedEngine {
  const Model& model;
  double volume(const Ball& b) const { return 1.2 * model.ball_volume(b); }
  double average(const RadialFunction& f, const Ball& b) const { return ball_average(model, f, b); }
};

}  // namespace

TEST(Rng, DerivedStreamsReproducibleAndDistinct) {
  auto a = derived_rng(1, 2, 3), b = derived_rng(1, 2, 3), c = derived_rng(1, 2, 4), d = derived_rng(2, 2, 3);
  const auto va = a(), vb = b(), vc = c(), vd = d();
  EXPECT_EQ(va, vb);
  EXPECT_NE(va, vc);
  EXPECT_NE(va, vd);
}

TEST(Sampling, PointsLieInShell) {
  const Model model = default_model();
  auto rng = derived_rng(5, 0);
  for (Region e : kEnds) {
    for (int i = 0; i < 2000; ++i) {
      const auto p = sample_point(model, e, 2.0, 3.0, rng);
      EXPECT_EQ(p.region, e);
      EXPECT_GE(p.radius(), 2.0);
      EXPECT_LE(p.radius(), 3.0);
    }
  }
}

TEST(McVolume, AgreesWithQuadrature) {
  const Model model = default_model();
  McConfig cfg;
  cfg.seed = 11;
  std::uint64_t stream = 0;
  for (const auto& b : {Ball{RadialPoint::end_m(5), 2.0}, Ball{RadialPoint::end_n(4), 3.5},
                        Ball{RadialPoint::end_m(3), 6.0}, Ball{RadialPoint::end_n(2), 10.0},
                        Ball{RadialPoint::core(), 4.0}}) {
    const auto mc = mc_volume(model, b, cfg, ++stream);
    const double q = model.ball_volume(b);
    EXPECT_TRUE(mc_agrees(q, mc)) << region_name(b.center.region) << " " << b.center.s << " r=" << b.radius << " quad="
                                  << q << " mc=" << mc.estimate << " +- " << mc.stderr;
  }
}

TEST(McAverage, AgreesWithQuadrature) {
  const Model model = default_model();
  McConfig cfg;
  cfg.seed = 12;
  const auto fam = standard_family(model);
  std::uint64_t stream = 0;
  for (const auto& nf : fam) {
    const Ball b{RadialPoint::end_n(3), 6.0};
    const double q = ball_average(model, nf.f, b);
    const auto mc = mc_ball_average(model, nf.f, b, cfg, ++stream);
    EXPECT_TRUE(mc_agrees(q, mc) || (q == 0 && mc.estimate == 0)) << nf.name << " quad=" << q << " mc=" << mc.estimate;
  }
}

TEST(McAgrees, Tolerance) {
  EXPECT_TRUE(mc_agrees(1.0, McEstimate{1.009, 0.0, 10, false}));
  EXPECT_FALSE(mc_agrees(1.0, McEstimate{1.011, 0.001, 10, false}));
  EXPECT_TRUE(mc_agrees(1.0, McEstimate{1.05, 0.02, 10, false}));
}

TEST(CompareEngines, PassesAndAlternatesEnds) {
  const Model model = default_model();
  const auto rep = compare_engines(model, 20, quick(21));
  EXPECT_TRUE(rep.pass()) << rep.max_rel_dev;
  ASSERT_EQ(rep.rows.size(), 20u);
  for (const auto& r : rep.rows) {
    EXPECT_EQ(r.ball.center.region, r.trial % 2 == 0 ? Region::EndM : Region::EndN);
  }
  EXPECT_LE(rep.max_rel_dev, 1.0);
}

TEST(CompareEngines, BitIdenticalReruns) {
  const Model model = default_model();
  const auto a = compare_engines(model, 12, quick(3)), b = compare_engines(model, 12, quick(3));
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].function, b.rows[i].function);
    EXPECT_EQ(a.rows[i].ball.radius, b.rows[i].ball.radius);
    EXPECT_EQ(a.rows[i].mc_volume.estimate, b.rows[i].mc_volume.estimate);
    EXPECT_EQ(a.rows[i].mc_average.estimate, b.rows[i].mc_average.estimate);
    EXPECT_EQ(a.rows[i].quad_average, b.rows[i].quad_average);
  }
  const auto c = compare_engines(model, 12, quick(4));
  bool differs = false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) differs |= a.rows[i].ball.radius != c.rows[i].ball.radius;
  EXPECT_TRUE(differs);
}

TEST(CompareEngines, DetectsCorruptedEngine) {
  const Model model = default_model();
  const auto rep = compare_engines<BiasedEngine>(model, 20, quick(21), BiasedEngine{model});
  EXPECT_FALSE(rep.pass());
  EXPECT_GT(rep.failures.size(), 10u);
  EXPECT_GT(rep.max_rel_dev, 1.0);
}

TEST(CompareEngines, Preconditions) {
  const Model model = default_model();
  EXPECT_THROW(compare_engines(model, 5, quick(1)), DomainError);
  McConfig bad;
  bad.samples = 10;
  EXPECT_THROW(compare_engines(model, 20, bad), DomainError);
}
