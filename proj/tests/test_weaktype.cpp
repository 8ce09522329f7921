#include <gtest/gtest.h>

#include <cmath>

#include "ends_lab/weaktype.hpp"

using namespace ends_lab;

namespace {

Model default_model() { return Model(ModelParams{}); }

// value 2 on the large-end shell [1, 2), zero elsewhere
MaximalProfile step_profile() {
  MaximalProfile p;
  p.nodes(Region::EndM) = {1, 2, 2, 1000};
  p.values(Region::EndM) = {2, 2, 0, 0};
  p.nodes(Region::EndN) = {1, 1000};
  p.values(Region::EndN) = {0, 0};
  return p;
}

MaximalProfile power_profile(Region e, double beta, double s_max) {
  MaximalProfile p;
  for (double s : log_grid(1, s_max, 8)) {
    p.nodes(e).push_back(s);
    p.values(e).push_back(std::pow(s, beta));
  }
  const Region other = e == Region::EndM ? Region::EndN : Region::EndM;
  p.nodes(other) = {1, s_max};
  p.values(other) = {0, 0};
  return p;
}

ProfileConfig small_grid() {
  ProfileConfig c;
  c.grid.s_max = 40;
  c.grid.per_decade = 4;
  c.search.r_max_factor = 100;
  c.search.grid_per_decade = 12;
  c.search.center_grid_per_decade = 12;
  c.search.refine_iters = 30;
  c.heat.per_decade = 6;
  return c;
}

}  // namespace

TEST(Operators, Names) {
  for (Operator op : kAllOperators) EXPECT_EQ(parse_operator(operator_name(op)), op);
  EXPECT_EQ(operator_name(Operator::Heat), "M_heat");
  EXPECT_THROW(parse_operator("M_other"), DomainError);
}

TEST(Distribution, StepProfile) {
  const Model model = default_model();
  const auto p = step_profile();
  p.validate();
  EXPECT_NEAR(distribution_function(model, p, 1.0), 163.18, 0.01);
  EXPECT_EQ(distribution_function(model, p, 3.0), 0.0);
  EXPECT_EQ(distribution_function(model, p, 2.0), 0.0);
  EXPECT_THROW(distribution_function(model, p, 0.0), DomainError);
}

TEST(Distribution, CoreAtom) {
  const Model model = default_model();
  auto p = step_profile();
  p.core_value = 5;
  EXPECT_NEAR(distribution_function(model, p, 3.0), model.params().mu_K, 1e-15);
}

TEST(Distribution, PowerProfileCrossingIsExact) {
  // level set of s^-2 above α is s < α^{-1/2}, independent of grid nodes
  const Model model = default_model();
  const auto p = power_profile(Region::EndN, -2.0, 100);
  for (double alpha : {0.5, 0.1, 0.013, 0.002}) {
    const double r = 1 / std::sqrt(alpha);
    const double expect = model.shell_measure(Region::EndN, 1, r);
    EXPECT_NEAR(distribution_function(model, p, alpha), expect, 1e-12 * expect) << alpha;
  }
}

TEST(Distribution, Nonincreasing) {
  const Model model = default_model();
  auto p = power_profile(Region::EndM, -3.0, 1000);
  p.core_value = 0.7;
  double prev = kInf;
  for (double a = 1e-9; a < 2; a *= 1.7) {
    const double l = distribution_function(model, p, a);
    EXPECT_LE(l, prev);
    prev = l;
  }
}

TEST(Distribution, ProfileValidation) {
  auto p = step_profile();
  p.values(Region::EndM)[1] = -1;
  EXPECT_THROW(p.validate(), DomainError);
  p = step_profile();
  p.nodes(Region::EndM)[1] = 0.5;
  EXPECT_THROW(p.validate(), DomainError);
  p = step_profile();
  p.values(Region::EndN).push_back(0);
  EXPECT_THROW(p.validate(), DomainError);
}

TEST(WeakConstant, StepProfile) {
  const Model model = default_model();
  const auto p = step_profile();
  const double mass = model.shell_measure(Region::EndM, 1, 2);
  const auto w = weak11_constant(model, p, 2 * mass);
  EXPECT_NEAR(w.k_weak, 1.0, 1e-9);
  EXPECT_NEAR(w.argmax_alpha, 2.0, 1e-9);
  EXPECT_EQ(w.alpha_grid.size(), w.lambda.size());
  EXPECT_THROW(weak11_constant(model, p, 0.0), DomainError);
  EXPECT_THROW(weak11_constant(model, p, kInf), DomainError);
}

TEST(WeakConstant, PowerProfileClosedForm) {
  // α λ(α) = α μ(1 <= s < α^{-1/3}) in a 5-dimensional end: sup at α -> 0 of
  // σ₄ (α^{-5/3} - 1) α / 5, bounded by the band floor
  const Model model = default_model();
  const auto p = power_profile(Region::EndM, -3.0, 1000);
  const auto w = weak11_constant(model, p, 1.0);
  double best = 0;
  for (double a : w.alpha_grid) best = std::max(best, a * model.shell_measure(Region::EndM, 1, std::pow(a, -1.0 / 3)));
  EXPECT_NEAR(w.k_weak, best, 1e-12 * best);
  // the band stops at the outermost node value
  EXPECT_GE(w.alpha_grid.front(), 1e-9 * (1 - 1e-12));
}

TEST(WeakConstant, GridDoublingStable) {
  const Model model = default_model();
  auto p = power_profile(Region::EndN, -4.0, 1000);
  p.core_value = 0.9;
  WeakConfig fine;
  fine.alpha_per_decade = 32;
  const double a = weak11_constant(model, p, 3.0).k_weak, b = weak11_constant(model, p, 3.0, fine).k_weak;
  EXPECT_NEAR(b / a, 1.0, 0.02);
  EXPECT_GE(b, a * (1 - 1e-12));
}

TEST(ProfileNorm, StepAndPower) {
  const Model model = default_model();
  const double mass = model.shell_measure(Region::EndM, 1, 2);
  EXPECT_NEAR(profile_lp_norm(model, step_profile(), 2.0), std::sqrt(4 * mass), 1e-9 * mass);
  EXPECT_EQ(profile_lp_norm(model, step_profile(), kInf), 2.0);
  // s^-6 in the large end: ∫ s^-12 σ₄ s⁴ ds over [1, ∞) = σ₄ / 7
  const auto p = power_profile(Region::EndM, -6.0, 100);
  EXPECT_NEAR(profile_lp_norm(model, p, 2.0), std::sqrt(sphere_area(5) / 7), 1e-10);
  // a tail not in L^p gives infinity
  EXPECT_EQ(profile_lp_norm(model, power_profile(Region::EndM, -2.0, 100), 2.0), kInf);
  EXPECT_THROW(lp_ratio(model, p, RadialFunction::indicator(Region::Core), 1.0), DomainError);
}

TEST(OperatorProfile, ZeroFunction) {
  const Model model = default_model();
  for (Operator op : kAllOperators) {
    const auto p = operator_profile(model, RadialFunction::zero(), op, small_grid());
    EXPECT_EQ(p.max_value(), 0.0);
    p.validate();
  }
}

TEST(OperatorProfile, IndicatorBoundedByOne) {
  const Model model = default_model();
  const auto f = RadialFunction::shell(Region::EndN, 2, 4);
  for (Operator op : {Operator::Centered, Operator::Uncentered}) {
    const auto p = operator_profile(model, f, op, small_grid());
    p.validate();
    EXPECT_LE(lp_ratio(model, p, f, kInf), 1 + 1e-6);
    EXPECT_GT(p.max_value(), 0.5);
  }
}

TEST(OperatorProfile, UncenteredDominatesCentered) {
  const Model model = default_model();
  const auto f = standard_family(model).back().f;
  const auto pc = operator_profile(model, f, Operator::Centered, small_grid());
  const auto pu = operator_profile(model, f, Operator::Uncentered, small_grid());
  for (Region e : kEnds) {
    for (std::size_t i = 0; i < pc.values(e).size(); ++i) EXPECT_GE(pu.values(e)[i], pc.values(e)[i]);
  }
  EXPECT_GE(pu.core_value, pc.core_value);
}

TEST(FamilyReport, SmallGridAllOperators) {
  const Model model = default_model();
  FamilyReportConfig cfg;
  cfg.profile = small_grid();
  // the L2 tail extrapolation needs nodes past the shells' near field
  cfg.profile.grid.s_max = 200;
  const std::array<Operator, 2> ops{Operator::Centered, Operator::Heat};
  const auto rows = family_report(model, cfg, ops);
  EXPECT_EQ(rows.size(), 2 * standard_family(model).size());
  for (const auto& r : rows) {
    EXPECT_TRUE(std::isfinite(r.k_weak) && r.k_weak > 0) << r.function << " " << operator_name(r.op);
    EXPECT_NEAR(r.k_weak_scaled, r.k_weak, 1e-12 * r.k_weak) << r.function;
    EXPECT_NEAR(r.k_weak_fine / r.k_weak, 1.0, 0.02) << r.function;
    EXPECT_TRUE(std::isfinite(r.l2_ratio)) << r.function;
    EXPECT_TRUE(std::isfinite(r.linf_ratio)) << r.function;
  }
}
