#include <gtest/gtest.h>

#include <cmath>

#include "confvisc/conformal.hpp"
#include "confvisc/fields.hpp"
#include "confvisc/grid.hpp"
#include "confvisc/rng.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace confvisc;

namespace {

double binom(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

/// u = 1 with Hessian chosen so A = -t I.
Jet2 jet_with_conformal_diagonal(int n, double t) {
  return Jet2(1.0, Vec::Zero(n), SymMatrix::diagonal(Vec::Constant(n, 0.5 * t * (n - 2))));
}

}  // namespace

TEST(ConformalHessian, ConstantGivesZero) {
  const auto cj = conformal_hessian(Jet2::constant(5, 3.0), 5);
  EXPECT_EQ(cj.A.frobenius(), 0.0);
  EXPECT_EQ(cj.lambda.eigenvalues.norm(), 0.0);
}

TEST(ConformalHessian, BubbleIsConstantMultipleOfIdentity) {
  Rng rng(51);
  for (int n = 3; n <= 7; ++n)
    for (int t = 0; t < 10; ++t) {
      const BubbleParams p{rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0), rng.uniform_box(n, -1.0, 1.0)};
      const auto v = AnalyticField::bubble(n, p);
      const Vec x = rng.uniform_box(n, -3.0, 3.0);
      const auto cj = conformal_hessian(v.jet_u(x), n);
      const double expect = 2.0 * p.b * p.b / (p.a * p.a);
      EXPECT_LT((cj.A.dense() - expect * Mat::Identity(n, n)).norm(), 1e-11 * expect);
      for (int i = 0; i < n; ++i) EXPECT_NEAR(cj.lambda.eigenvalues[i], expect, 1e-11 * expect);
    }
}

TEST(ConformalHessian, FundamentalSolutionIsFlat) {
  const auto k = AnalyticField::kelvin_of(AnalyticField::constant(4, 1.0), Vec::Zero(4), 1.0);
  Rng rng(52);
  for (int t = 0; t < 10; ++t) {
    const Vec x = rng.uniform_box(4, 0.2, 2.0);
    EXPECT_LT(conformal_hessian(k.jet_u(x), 4).A.frobenius(), 1e-12);
  }
}

TEST(ConformalHessian, UFormAgreesWithPsiForm) {
  Rng rng(53);
  for (int n = 3; n <= 6; ++n) {
    const auto w = AnalyticField::kelvin_of(
        AnalyticField::bubble(n, {1.2, 0.7, rng.uniform_box(n, -1.0, 1.0)}), Vec::Constant(n, 2.0), 0.8);
    for (int t = 0; t < 10; ++t) {
      const Vec x = rng.uniform_box(n, -1.0, 1.0);
      const auto a = conformal_hessian(w.jet_u(x), n);
      const auto b = conformal_hessian_psi(w.jet_psi(x), n);
      EXPECT_LT((a.A.dense() - b.A.dense()).norm(), 1e-10 * std::max(1.0, a.A.frobenius()));
    }
  }
}

TEST(ConformalHessian, RejectsNonPositiveU) {
  EXPECT_THROW(conformal_hessian(Jet2::constant(3, 0.0), 3), Error);
  EXPECT_THROW(conformal_hessian(Jet2::constant(3, -1.0), 3), Error);
}

TEST(ConformalHessian, ScalingLaw) {
  Rng rng(54);
  for (int n = 3; n <= 6; ++n) {
    const auto spec = OperatorSpec::sigma_k_root(n, 2);
    const auto v = AnalyticField::bubble(n, tuned_bubble(spec, 1.1, rng.uniform_box(n, -1.0, 1.0)));
    for (double c : {0.5, 0.9, 1.7}) {
      const auto cv = AnalyticField::scaled(c, v);
      const double factor = std::pow(c, -4.0 / (n - 2));
      for (int t = 0; t < 5; ++t) {
        const Vec x = rng.uniform_box(n, -2.0, 2.0);
        const auto base = evaluate_operator(v, x, spec);
        const auto scaled = evaluate_operator(cv, x, spec);
        EXPECT_LT((scaled.jet.A.dense() - factor * base.jet.A.dense()).norm(), 1e-10 * factor);
        EXPECT_NEAR(*scaled.value, factor * *base.value, 1e-10 * factor);
      }
    }
  }
}

TEST(ConformalHessian, TracePositiveForBubbles) {
  Rng rng(55);
  for (int t = 0; t < 50; ++t) {
    const auto v = AnalyticField::bubble(3, {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform_box(3, -1, 1)});
    EXPECT_GE(conformal_hessian(v.jet_u(rng.uniform_box(3, -5.0, 5.0)), 3).A.trace(), 0.0);
  }
}

TEST(Operator, TunedBubbleValues) {
  // sigma_1, n = 3, b^2/a^2 = 1/6 gives exactly one.
  const auto s1 = OperatorSpec::sigma_k_root(3, 1);
  const double a = 1.0, b = std::sqrt(1.0 / 6.0);
  EXPECT_NEAR(*evaluate_operator(AnalyticField::bubble(3, {a, b, Vec::Zero(3)}), Vec::Ones(3), s1).value, 1.0, 1e-14);
  for (int n = 3; n <= 6; ++n)
    for (int k = 1; k <= n; ++k) {
      const auto spec = OperatorSpec::sigma_k_root(n, k);
      const BubbleParams p{0.8, 1.1, Vec::Zero(n)};
      const double expect = std::pow(binom(n, k), 1.0 / k) * 2.0 * p.b * p.b / (p.a * p.a);
      const auto ov = evaluate_operator(AnalyticField::bubble(n, p), Vec::Constant(n, 0.3), spec);
      EXPECT_NEAR(*ov.value, expect, 1e-12 * expect);
      const auto tb = tuned_bubble(spec, 0.8, Vec::Zero(n));
      EXPECT_NEAR(std::pow(binom(n, k), 1.0 / k) * 2.0 * tb.b * tb.b / (tb.a * tb.a), 1.0, 1e-14);
    }
}

TEST(Verdicts, PointwiseRules) {
  const auto spec = OperatorSpec::sigma_k_root(3, 1);
  const Vec x = Vec::Zero(3);
  auto verdict = [&](const Jet2& j, const OperatorSpec& s) { return judge(x, evaluate_jet(j, s), s, 1e-8).verdict; };
  EXPECT_EQ(verdict(Jet2::constant(3, 1.0), spec), Verdict::OnConeBoundary);
  EXPECT_EQ(verdict(jet_with_conformal_diagonal(3, -1.0 / 3.0), spec), Verdict::OnLevel);
  EXPECT_EQ(verdict(jet_with_conformal_diagonal(3, -1.0), spec), Verdict::StrictSub);
  EXPECT_EQ(verdict(jet_with_conformal_diagonal(3, -0.1), spec), Verdict::StrictSuper);
  EXPECT_EQ(verdict(jet_with_conformal_diagonal(3, 0.5), spec), Verdict::OutsideClosedCone);
  // sigma_2 raw of (-t,-t,-t) is 3t^2 >= 1 but sigma_1 < 0.
  const auto raw2 = OperatorSpec::sigma_k_raw(3, 2);
  EXPECT_EQ(verdict(jet_with_conformal_diagonal(3, 1.0), raw2), Verdict::ConeViolation);
  EXPECT_TRUE(is_super_side(Verdict::StrictSuper));
  EXPECT_TRUE(is_super_side(Verdict::OutsideClosedCone));
  EXPECT_TRUE(is_super_side(Verdict::OnConeBoundary));
  EXPECT_FALSE(is_super_side(Verdict::StrictSub));
}

TEST(Verdicts, AggregateRules) {
  const auto spec = OperatorSpec::sigma_k_root(3, 1);
  auto pv = [](Verdict v) {
    PointVerdict p;
    p.x = Vec::Zero(3);
    p.value = 1.0;
    p.verdict = v;
    return p;
  };
  EXPECT_EQ(aggregate({pv(Verdict::OnLevel), pv(Verdict::Kink)}, spec, 1e-8).aggregate, Aggregate::Solution);
  EXPECT_EQ(aggregate({pv(Verdict::OnLevel), pv(Verdict::StrictSub)}, spec, 1e-8).aggregate, Aggregate::SubSolution);
  EXPECT_EQ(aggregate({pv(Verdict::StrictSuper), pv(Verdict::OutsideClosedCone)}, spec, 1e-8).aggregate,
            Aggregate::SuperSolution);
  EXPECT_EQ(aggregate({pv(Verdict::StrictSuper), pv(Verdict::StrictSub)}, spec, 1e-8).aggregate, Aggregate::Mixed);
  EXPECT_EQ(aggregate({pv(Verdict::OnLevel), pv(Verdict::ConeViolation)}, spec, 1e-8).aggregate, Aggregate::Mixed);
  EXPECT_THROW(aggregate({pv(Verdict::Kink)}, spec, 1e-8), Error);
}

TEST(Classify, AnalyticFields) {
  Rng rng(56);
  const int n = 4;
  const auto spec = OperatorSpec::sigma_k_root(n, 2);
  const auto v = AnalyticField::bubble(n, tuned_bubble(spec, 1.3, rng.uniform_box(n, -0.5, 0.5)));
  const auto pts = gen::ball_points(300, Vec::Zero(n), 3.0, rng);
  const auto c = classify(v, pts, spec);
  EXPECT_EQ(c.aggregate, Aggregate::Solution);
  EXPECT_LT(c.max_level_deviation, 1e-12);
  EXPECT_EQ(classify(AnalyticField::scaled(0.9, v), pts, spec).aggregate, Aggregate::SubSolution);
  EXPECT_EQ(classify(AnalyticField::scaled(1.1, v), pts, spec).aggregate, Aggregate::SuperSolution);
  EXPECT_EQ(classify(AnalyticField::constant(n, 2.0), pts, spec).aggregate, Aggregate::SuperSolution);
  EXPECT_EQ(classify(AnalyticField::constant(n, 2.0), pts, OperatorSpec::affine_trace(n, 1.0)).aggregate,
            Aggregate::Solution);
}

TEST(Classify, GridOperatorErrorIsSecondOrder) {
  const int n = 3;
  const auto spec = OperatorSpec::sigma_k_root(n, 1);
  const auto v = AnalyticField::bubble(n, tuned_bubble(spec, 1.0, Vec::Zero(n)));
  const GridField coarse = sample(v, GridSpec::cube(n, -1.0, 1.0, 21));
  const GridField fine = sample(v, GridSpec::cube(n, -1.0, 1.0, 41));
  double e1 = 0.0, e2 = 0.0;
  for (const Index& node : {Index{10, 10, 10}, Index{5, 12, 14}, Index{15, 4, 9}}) {
    Index fnode = node;
    for (auto& i : fnode) i *= 2;
    e1 = std::max(e1, std::abs(*evaluate_jet(fd_jet(coarse, node), spec).value - 1.0));
    e2 = std::max(e2, std::abs(*evaluate_jet(fd_jet(fine, fnode), spec).value - 1.0));
  }
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
  const auto c = classify(fine, spec, grid_verdict_tolerance(fine.spec()));
  EXPECT_EQ(c.aggregate, Aggregate::Solution);
  EXPECT_DOUBLE_EQ(grid_verdict_tolerance(fine.spec()), 10.0 * 0.05 * 0.05);
}

TEST(Classify, ReportsCarryEveryPoint) {
  Rng rng(57);
  const auto spec = OperatorSpec::sigma_k_root(3, 1);
  const auto pts = gen::ball_points(7, Vec::Zero(3), 1.0, rng);
  const auto c = classify(AnalyticField::bubble(3, tuned_bubble(spec, 1.0, Vec::Zero(3))), pts, spec);
  const auto csv = classification_csv(c);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);
  const auto j = classification_json(c);
  EXPECT_EQ(j["aggregate"], "Solution");
}
