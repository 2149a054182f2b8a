#include <gtest/gtest.h>

#include <cmath>

#include "confvisc/conformal.hpp"
#include "confvisc/fields.hpp"
#include "confvisc/grid.hpp"
#include "confvisc/rng.hpp"
#include "confvisc/viscosity.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace confvisc;

namespace {

GridField psi_grid(const GridSpec& g, const std::function<double(const Vec&)>& f) {
  std::vector<double> v;
  for (std::size_t i = 0; i < g.size(); ++i) v.push_back(f(g.coords(i)));
  return GridField(g, std::move(v), GridField::Kind::Psi, BoundaryPolicy::Reject);
}

GridField random_lipschitz(const GridSpec& g, Rng& rng) {
  const int n = g.n();
  std::vector<Vec> c;
  std::vector<double> w;
  for (int i = 0; i < 4; ++i) {
    c.push_back(rng.uniform_box(n, -1.0, 1.0));
    w.push_back(rng.uniform(-1.0, 1.0));
  }
  return psi_grid(g, [&](const Vec& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += w[i] * (x - c[i]).norm();
    return s + 0.3 * std::sin(3.0 * x[0]);
  });
}

}  // namespace

TEST(SupConvolution, MatchesBruteForce) {
  Rng rng(71);
  for (int n = 1; n <= 3; ++n) {
    const auto g = GridSpec::cube(n, -1.0, 1.0, n == 3 ? 9 : 21);
    const GridField psi = random_lipschitz(g, rng);
    for (double eps : {0.01, 0.1, 1.0}) {
      const auto r = sup_convolve(psi, eps);
      for (std::size_t f = 0; f < g.size(); ++f) {
        const double ref = oracle::brute_sup_convolution(psi, eps, f);
        ASSERT_NEAR(r.regularized[f], ref, 1e-12 * std::max(1.0, std::abs(ref))) << n << " " << eps << " " << f;
        const std::size_t a = r.argmax[f];
        EXPECT_NEAR(psi[a] - (g.coords(a) - g.coords(f)).squaredNorm() / eps, r.regularized[f], 1e-12);
      }
    }
  }
}

TEST(SupConvolution, DominatesInputAndIsSemiconvex) {
  Rng rng(72);
  const auto g = GridSpec::cube(2, -1.0, 1.0, 61);
  const GridField psi = random_lipschitz(g, rng);
  for (double eps : {0.02, 0.2}) {
    const auto r = sup_convolve(psi, eps);
    for (std::size_t f = 0; f < g.size(); ++f) EXPECT_GE(r.regularized[f], psi[f]);
    const auto cert = certify_semiconvex(r.regularized, 2.0 / eps);
    // The discrete transform plus |x|^2/eps is a max of affine functions, so
    // axis second differences are bounded exactly.
    EXPECT_GE(cert.min_axis_second_difference, -2.0 / eps - 1e-6);
    const double h = g.spacing[0];
    const auto banded = certify_semiconvex(r.regularized, 2.0 / eps, 10.0 / (h * h));
    EXPECT_TRUE(banded.pass);
    EXPECT_TRUE(std::isnan(banded.node_min_eigenvalue[0]));
  }
}

TEST(SupConvolution, LargeEpsilonFlattensAndSmallEpsilonReproduces) {
  Rng rng(73);
  const auto g = GridSpec::cube(2, -1.0, 1.0, 11);
  const GridField psi = random_lipschitz(g, rng);
  const double top = *std::max_element(psi.values().begin(), psi.values().end());
  const auto flat = sup_convolve(psi, 1e12);
  for (std::size_t f = 0; f < g.size(); ++f) EXPECT_NEAR(flat.regularized[f], top, 1e-9);
  const auto sharp = sup_convolve(psi, 1e-8);
  for (std::size_t f = 0; f < g.size(); ++f) EXPECT_EQ(sharp.regularized[f], psi[f]);
}

TEST(InfConvolution, IsTheMirrorOfSup) {
  Rng rng(74);
  const auto g = GridSpec::cube(2, -1.0, 1.0, 31);
  const GridField psi = random_lipschitz(g, rng);
  std::vector<double> neg;
  for (double v : psi.values()) neg.push_back(-v);
  const auto inf = inf_convolve(psi, 0.1);
  const auto sup = sup_convolve(psi.with_values(neg, GridField::Kind::Psi), 0.1);
  for (std::size_t f = 0; f < g.size(); ++f) {
    EXPECT_EQ(inf.regularized[f], -sup.regularized[f]);
    EXPECT_LE(inf.regularized[f], psi[f]);
  }
  EXPECT_EQ(inf.kind, ConvolutionKind::Inf);
}

TEST(SupConvolution, SmoothInputIsAlreadySemiconvex) {
  const auto g = GridSpec::cube(2, -1.0, 1.0, 41);
  const GridField psi = psi_grid(g, [](const Vec& x) { return -0.5 * x.squaredNorm(); });
  const auto r = sup_convolve(psi, 0.05);
  const auto cert = certify_semiconvex(r.regularized, 2.0 / 0.05);
  EXPECT_TRUE(cert.pass);
  EXPECT_TRUE(cert.violations.empty());
  const auto j = convolution_json(r, cert);
  EXPECT_EQ(j["eps"], 0.05);
  const auto csv = convolution_csv(psi, r, cert);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), g.size() + 1);
}

TEST(Envelope, MatchesLinearProgram) {
  Rng rng(75);
  for (int n = 1; n <= 3; ++n) {
    const auto g = GridSpec::cube(n, -1.0, 1.0, n == 3 ? 5 : 7);
    std::vector<double> vals;
    for (std::size_t i = 0; i < g.size(); ++i) vals.push_back(rng.uniform(-1.0, 1.0));
    const GridField xi(g, vals, GridField::Kind::Psi);
    const auto env = concave_envelope(xi);
    std::vector<Vec> pts;
    for (std::size_t i = 0; i < g.size(); ++i) pts.push_back(g.coords(i));
    for (std::size_t f = 0; f < g.size(); ++f) {
      const double ref = oracle::lp_concave_envelope(pts, vals, g.coords(f));
      EXPECT_NEAR(env.envelope[f], ref, 1e-9) << n << " " << f;
      EXPECT_GE(env.envelope[f], vals[f]);
    }
    const auto top = std::max_element(vals.begin(), vals.end()) - vals.begin();
    EXPECT_NE(std::find(env.contact_nodes.begin(), env.contact_nodes.end(), static_cast<std::size_t>(top)),
              env.contact_nodes.end());
  }
}

TEST(Envelope, ConcaveDataIsItsOwnEnvelope) {
  const auto g = GridSpec::cube(2, -1.0, 1.0, 9);
  const GridField xi = psi_grid(g, [](const Vec& x) { return 1.0 - x.squaredNorm(); });
  const auto env = concave_envelope(xi);
  for (std::size_t f = 0; f < g.size(); ++f) EXPECT_NEAR(env.envelope[f], xi[f], 1e-12);
  EXPECT_EQ(env.contact_nodes.size(), g.size());
  EXPECT_THROW(concave_envelope(GridField(GridSpec::cube(4, 0.0, 1.0, 5), std::vector<double>(625, 1.0))), Error);
}

TEST(C11, SmoothSolutionAgreesAtEveryPoint) {
  Rng rng(76);
  const auto spec = OperatorSpec::sigma_k_root(3, 2);
  const auto v = AnalyticField::bubble(3, tuned_bubble(spec, 1.0, Vec::Zero(3)));
  const auto pts = gen::ball_points(100, Vec::Zero(3), 2.0, rng);
  const auto rep = verify_c11_equivalence(PsiField::from_analytic(v), pts, spec);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.pointwise_aggregate, Aggregate::Solution);
  EXPECT_EQ(rep.kink_points, 0);
  const auto sub = verify_c11_equivalence(PsiField::from_analytic(AnalyticField::scaled(0.8, v)), pts, spec);
  EXPECT_TRUE(sub.pass);
  EXPECT_EQ(sub.pointwise_aggregate, Aggregate::SubSolution);
  EXPECT_EQ(sub.touching_aggregate, Aggregate::SubSolution);
}

TEST(C11, KinksAreCountedNotClassified) {
  Rng rng(77);
  const auto spec = OperatorSpec::sigma_k_root(3, 1);
  Vec c1 = Vec::Zero(3), c2 = Vec::Zero(3);
  c1[0] = -0.5;
  c2[0] = 0.5;
  const auto p1 = PsiField::from_analytic(AnalyticField::bubble(3, tuned_bubble(spec, 1.0, c1)));
  const auto p2 = PsiField::from_analytic(AnalyticField::bubble(3, tuned_bubble(spec, 1.0, c2)));
  const auto m = PsiField::max_of(p1, p2, 1e-9);
  auto pts = gen::ball_points(50, Vec::Zero(3), 1.0, rng);
  for (int i = 0; i < 5; ++i) pts.push_back(Vec::Zero(3) + 0.1 * i * Vec::Unit(3, 1));
  const auto rep = verify_c11_equivalence(m, pts, spec);
  EXPECT_EQ(rep.kink_points, 5);
  EXPECT_EQ(rep.classified, 50);
  EXPECT_TRUE(rep.pass);
}

TEST(C11, UnboundedHessianIsRejected) {
  const auto spec = OperatorSpec::sigma_k_root(3, 1);
  const auto v = AnalyticField::bubble(3, {1.0, 1e5, Vec::Zero(3)});
  C11Options o;
  o.hessian_bound = 1.0;
  EXPECT_THROW(verify_c11_equivalence(PsiField::from_analytic(v), {Vec::Zero(3)}, spec, o), Error);
}

TEST(SupConvolution, WorkedExamples) {
  const auto g = GridSpec::cube(2, -1.0, 1.0, 41);
  const GridField c = psi_grid(g, [](const Vec&) { return 0.75; });
  const auto rc = sup_convolve(c, 0.1);
  for (std::size_t f = 0; f < g.size(); ++f) {
    EXPECT_EQ(rc.regularized[f], 0.75);
    EXPECT_EQ(rc.argmax[f], f);
  }
  EXPECT_EQ(concave_envelope(c).envelope.values(), c.values());

  // Grid maximizer is within half a cell of x/(1+eps) per axis.
  const double eps = 0.05, h = g.spacing[0];
  const GridField q = psi_grid(g, [](const Vec& x) { return -x.squaredNorm(); });
  const auto rq = sup_convolve(q, eps);
  for (std::size_t f = 0; f < g.size(); ++f) {
    const Vec x = g.coords(f);
    if (!g.interior(g.unflat(f), 2)) continue;
    const double exact = -x.squaredNorm() / (1.0 + eps);
    EXPECT_LE(rq.regularized[f], exact + 1e-14);
    EXPECT_GE(rq.regularized[f], exact - 2.0 * (1.0 + 1.0 / eps) * 0.25 * h * h - 1e-14);
  }

  const GridField cone = psi_grid(g, [](const Vec& x) { return -x.norm(); });
  const auto bad = certify_semiconvex(cone, 1.0);
  EXPECT_FALSE(bad.pass);
  EXPECT_LT(bad.min_eigenvalue, -1.0 / h);
  const GridField smooth = psi_grid(g, [](const Vec& x) { return -1.5 * x[0] * x[0] + 0.5 * x[1] * x[1]; });
  EXPECT_TRUE(certify_semiconvex(smooth, 3.0, 1e-9).pass);
}
