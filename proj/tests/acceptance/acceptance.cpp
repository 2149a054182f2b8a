// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "confvisc/comparison.hpp"
#include "confvisc/conformal.hpp"
#include "confvisc/fields.hpp"
#include "confvisc/grid.hpp"
#include "confvisc/mobius.hpp"
#include "confvisc/movingsphere.hpp"
#include "confvisc/parallel.hpp"
#include "confvisc/report.hpp"
#include "confvisc/rng.hpp"
#include "confvisc/viscosity.hpp"
#include "confvisc_cli/run.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace confvisc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;
  std::function<Outcome()> body;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

double binom(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

Outcome bubble_identity() {
  Rng rng(1001);
  double worst = 0.0;
  bool all_solution = true;
  for (int n = 3; n <= 6; ++n)
    for (int k = 1; k <= n; ++k) {
      const auto spec = OperatorSpec::sigma_k_root(n, k);
      BubbleParams p;
      p.a = rng.uniform(0.5, 2.0);
      p.x0 = rng.uniform_box(n, -1.0, 1.0);
      p.b = p.a * std::sqrt(0.5 / std::pow(binom(n, k), 1.0 / k));
      const auto pts = gen::ball_points(1000, p.x0, 5.0, rng);
      const auto c = classify(AnalyticField::bubble(n, p), pts, spec, 1e-9);
      all_solution = all_solution && c.aggregate == Aggregate::Solution;
      worst = std::max(worst, c.max_level_deviation);
    }
  return {all_solution && worst <= 1e-9, "max |f-1| = " + fmt(worst) + " over n=3..6, all k"};
}

Outcome conformal_invariance() {
  Rng rng(1002);
  const int n = 4;
  const auto spec = OperatorSpec::sigma_k_root(n, 2);
  const auto w = AnalyticField::bubble(n, tuned_bubble(spec, rng.uniform(0.5, 2.0), rng.uniform_box(n, -0.5, 0.5)));
  double worst = 0.0, worst_eig = 0.0;
  bool pass = true;
  for (int m = 0; m < 10; ++m) {
    const MobiusMap phi = random_mobius_map(n, 5, rng);
    std::vector<Vec> pts;
    while (pts.size() < 100) {
      Vec x = rng.in_ball(Vec::Zero(n), 1.0);
      if (pole_distance(phi, x) > 0.05) pts.push_back(std::move(x));
    }
    const auto r = check_conformal_invariance(w, phi, pts, spec, 1e-8);
    pass = pass && r.pass;
    worst = std::max(worst, r.max_discrepancy);
    worst_eig = std::max(worst_eig, r.max_eigen_discrepancy);
  }
  pass = pass && worst <= 1e-8 && worst_eig <= 1e-8;
  return {pass, "max |F discrepancy| = " + fmt(worst) + ", eigenvalues " + fmt(worst_eig) + " (10 maps x 100 points)"};
}

Outcome fd_fidelity() {
  const int n = 3;
  const auto spec = OperatorSpec::sigma_k_root(n, 1);
  const auto v = AnalyticField::bubble(n, tuned_bubble(spec, 1.0, Vec::Constant(n, 0.1)));
  const GridField coarse = sample(v, GridSpec::cube(n, -1.0, 1.0, 21));
  const GridField fine = sample(v, GridSpec::cube(n, -1.0, 1.0, 41));
  Rng rng(1003);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i = 0; i < 100; ++i) {
    Index node(3);
    for (auto& c : node) c = 2 + static_cast<int>(rng.below(17));
    Index fnode = node;
    for (auto& c : fnode) c *= 2;
    const double e1 = std::abs(*evaluate_jet(fd_jet(coarse, node), spec).value - 1.0);
    const double e2 = std::abs(*evaluate_jet(fd_jet(fine, fnode), spec).value - 1.0);
    lo = std::min(lo, e1 / e2);
    hi = std::max(hi, e1 / e2);
  }
  return {lo >= 3.5 && hi <= 4.5, "Richardson ratio in [" + fmt4(lo) + ", " + fmt4(hi) + "] at 100 nodes, h = 0.1 vs 0.05"};
}

Outcome sup_convolution() {
  const auto g = GridSpec::cube(2, -1.0, 1.0, 201);
  std::vector<double> vals;
  for (std::size_t f = 0; f < g.size(); ++f) {
    const Vec x = g.coords(f);
    vals.push_back(std::abs(x[0]) + 0.5 * std::abs(x[1] - 0.2) - 0.3 * std::max(0.0, x[0] + x[1]));
  }
  const GridField psi(g, vals, GridField::Kind::Psi);
  const double eps = 0.05, h = g.spacing[0];
  const auto r = sup_convolve(psi, eps);
  double brute = 0.0;
  for (int i = 0; i <= 200; i += 10)
    for (int j = 0; j <= 200; j += 10) {
      const std::size_t f = g.flat({i, j});
      brute = std::max(brute, std::abs(r.regularized[f] - oracle::brute_sup_convolution(psi, eps, f)));
    }
  bool above = true;
  for (std::size_t f = 0; f < g.size(); ++f) above = above && r.regularized[f] >= psi[f];
  const auto cert = certify_semiconvex(r.regularized, 2.0 / eps, 10.0 / (h * h));
  return {brute <= 1e-12 && above && cert.pass,
          "brute-force gap " + fmt(brute) + " on 21x21, psi_hat >= psi " + (above ? "yes" : "no") +
              ", min FD eigenvalue " + fmt(cert.min_eigenvalue) + " vs bound " + fmt(-2.0 / eps - 10.0 / (h * h)) + " (-2/eps = " + fmt(-2.0 / eps) + ")"};
}

Outcome deformation_margin() {
  const auto spec = OperatorSpec::sigma_k_root(3, 1);
  const PsiField psi2 = PsiField::from_analytic(AnalyticField::bubble(3, tuned_bubble(spec, 1.0, Vec::Zero(3))));
  DeformationParams base;
  base.alpha = 1.0;
  base.mu = 1e-3;
  base.R = 1.0;
  base.xhat = Vec::Unit(3, 0);
  base.A_radius = 0.0;
  const auto s = search_alpha(psi2, base, spec, 4000, 1005, 20, 0);
  if (s.selected < 0) return {false, "no alpha up to 2^20 gave a positive margin"};
  const auto& r = s.attempts[static_cast<std::size_t>(s.selected)];
  const auto& control = s.attempts.front();
  std::string rows;
  for (const auto& row : r.rows) rows += " " + fmt(row.beta);
  return {r.pass && r.rows.size() == 3,
          "alpha = " + fmt(r.params.alpha) + ", beta at tau = 0, tau0/2, tau0:" + rows +
              "; control alpha = 1 " + (control.pass ? "PASS" : "FAIL") + " (beta_min " + fmt(control.beta_min) + ")"};
}

Outcome hopf_quotient_check() {
  const auto spec = OperatorSpec::sigma_k_root(3, 1);
  Vec x0(3), c(3);
  x0 << 0.3, 0.4, 0.0;
  c << 0.5, 0.0, 0.0;
  const auto u = AnalyticField::bubble(3, tuned_bubble(spec, 1.0, x0));
  const auto st = critical_radius(u, c, 245.0);
  const double lam = 0.5 * st.lambda_bar;
  const Vec e = Vec::Unit(3, 0);
  const Vec xhat = c + lam * e, nu = -e;
  const auto s = geometric_s(1e-2 * lam, 1e-7 * lam);
  const PsiField p1 = PsiField::from_analytic(u);
  const PsiField p2 = PsiField::from_analytic(kelvin(u, {c, lam}));
  const auto hq = hopf_quotient(p1, p2, xhat, nu, s);
  const PsiField quad(
      3, [p1, xhat, nu](const Vec& y) { return p1.value(y) + std::pow((y - xhat).dot(nu), 2); },
      [p1, xhat, nu](const Vec& y) {
        Jet2 j = p1.jet(y);
        const double t = (y - xhat).dot(nu);
        j.value += t * t;
        j.gradient += 2.0 * t * nu;
        j.hessian += 2.0 * SymMatrix::outer(nu);
        return j;
      });
  const auto hc = hopf_quotient(p1, quad, xhat, nu, s);
  return {hq.pass && !hc.pass,
          "moving-sphere pair liminf proxy " + fmt(hq.extrapolated_liminf) + " (PASS expected), quadratic control " +
              fmt(hc.extrapolated_liminf) + " (" + (hc.pass ? "PASS" : "FAIL") + ", FAIL expected)"};
}

Outcome moving_sphere_identity() {
  const auto spec = OperatorSpec::sigma_k_root(3, 1);
  Vec x0(3);
  x0 << 0.3, 0.4, 0.0;
  const BubbleParams p = tuned_bubble(spec, 1.0, x0);
  const auto v = liouville_classify(AnalyticField::bubble(3, p), 100.0 / p.b, spec);
  if (v.kind != LiouvilleKind::Bubble || !v.bubble) return {false, "classified " + std::string(to_string(v.kind)) + ": " + v.reason};
  const double ea = std::abs(v.bubble->a / p.a - 1.0);
  const double eb = std::abs(v.bubble->b / p.b - 1.0);
  const double ex = (v.bubble->x0 - p.x0).norm() / p.x0.norm();
  const bool pass = v.centers.size() == 8 && v.identity_max_rel <= 2e-2 && ea <= 1e-2 && eb <= 1e-2 && ex <= 1e-2;
  return {pass, "identity max rel " + fmt(v.identity_max_rel) + " at " + std::to_string(v.centers.size()) +
                    " centers; errors a " + fmt(ea) + ", b " + fmt(eb) + ", x0 " + fmt(ex)};
}

Outcome liouville_negative_paths() {
  const auto spec = OperatorSpec::sigma_k_root(3, 1);
  const BubbleParams p = tuned_bubble(spec, 1.0, Vec::Zero(3));
  const double R = 100.0 / p.b;
  auto rejected = [&](const ScalarField& f, const OperatorSpec& s) {
    try {
      liouville_classify(f, R, s);
    } catch (const Error& e) {
      return e.code() == ErrorCode::NotASolution;
    }
    return false;
  };
  const bool scaled = rejected(AnalyticField::scaled(0.9, AnalyticField::bubble(3, p)), spec);
  bool constants = true;
  for (int k = 1; k <= 3; ++k) constants = constants && rejected(AnalyticField::constant(3, 1.0), OperatorSpec::sigma_k_root(3, k));
  const auto c = liouville_classify(AnalyticField::constant(3, 2.0), 50.0, OperatorSpec::affine_trace(3, 1.0));
  const bool constant_kind = c.kind == LiouvilleKind::Constant;
  return {scaled && constants && constant_kind,
          std::string("0.9 bubble ") + (scaled ? "NotASolution" : "accepted") + ", constants under sigma_k " +
              (constants ? "NotASolution" : "accepted") + ", constant with f(0)=1 " + std::string(to_string(c.kind))};
}

Outcome structural_suite() {
  Rng rng(1009);
  long long checks = 0;
  bool sym = true, ell = true, sup = true, tr = true;
  for (int n = 3; n <= 6; ++n)
    for (int k = 1; k <= n; ++k) {
      const auto spec = OperatorSpec::sigma_k_root(n, k);
      for (int s = 0; s < 10000; ++s) {
        const auto l = gen::box(n, rng, -3.0, 3.0);
        const auto pl = gen::permuted(l, rng);
        const auto a = f_eval(l, spec), b = f_eval(pl, spec);
        sym = sym && in_cone(l, spec.cone) == in_cone(pl, spec.cone) && a.has_value() == b.has_value() && (!a || *a == *b);
        if (a && *a >= 1.0) sup = sup && in_cone(l, spec.cone);
        const auto m = gen::cone_member(n, k, rng);
        auto mm = m;
        for (auto& x : mm) x += rng.uniform(0.0, 1.0);
        ell = ell && in_cone(mm, spec.cone) && *f_eval(mm, spec) >= *f_eval(m, spec);
        if (s % 20 == 0) tr = tr && gen::with_spectrum(m, rng).trace() >= -1e-12;
        ++checks;
      }
    }
  return {sym && ell && sup && tr, std::to_string(checks) + " samples; symmetry " + (sym ? "ok" : "broken") +
                                       ", ellipticity " + (ell ? "ok" : "broken") + ", superlevel " + (sup ? "ok" : "broken") +
                                       ", trace " + (tr ? "ok" : "broken")};
}

struct SuiteRun {
  std::vector<std::string> documents;
};

SuiteRun run_suite(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  SuiteRun out;
  for (const auto& f : files) {
    cli::RunOptions o;
    o.base_dir = dir;
    o.plot = true;
    const auto r = cli::run_config(read_text(f), o);
    out.documents.push_back(f.filename().string() + "\n" + r.summary.dump(2) + "\n" + r.csv + r.svg);
    for (const auto& [name, content] : r.files) out.documents.back() += name + "\n" + content;
  }
  return out;
}

Outcome cli_determinism() {
  const fs::path dir = CONFVISC_CONFIG_DIR;
  set_thread_count(1);
  const auto a = run_suite(dir);
  set_thread_count(4);
  const auto b = run_suite(dir);
  set_thread_count(1);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.documents.size(); ++i) differ += a.documents[i] != b.documents[i];
  return {a.documents.size() == b.documents.size() && differ == 0 && !a.documents.empty(),
          std::to_string(a.documents.size()) + " configs run twice (1 and 4 threads), " + std::to_string(differ) +
              " differ"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "bubble solution identity", 5.0, bubble_identity},
      {2, "conformal invariance", 10.0, conformal_invariance},
      {3, "finite-difference fidelity", 10.0, fd_fidelity},
      {4, "sup-convolution certificate", 20.0, sup_convolution},
      {5, "deformation margin", 30.0, deformation_margin},
      {6, "Hopf quotient", 10.0, hopf_quotient_check},
      {7, "moving-sphere identity", 60.0, moving_sphere_identity},
      {8, "Liouville negative paths", 30.0, liouville_negative_paths},
      {9, "structural conditions", 10.0, structural_suite},
      {10, "CLI determinism", 240.0, cli_determinism},
  };
  set_thread_count(1);
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.time_limit;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("criterion %2d %-28s %s  %s; %.2f s (limit %.0f s)\n", c.id, c.name.c_str(), pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.time_limit);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
