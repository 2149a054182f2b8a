#include "confvisc_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "confvisc/comparison.hpp"
#include "confvisc/conformal.hpp"
#include "confvisc/grid.hpp"
#include "confvisc/mobius.hpp"
#include "confvisc/movingsphere.hpp"
#include "confvisc/report.hpp"
#include "confvisc/rng.hpp"
#include "confvisc/viscosity.hpp"

namespace confvisc::cli {

namespace {

const AnalyticField& analytic_field(const CommandContext& ctx, const std::string& command) {
  if (const AnalyticField* a = ctx.field.analytic()) return *a;
  throw Error(ErrorCode::ConfigError, "/field: " + command + " needs an analytic field");
}

std::vector<Vec> ball_points(const Vec& center, double radius, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) pts.push_back(rng.in_ball(center, radius));
  return pts;
}

PlotSeries index_series(std::string name, const std::vector<double>& y) {
  PlotSeries s{std::move(name), {}, y};
  for (std::size_t i = 0; i < y.size(); ++i) s.x.push_back(static_cast<double>(i));
  return s;
}

// ---------------------------------------------------------------- check-solution

CommandOutput check_solution(const CommandContext& ctx, Section& p) {
  const auto expect = p.text("expect", "Solution", {"Solution", "SubSolution", "SuperSolution", "Mixed"});
  Classification c;
  if (const GridField* g = ctx.field.grid()) {
    const double tol = p.number("tol", grid_verdict_tolerance(g->spec()));
    p.finish();
    ctx.log("classifying " + std::to_string(g->size()) + " grid nodes");
    c = classify(*g, ctx.spec, tol);
  } else {
    const auto count = p.integer("points", 1000);
    const double radius = p.number("radius", 2.0);
    const Vec center = p.vector("center", ctx.n, Vec::Zero(ctx.n));
    const double tol = p.number("tol", 1e-8);
    p.finish();
    if (count < 1 || !(radius > 0.0)) throw Error(ErrorCode::ConfigError, "/params: need points >= 1 and radius > 0");
    ctx.log("classifying " + std::to_string(count) + " sampled points");
    c = classify(*ctx.field.analytic(), ball_points(center, radius, static_cast<int>(count), ctx.seed),
                 ctx.spec, tol);
  }
  CommandOutput out;
  out.result = classification_json(c);
  out.result["expect"] = expect;
  out.pass = std::string(to_string(c.aggregate)) == expect;
  out.csv = classification_csv(c);
  if (ctx.plot) {
    std::vector<double> dev;
    for (const auto& pt : c.points)
      if (pt.value) dev.push_back(*pt.value - c.level);
    out.svg = svg_line_plot({"Operator value minus level", "point", "deviation", false, false},
                            {index_series("deviation", dev)});
  }
  return out;
}

// ---------------------------------------------------------------- mobius-invariance

CommandOutput mobius_invariance(const CommandContext& ctx, Section& p) {
  const AnalyticField& w = analytic_field(ctx, "mobius-invariance");
  const bool identity = p.boolean("identity", false);
  const auto ops = p.integer("ops", 5);
  const auto count = p.integer("points", 1000);
  const double radius = p.number("radius", 1.0);
  const double tol = p.number("tol", 1e-8);
  const double min_pole = p.number("min_pole_distance", 0.05);
  const double fd_step = p.number("fd_step", 0.0);
  const double fd_tol = p.number("fd_tol", 1e-4);
  p.finish();
  if (count < 1 || ops < 0 || !(radius > 0.0)) throw Error(ErrorCode::ConfigError, "/params: bad sampling values");

  Rng rng(ctx.seed);
  const MobiusMap phi = identity ? MobiusMap(ctx.n) : random_mobius_map(ctx.n, static_cast<int>(ops), rng);
  std::vector<Vec> pts;
  for (long long tries = 0; static_cast<long long>(pts.size()) < count && tries < 1000 * count; ++tries) {
    Vec x = rng.in_ball(Vec::Zero(ctx.n), radius);
    if (pole_distance(phi, x) >= min_pole) pts.push_back(std::move(x));
  }
  if (pts.empty()) throw Error(ErrorCode::EmptyRegion, "no sample point keeps clear of the map's poles");
  ctx.log("checking invariance at " + std::to_string(pts.size()) + " points");
  const InvarianceReport r = check_conformal_invariance(w, phi, pts, ctx.spec, tol);

  CommandOutput out;
  out.result = invariance_json(r);
  json map = json::array();
  for (const auto& op : phi.ops()) {
    switch (op.kind) {
      case MobiusOp::Kind::Translate:
        map.push_back({{"op", "translate"}, {"vector", std::vector<double>(op.vector.data(), op.vector.data() + op.vector.size())}});
        break;
      case MobiusOp::Kind::Dilate: map.push_back({{"op", "dilate"}, {"factor", op.factor}}); break;
      case MobiusOp::Kind::Invert:
        map.push_back({{"op", "invert"}, {"center", std::vector<double>(op.vector.data(), op.vector.data() + op.vector.size())}});
        break;
    }
  }
  out.result["map"] = map;
  out.pass = r.pass;
  if (fd_step > 0.0) {
    const InvarianceReport fd = check_conformal_invariance_fd(w, phi, pts, ctx.spec, fd_step, fd_tol);
    out.result["finite_difference"] = invariance_json(fd);
    out.pass = out.pass && fd.pass;
  }
  out.csv = invariance_csv(r);
  if (ctx.plot) {
    std::vector<double> d;
    for (const auto& pt : r.points) d.push_back(pt.discrepancy);
    out.svg = svg_line_plot({"Invariance discrepancy", "point", "|lhs - rhs|", false, false}, {index_series("discrepancy", d)});
  }
  return out;
}

// ---------------------------------------------------------------- sup-convolve

GridField psi_grid(const CommandContext& ctx, Section& p) {
  if (const GridField* g = ctx.field.grid()) {
    if (p.has("grid")) p.fail("grid", "only used with analytic fields");
    if (g->kind() == GridField::Kind::Psi) return *g;
    std::vector<double> v(g->values());
    for (double& x : v) x = -std::log(x);
    return g->with_values(std::move(v), GridField::Kind::Psi);
  }
  Section gs = p.object("grid");
  const double lo = gs.number("lo", -1.0), hi = gs.number("hi", 1.0);
  const auto nodes = gs.integer("nodes", 41);
  gs.finish();
  const GridSpec spec = GridSpec::cube(ctx.n, lo, hi, static_cast<int>(nodes));
  const GridField u = sample(*ctx.field.analytic(), spec, BoundaryPolicy::Reject);
  std::vector<double> v(u.values());
  for (double& x : v) x = -std::log(x);
  return u.with_values(std::move(v), GridField::Kind::Psi);
}

CommandOutput sup_convolve_cmd(const CommandContext& ctx, Section& p) {
  const double eps = p.number("eps");
  const auto kind = p.text("kind", "sup", {"sup", "inf"});
  const GridField psi = psi_grid(ctx, p);
  double h = 0.0;
  for (Eigen::Index i = 0; i < psi.spec().spacing.size(); ++i) h = std::max(h, psi.spec().spacing[i]);
  const double stencil_tol = p.number("stencil_tol", 10.0 / (h * h));
  const bool envelope = p.boolean("envelope", false);
  const double contact_rel = p.number("contact_rel", 1e-9);
  const bool save_grid = p.boolean("save_grid", false);
  p.finish();
  if (!(eps > 0.0)) throw Error(ErrorCode::ConfigError, "/params/eps: must be positive");

  ctx.log("regularizing " + std::to_string(psi.size()) + " nodes");
  const bool sup = kind == "sup";
  const ConvolutionResult r = sup ? sup_convolve(psi, eps) : inf_convolve(psi, eps);
  SemiconvexReport cert;
  if (sup) {
    cert = certify_semiconvex(r.regularized, 2.0 / eps, stencil_tol);
  } else {
    std::vector<double> neg(r.regularized.values());
    for (double& x : neg) x = -x;
    cert = certify_semiconvex(r.regularized.with_values(std::move(neg), GridField::Kind::Psi), 2.0 / eps, stencil_tol);
  }
  std::size_t order_violations = 0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double d = r.regularized[i] - psi[i];
    if (sup ? d < 0.0 : d > 0.0) ++order_violations;
  }
  CommandOutput out;
  out.result = convolution_json(r, cert);
  out.result["order_violations"] = order_violations;
  out.pass = cert.pass && order_violations == 0;
  if (envelope) {
    const EnvelopeResult env = concave_envelope(psi, contact_rel);
    out.result["envelope"] = {{"contact_nodes", env.contact_nodes.size()},
                              {"contact_tol", env.contact_tol},
                              {"hull_facets", env.hull_facets}};
  }
  out.csv = convolution_csv(psi, r, cert);
  if (save_grid) {
    const GridDocuments docs = grid_documents(r.regularized, "regularized.csv");
    out.files.emplace_back("regularized.json", docs.header);
    out.files.emplace_back("regularized.csv", docs.values);
  }
  if (ctx.plot) {
    // Slice along the first axis through the middle node.
    const auto& gs = psi.spec();
    Index idx(gs.extents.size());
    for (std::size_t a = 0; a < idx.size(); ++a) idx[a] = gs.extents[a] / 2;
    PlotSeries a{"psi", {}, {}}, b{sup ? "sup-convolution" : "inf-convolution", {}, {}};
    for (int i = 0; i < gs.extents[0]; ++i) {
      idx[0] = i;
      const auto f = gs.flat(idx);
      a.x.push_back(gs.coords(idx)[0]);
      a.y.push_back(psi[f]);
      b.x.push_back(a.x.back());
      b.y.push_back(r.regularized[f]);
    }
    out.svg = svg_line_plot({"Regularization along the first axis", "x0", "value", false, false}, {a, b});
  }
  return out;
}

// ---------------------------------------------------------------- deformation

CommandOutput deformation_cmd(const CommandContext& ctx, Section& p) {
  const AnalyticField& u = analytic_field(ctx, "deformation");
  DeformationParams base;
  base.R = p.number("R", 1.0);
  base.xhat = p.vector("xhat", ctx.n, Vec(base.R * Vec::Unit(ctx.n, 0)));
  base.mu = p.number("mu", 1e-3);
  base.A_radius = p.number("A_radius", 0.0);
  const auto alpha_mode = p.raw("alpha");
  const auto samples = p.integer("samples", 2000);
  const auto max_doublings = p.integer("max_doublings", 20);
  const auto mu_halvings = p.integer("mu_halvings", 0);
  const double control_alpha = p.number("control_alpha", 1.0);
  p.finish();

  const PsiField psi2 = PsiField::from_analytic(u);
  CommandOutput out;
  std::vector<DeformationReport> attempts;
  int selected = -1;
  if (!alpha_mode || (alpha_mode->is_string() && alpha_mode->get<std::string>() == "auto")) {
    base.alpha = 1.0;
    ctx.log("searching alpha");
    AlphaSearch s = search_alpha(psi2, base, ctx.spec, static_cast<int>(samples), ctx.seed,
                                 static_cast<int>(max_doublings), static_cast<int>(mu_halvings));
    attempts = std::move(s.attempts);
    selected = s.selected;
  } else {
    if (!alpha_mode->is_number()) throw Error(ErrorCode::ConfigError, "/params/alpha: expected a number or \"auto\"");
    base.alpha = alpha_mode->get<double>();
    if (!(base.A_radius > 0.0))
      base.A_radius = std::min(DeformationParams::max_A_radius(base.alpha), 0.5 * base.R);
    Rng rng(ctx.seed);
    const auto lens = sample_lens(base, static_cast<int>(samples), rng);
    attempts.push_back(verify_strict_supersolution(psi2, base, ctx.spec, lens));
    if (attempts.back().pass) selected = 0;
  }

  // Negative control: a small alpha, recorded whatever its outcome.
  DeformationParams ctl = base;
  ctl.alpha = control_alpha;
  ctl.A_radius = std::min(DeformationParams::max_A_radius(ctl.alpha), 0.5 * ctl.R);
  Rng rng(ctx.seed);
  const auto ctl_lens = sample_lens(ctl, static_cast<int>(samples), rng);
  const DeformationReport control = verify_strict_supersolution(psi2, ctl, ctx.spec, ctl_lens);

  out.pass = selected >= 0;
  json tried = json::array();
  for (const auto& a : attempts) tried.push_back(deformation_json(a));
  out.result = {{"attempts", tried}, {"selected", selected}, {"negative_control", deformation_json(control)}};
  if (selected >= 0) out.result["selected_report"] = deformation_json(attempts[static_cast<std::size_t>(selected)]);

  CsvTable t({"attempt", "alpha", "mu", "A_radius", "tau", "extreme_value", "beta", "outside_cone"});
  for (std::size_t i = 0; i < attempts.size(); ++i)
    for (const auto& row : attempts[i].rows)
      t.row().cell(i).cell(attempts[i].params.alpha).cell(attempts[i].params.mu).cell(attempts[i].params.A_radius)
          .cell(row.tau).cell(row.extreme_value).cell(row.beta).cell(row.outside_cone);
  out.csv = t.str();
  if (ctx.plot) {
    PlotSeries s{"beta_min", {}, {}};
    for (const auto& a : attempts) {
      s.x.push_back(a.params.alpha);
      s.y.push_back(a.beta_min);
    }
    out.svg = svg_line_plot({"Deformation margin", "alpha", "beta_min", true, false}, {s});
  }
  return out;
}

// ---------------------------------------------------------------- hopf

CommandOutput hopf_cmd(const CommandContext& ctx, Section& p) {
  const AnalyticField& u = analytic_field(ctx, "hopf");
  const auto pair = p.text("pair", "moving-sphere", {"moving-sphere", "quadratic"});
  const Vec center = p.vector("center", ctx.n, Vec::Zero(ctx.n));
  Vec e = p.vector("direction", ctx.n, Vec(Vec::Unit(ctx.n, 0)));
  const double R = p.number("R", 100.0);
  const double fraction = p.number("lambda_fraction", 0.5);
  const double s_max = p.number("s_max", 1e-2);
  const double s_min = p.number("s_min", 1e-7);
  const double contact_tol = p.number("contact_tol", 1e-10);
  const double pass_tol = p.number("pass_tol", 1e-8);
  const double lambda_given = p.number("lambda", 0.0);
  p.finish();
  if (!(e.norm() > 0.0)) throw Error(ErrorCode::ConfigError, "/params/direction: must be non-zero");
  e /= e.norm();

  double lam = lambda_given;
  json extra = json::object();
  if (!(lam > 0.0)) {
    ctx.log("locating the critical radius");
    const MovingSphereState st = critical_radius(ctx.field, center, R);
    lam = fraction * st.lambda_bar;
    extra["critical_radius"] = moving_sphere_json(st);
  }
  const Vec xhat = center + lam * e;
  const Vec nu = -e;
  const PsiField psi1 = PsiField::from_analytic(u);
  PsiField psi2 = psi1;
  if (pair == "moving-sphere") {
    psi2 = PsiField::from_analytic(kelvin(u, KelvinTransform{center, lam}));
  } else {
    auto value = [psi1, xhat, nu](const Vec& y) {
      const double t = (y - xhat).dot(nu);
      return psi1.value(y) + t * t;
    };
    auto jet = [psi1, xhat, nu](const Vec& y) {
      Jet2 j = psi1.jet(y);
      const double t = (y - xhat).dot(nu);
      j.value += t * t;
      j.gradient += 2.0 * t * nu;
      j.hessian += 2.0 * SymMatrix::outer(nu);
      return j;
    };
    psi2 = PsiField(ctx.n, value, jet, {}, "psi + quadratic tangency");
  }
  const HopfQuotient hq = hopf_quotient(psi1, psi2, xhat, nu, geometric_s(s_max * lam, s_min * lam), contact_tol, pass_tol);
  CommandOutput out;
  out.pass = hq.pass;
  out.result = hopf_json(hq);
  out.result["pair"] = pair;
  out.result["lambda"] = lam;
  for (auto& [k, v] : extra.items()) out.result[k] = v;
  out.csv = hopf_csv(hq);
  if (ctx.plot)
    out.svg = svg_line_plot({"Hopf quotient", "s", "quotient", true, false},
                            {PlotSeries{"quotient", hq.s_values, hq.quotients}});
  return out;
}

// ---------------------------------------------------------------- moving-sphere

MovingSphereOptions sphere_options(Section& p) {
  MovingSphereOptions o;
  o.tol = p.number("tol", o.tol);
  o.hold_tol = p.number("hold_tol", o.hold_tol);
  o.probes = static_cast<int>(p.integer("probes", o.probes));
  o.sampling.random_directions = static_cast<int>(p.integer("random_directions", o.sampling.random_directions));
  o.sampling.radii = static_cast<int>(p.integer("radii", o.sampling.radii));
  return o;
}

CommandOutput moving_sphere_cmd(const CommandContext& ctx, Section& p) {
  const double R = p.number("R");
  const auto centers = p.vectors("centers", ctx.n, std::vector<Vec>{Vec::Zero(ctx.n)});
  MovingSphereOptions opt = sphere_options(p);
  p.finish();
  opt.sampling.seed = ctx.seed;
  std::vector<MovingSphereState> states;
  for (const auto& c : centers) {
    ctx.log("critical radius at center " + std::to_string(states.size()));
    states.push_back(critical_radius(ctx.field, c, R, opt));
  }
  const AsymptoticAlpha alpha = asymptotic_alpha(ctx.field, R, opt.sampling);
  CommandOutput out;
  out.pass = std::all_of(states.begin(), states.end(),
                         [&](const MovingSphereState& s) { return s.capped || s.violation_gap > opt.hold_tol; });
  json arr = json::array();
  for (const auto& s : states) arr.push_back(moving_sphere_json(s));
  out.result = {{"centers", arr},
                {"alpha_hat", alpha.alpha_hat},
                {"alpha_growth", alpha.growth},
                {"alpha_infinite", alpha.infinite}};
  out.csv = moving_sphere_csv(ctx.field, states);
  if (ctx.plot) out.svg = lambda_svg(states);
  return out;
}

// ---------------------------------------------------------------- liouville

CommandOutput liouville_cmd(const CommandContext& ctx, Section& p) {
  const double R = p.number("R");
  LiouvilleOptions o;
  o.certify_tol = p.number("certify_tol", o.certify_tol);
  o.certify_points = static_cast<int>(p.integer("certify_points", o.certify_points));
  o.constant_tol = p.number("constant_tol", o.constant_tol);
  o.identity_tol = p.number("identity_tol", o.identity_tol);
  o.residual_tol = p.number("residual_tol", o.residual_tol);
  o.level_tol = p.number("level_tol", o.level_tol);
  const auto expect = p.text("expect", "any", {"any", "Constant", "Bubble"});
  o.sphere = sphere_options(p);
  p.finish();
  o.seed = ctx.seed;
  o.sphere.sampling.seed = ctx.seed;
  ctx.log("classifying");
  const LiouvilleVerdict v = liouville_classify(ctx.field, R, ctx.spec, o);
  CommandOutput out;
  out.result = liouville_json(v);
  out.result["expect"] = expect;
  out.pass = v.kind != LiouvilleKind::Inconclusive && (expect == "any" || expect == to_string(v.kind));
  out.csv = moving_sphere_csv(ctx.field, v.centers);
  if (ctx.plot) out.svg = lambda_svg(v.centers);
  return out;
}

const std::map<std::string, Command>& registry() {
  static const std::map<std::string, Command> r{
      {"check-solution", check_solution}, {"mobius-invariance", mobius_invariance},
      {"sup-convolve", sup_convolve_cmd}, {"deformation", deformation_cmd},
      {"hopf", hopf_cmd},                 {"moving-sphere", moving_sphere_cmd},
      {"liouville", liouville_cmd}};
  return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"check-solution", "mobius-invariance", "sup-convolve", "deformation",
                                              "hopf",           "moving-sphere",     "liouville"};
  return names;
}

Command find_command(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw Error(ErrorCode::ConfigError, "/command: unknown command \"" + name + "\"");
  return it->second;
}

}  // namespace confvisc::cli
