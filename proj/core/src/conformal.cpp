#include "confvisc/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "confvisc/parallel.hpp"
#include "confvisc/report.hpp"

namespace confvisc {

namespace {

void check_dimension(int n, const Jet2& jet) {
  if (n < 3) throw Error(ErrorCode::BadDimension, "the conformal Hessian needs n >= 3");
  if (jet.n() != n) throw Error(ErrorCode::BadDimension, "jet dimension differs from n");
}

ConformalJet finish(SymMatrix a, Jet2 u_jet) {
  ConformalJet cj;
  cj.lambda = eigen_sym(a);
  cj.A = std::move(a);
  cj.u_jet = std::move(u_jet);
  return cj;
}

}  // namespace

ConformalJet conformal_hessian(const Jet2& u, int n) {
  check_dimension(n, u);
  if (!(u.value > 0.0)) throw Error(ErrorCode::NonPositiveU, "u must be positive");
  const double m = n - 2.0;
  const double first = std::pow(u.value, -(n + 2.0) / m);
  const double second = std::pow(u.value, -2.0 * n / m);
  SymMatrix a = (-2.0 / m * first) * u.hessian;
  a += (2.0 * n / (m * m) * second) * SymMatrix::outer(u.gradient);
  a -= (2.0 / (m * m) * second * u.gradient.squaredNorm()) * SymMatrix::identity(n);
  return finish(std::move(a), u);
}

ConformalJet conformal_hessian_psi(const Jet2& psi, int n) {
  check_dimension(n, psi);
  const double m = n - 2.0;
  const double w = std::exp(4.0 * psi.value / m);
  SymMatrix a = (2.0 / m) * psi.hessian;
  a += (4.0 / (m * m)) * SymMatrix::outer(psi.gradient);
  a -= (2.0 / (m * m) * psi.gradient.squaredNorm()) * SymMatrix::identity(n);
  a *= w;
  return finish(std::move(a), u_jet_from_log(psi));
}

namespace {

OperatorValue evaluate(ConformalJet cj, const OperatorSpec& spec) {
  const Vec& l = cj.lambda.eigenvalues;
  OperatorValue ov;
  ov.value = f_eval(std::span<const double>(l.data(), static_cast<std::size_t>(l.size())), spec);
  ov.jet = std::move(cj);
  return ov;
}

}  // namespace

OperatorValue evaluate_jet(const Jet2& u_jet, const OperatorSpec& spec) {
  return evaluate(conformal_hessian(u_jet, spec.n), spec);
}

OperatorValue evaluate_psi_jet(const Jet2& psi_jet, const OperatorSpec& spec) {
  return evaluate(conformal_hessian_psi(psi_jet, spec.n), spec);
}

OperatorValue evaluate_operator(const AnalyticField& field, const Vec& x, const OperatorSpec& spec) {
  if (field.n() != spec.n) throw Error(ErrorCode::BadDimension, "field and operator dimensions differ");
  return evaluate_jet(field.jet_u(x), spec);
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::StrictSub: return "StrictSub";
    case Verdict::StrictSuper: return "StrictSuper";
    case Verdict::OnLevel: return "OnLevel";
    case Verdict::OnConeBoundary: return "OnConeBoundary";
    case Verdict::OutsideClosedCone: return "OutsideClosedCone";
    case Verdict::ConeViolation: return "ConeViolation";
    case Verdict::Kink: return "Kink";
  }
  return "?";
}

std::string_view to_string(Aggregate a) noexcept {
  switch (a) {
    case Aggregate::Solution: return "Solution";
    case Aggregate::SubSolution: return "SubSolution";
    case Aggregate::SuperSolution: return "SuperSolution";
    case Aggregate::Mixed: return "Mixed";
  }
  return "?";
}

bool is_super_side(Verdict v) noexcept {
  return v == Verdict::StrictSuper || v == Verdict::OnConeBoundary || v == Verdict::OutsideClosedCone;
}

PointVerdict judge(const Vec& x, const OperatorValue& ov, const OperatorSpec& spec, double tol) {
  PointVerdict pv;
  pv.x = x;
  pv.value = ov.value;
  const Vec& l = ov.jet.lambda.eigenvalues;
  pv.min_eigenvalue = l.minCoeff();
  const std::span<const double> ls(l.data(), static_cast<std::size_t>(l.size()));
  if (!ov.value) {
    const auto ext = f_extended(ls, spec);
    pv.verdict = ext && *ext >= spec.level ? Verdict::ConeViolation : Verdict::OutsideClosedCone;
    pv.margin = ext ? *ext - spec.level : -std::numeric_limits<double>::infinity();
    return pv;
  }
  const double dev = *ov.value - spec.level;
  pv.margin = dev;
  const bool open = in_cone(ls, spec.cone);
  if (!open) pv.verdict = Verdict::OnConeBoundary;
  else if (std::abs(dev) <= tol) pv.verdict = Verdict::OnLevel;
  else if (dev > 0.0) pv.verdict = Verdict::StrictSub;
  else pv.verdict = Verdict::StrictSuper;
  return pv;
}

int Classification::count(Verdict v) const {
  return static_cast<int>(std::count_if(points.begin(), points.end(), [v](const auto& p) { return p.verdict == v; }));
}

Classification aggregate(std::vector<PointVerdict> points, const OperatorSpec& spec, double tol) {
  Classification c;
  c.points = std::move(points);
  c.tol = tol;
  c.boundary_tol = spec.boundary_tol;
  c.level = spec.level;
  bool any = false, all_level = true, sub_ok = true, super_ok = true, violation = false;
  double min_sub = std::numeric_limits<double>::infinity(), min_super = min_sub;
  for (const auto& p : c.points) {
    if (p.verdict == Verdict::Kink) continue;
    any = true;
    if (p.value) c.max_level_deviation = std::max(c.max_level_deviation, std::abs(p.margin));
    if (p.verdict == Verdict::ConeViolation) violation = true;
    if (p.verdict != Verdict::OnLevel) all_level = false;
    if (p.verdict != Verdict::OnLevel && p.verdict != Verdict::StrictSub) sub_ok = false;
    if (p.verdict != Verdict::OnLevel && !is_super_side(p.verdict)) super_ok = false;
    if (p.verdict == Verdict::StrictSub) min_sub = std::min(min_sub, p.margin);
    if (p.verdict == Verdict::StrictSuper) min_super = std::min(min_super, -p.margin);
  }
  if (!any) throw Error(ErrorCode::EmptyRegion, "no classifiable points");
  c.min_sub_margin = std::isfinite(min_sub) ? min_sub : 0.0;
  c.min_super_margin = std::isfinite(min_super) ? min_super : 0.0;
  if (violation) c.aggregate = Aggregate::Mixed;
  else if (all_level) c.aggregate = Aggregate::Solution;
  else if (sub_ok) c.aggregate = Aggregate::SubSolution;
  else if (super_ok) c.aggregate = Aggregate::SuperSolution;
  else c.aggregate = Aggregate::Mixed;
  return c;
}

Classification classify(const AnalyticField& field, const std::vector<Vec>& points, const OperatorSpec& spec,
                        double tol) {
  spec.validate();
  if (points.empty()) throw Error(ErrorCode::EmptyRegion, "no evaluation points");
  std::vector<PointVerdict> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    out[i] = judge(points[i], evaluate_operator(field, points[i], spec), spec, tol);
  });
  return aggregate(std::move(out), spec, tol);
}

Classification classify(const GridField& field, const OperatorSpec& spec, double tol) {
  spec.validate();
  if (field.kind() != GridField::Kind::U) throw Error(ErrorCode::BadParams, "classification needs a u-grid");
  if (field.n() != spec.n) throw Error(ErrorCode::BadDimension, "grid and operator dimensions differ");
  const auto& g = field.spec();
  std::vector<std::size_t> nodes;
  for (std::size_t f = 0; f < g.size(); ++f)
    if (g.interior(g.unflat(f))) nodes.push_back(f);
  if (nodes.empty()) throw Error(ErrorCode::EmptyRegion, "grid has no interior nodes");
  std::vector<PointVerdict> out(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const Index idx = g.unflat(nodes[i]);
    out[i] = judge(g.coords(idx), evaluate_jet(fd_jet(field, idx), spec), spec, tol);
  });
  return aggregate(std::move(out), spec, tol);
}

double grid_verdict_tolerance(const GridSpec& grid) {
  const double h = grid.spacing.maxCoeff();
  return 10.0 * h * h;
}

std::string classification_csv(const Classification& c) {
  const int n = c.points.empty() ? 0 : static_cast<int>(c.points.front().x.size());
  auto cols = axis_columns("x", n);
  for (const char* s : {"value", "min_eigenvalue", "verdict", "margin"}) cols.emplace_back(s);
  CsvTable t(cols);
  for (const auto& p : c.points) {
    t.row().cells(p.x);
    if (p.value) t.cell(*p.value);
    else t.cell(std::string_view{});
    t.cell(p.min_eigenvalue).cell(to_string(p.verdict)).cell(p.margin);
  }
  return t.str();
}

nlohmann::json classification_json(const Classification& c) {
  nlohmann::json counts = nlohmann::json::object();
  for (Verdict v : {Verdict::StrictSub, Verdict::StrictSuper, Verdict::OnLevel, Verdict::OnConeBoundary,
                    Verdict::OutsideClosedCone, Verdict::ConeViolation, Verdict::Kink})
    counts[std::string(to_string(v))] = c.count(v);
  return {
      {"aggregate", std::string(to_string(c.aggregate))},
      {"points", c.points.size()},
      {"counts", counts},
      {"tol", c.tol},
      {"boundary_tol", c.boundary_tol},
      {"level", c.level},
      {"max_level_deviation", c.max_level_deviation},
      {"min_sub_margin", c.min_sub_margin},
      {"min_super_margin", c.min_super_margin},
  };
}

}  // namespace confvisc
