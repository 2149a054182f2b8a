#include "confvisc/mobius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "confvisc/parallel.hpp"
#include "confvisc/report.hpp"
#include "confvisc/rng.hpp"

namespace confvisc {

AnalyticField pullback_field(const AnalyticField& w, const MobiusMap& phi) {
  return AnalyticField::pullback(w, phi);
}

AnalyticField kelvin(const AnalyticField& w, const KelvinTransform& kt) {
  return AnalyticField::kelvin_of(w, kt.x, kt.lam);
}

AnalyticField kelvin_via_map(const AnalyticField& w, const KelvinTransform& kt) {
  if (kt.x.size() != w.n()) throw Error(ErrorCode::DomainMismatch, "Kelvin center has the wrong dimension");
  return AnalyticField::pullback(w, MobiusMap::sphere_inversion(kt.x, kt.lam));
}

MobiusMap random_mobius_map(int n, int ops, Rng& rng) {
  std::vector<MobiusOp> list;
  for (int i = 0; i < ops; ++i) {
    switch (rng.below(3)) {
      case 0: list.push_back(MobiusOp::translate(rng.uniform_box(n, -1.0, 1.0))); break;
      case 1: list.push_back(MobiusOp::dilate(std::exp(rng.uniform(std::log(0.5), std::log(2.0))))); break;
      default: list.push_back(MobiusOp::invert(rng.uniform_box(n, -2.0, 2.0))); break;
    }
  }
  return MobiusMap(n, std::move(list));
}

double pole_distance(const MobiusMap& phi, const Vec& x) {
  double best = std::numeric_limits<double>::infinity();
  Vec y = x;
  for (const auto& op : phi.ops()) {
    switch (op.kind) {
      case MobiusOp::Kind::Translate: y += op.vector; break;
      case MobiusOp::Kind::Dilate: y *= op.factor; break;
      case MobiusOp::Kind::Invert: {
        const Vec w = y - op.vector;
        const double r2 = w.squaredNorm();
        best = std::min(best, std::sqrt(r2));
        if (r2 == 0.0) return 0.0;
        y = op.vector + w / r2;
        break;
      }
    }
  }
  return best;
}

namespace {

double eigen_gap(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }

double value_gap(const std::optional<double>& a, const std::optional<double>& b) {
  if (a && b) return std::abs(*a - *b);
  if (!a && !b) return 0.0;
  return std::numeric_limits<double>::infinity();
}

InvarianceReport finish(std::vector<InvariancePoint> pts, double tol) {
  InvarianceReport r;
  r.points = std::move(pts);
  r.tol = tol;
  for (const auto& p : r.points) {
    r.max_discrepancy = std::max(r.max_discrepancy, p.discrepancy);
    r.max_eigen_discrepancy = std::max(r.max_eigen_discrepancy, p.eigen_discrepancy);
  }
  r.pass = !r.points.empty() && r.max_discrepancy <= tol && r.max_eigen_discrepancy <= tol;
  return r;
}

template <class LeftJet>
InvarianceReport compare(const AnalyticField& w, const MobiusMap& phi, const std::vector<Vec>& points,
                         const OperatorSpec& spec, double tol, LeftJet&& left) {
  spec.validate();
  if (w.n() != spec.n || phi.n() != spec.n) throw Error(ErrorCode::BadDimension, "dimension mismatch");
  std::vector<InvariancePoint> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const Vec& x = points[i];
    const OperatorValue lhs = evaluate_jet(left(x), spec);
    const OperatorValue rhs = evaluate_operator(w, apply_map(phi, x), spec);
    InvariancePoint p;
    p.x = x;
    p.lhs = lhs.value;
    p.rhs = rhs.value;
    p.discrepancy = value_gap(lhs.value, rhs.value);
    p.eigen_discrepancy = eigen_gap(lhs.jet.lambda.eigenvalues, rhs.jet.lambda.eigenvalues);
    out[i] = std::move(p);
  });
  return finish(std::move(out), tol);
}

}  // namespace

InvarianceReport check_conformal_invariance(const AnalyticField& w, const MobiusMap& phi,
                                            const std::vector<Vec>& points, const OperatorSpec& spec,
                                            double tol) {
  const AnalyticField pulled = pullback_field(w, phi);
  return compare(w, phi, points, spec, tol, [&](const Vec& x) { return pulled.jet_u(x); });
}

InvarianceReport check_conformal_invariance_fd(const AnalyticField& w, const MobiusMap& phi,
                                               const std::vector<Vec>& points, const OperatorSpec& spec,
                                               double h, double tol) {
  const AnalyticField pulled = pullback_field(w, phi);
  auto f = [&](const Vec& y) { return pulled.value(y); };
  return compare(w, phi, points, spec, tol, [&](const Vec& x) { return fd_jet_of(f, x, h); });
}

std::string invariance_csv(const InvarianceReport& r) {
  const int n = r.points.empty() ? 0 : static_cast<int>(r.points.front().x.size());
  auto cols = axis_columns("x", n);
  for (const char* s : {"lhs", "rhs", "discrepancy", "eigen_discrepancy"}) cols.emplace_back(s);
  CsvTable t(cols);
  for (const auto& p : r.points) {
    t.row().cells(p.x);
    p.lhs ? t.cell(*p.lhs) : t.cell(std::string_view{});
    p.rhs ? t.cell(*p.rhs) : t.cell(std::string_view{});
    t.cell(p.discrepancy).cell(p.eigen_discrepancy);
  }
  return t.str();
}

nlohmann::json invariance_json(const InvarianceReport& r) {
  return {{"verdict", r.pass ? "PASS" : "FAIL"},
          {"points", r.points.size()},
          {"max_discrepancy", r.max_discrepancy},
          {"max_eigen_discrepancy", r.max_eigen_discrepancy},
          {"tol", r.tol}};
}

}  // namespace confvisc
