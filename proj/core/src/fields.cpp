#include "confvisc/fields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "confvisc/parallel.hpp"
#include "confvisc/symfun.hpp"

namespace confvisc {

void BubbleParams::validate(int n) const {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::BadParams, "bubble needs a > 0 and b > 0");
  if (x0.size() != n) throw Error(ErrorCode::BadDimension, "bubble center has the wrong dimension");
}

BubbleParams tuned_bubble(const OperatorSpec& spec, double a, Vec x0) {
  const double t = solve_diagonal_level(spec, spec.level);
  return BubbleParams{a, a * std::sqrt(t / 2.0), std::move(x0)};
}

void RadialTable::validate() const {
  const auto m = r.size();
  if (m < 2 || g.size() != m || dg.size() != m || d2g.size() != m)
    throw Error(ErrorCode::BadParams, "radial table needs at least two complete rows");
  if (r.front() < 0.0) throw Error(ErrorCode::BadParams, "radial table radii must be non-negative");
  for (std::size_t i = 1; i < m; ++i)
    if (!(r[i] > r[i - 1])) throw Error(ErrorCode::BadParams, "radial table radii must increase");
}

std::array<double, 3> RadialTable::eval(double s) const {
  if (s < r.front() || s > r.back()) throw Error(ErrorCode::OutOfDomain, "radius outside the radial table");
  auto it = std::upper_bound(r.begin(), r.end(), s);
  std::size_t i = it == r.begin() ? 0 : static_cast<std::size_t>(it - r.begin()) - 1;
  if (i + 1 >= r.size()) i = r.size() - 2;
  const double len = r[i + 1] - r[i];
  const double g0 = g[i], d0 = len * dg[i], e0 = len * len * d2g[i];
  const double g1 = g[i + 1], d1 = len * dg[i + 1], e1 = len * len * d2g[i + 1];
  const double c[6] = {
      g0,
      d0,
      0.5 * e0,
      -10 * g0 - 6 * d0 - 1.5 * e0 + 10 * g1 - 4 * d1 + 0.5 * e1,
      15 * g0 + 8 * d0 + 1.5 * e0 - 15 * g1 + 7 * d1 - e1,
      -6 * g0 - 3 * d0 - 0.5 * e0 + 6 * g1 - 3 * d1 + 0.5 * e1,
  };
  const double t = (s - r[i]) / len;
  double p = 0, dp = 0, d2p = 0;
  for (int k = 5; k >= 0; --k) p = p * t + c[k];
  for (int k = 5; k >= 1; --k) dp = dp * t + k * c[k];
  for (int k = 5; k >= 2; --k) d2p = d2p * t + k * (k - 1) * c[k];
  return {p, dp / len, d2p / (len * len)};
}

struct AnalyticField::Node {
  Kind kind = Kind::Constant;
  int n = 0;
  double c = 1.0;
  BubbleParams bubble;
  Vec center;
  double radius = 1.0;
  RadialTable table;
  std::optional<MobiusMap> map;
  std::shared_ptr<const Node> inner;
};

namespace {

using Node = AnalyticField::Node;

double node_value(const Node& nd, const Vec& x);
Jet2 node_jet(const Node& nd, const Vec& x);

void check_point(const Node& nd, const Vec& x) {
  if (x.size() != nd.n) throw Error(ErrorCode::BadDimension, "point dimension differs from field dimension");
}

double bubble_value(const BubbleParams& p, int n, const Vec& x) {
  const double q = 1.0 + p.b * p.b * (x - p.x0).squaredNorm();
  return std::pow(p.a / q, 0.5 * (n - 2));
}

Jet2 bubble_jet(const BubbleParams& p, int n, const Vec& x) {
  const double m = 0.5 * (n - 2);
  const Vec d = x - p.x0;
  const double b2 = p.b * p.b;
  const double q = 1.0 + b2 * d.squaredNorm();
  const double v = std::pow(p.a / q, m);
  // v = a^m q^-m, dq = 2 b^2 d.
  const Vec grad = (-2.0 * m * b2 * v / q) * d;
  SymMatrix hess = (-2.0 * m * b2 * v / q) * SymMatrix::identity(n);
  hess += (4.0 * m * (m + 1.0) * b2 * b2 * v / (q * q)) * SymMatrix::outer(d);
  return Jet2(v, grad, hess);
}

Jet2 radial_jet(const Node& nd, const Vec& x) {
  const Vec d = x - nd.center;
  const double r = d.norm();
  const auto [g, dg, d2g] = nd.table.eval(r);
  if (!(g > 0.0)) throw Error(ErrorCode::NonPositiveU, "radial profile is not positive");
  const int n = nd.n;
  if (r < 1e-12) {
    if (std::abs(dg) > 1e-9) throw Error(ErrorCode::OutOfDomain, "radial profile has a cusp at its center");
    return Jet2(g, Vec::Zero(n), d2g * SymMatrix::identity(n));
  }
  const Vec e = d / r;
  const SymMatrix ee = SymMatrix::outer(e);
  return Jet2(g, dg * e, d2g * ee + (dg / r) * (SymMatrix::identity(n) - ee));
}

double kelvin_radius_check(const Node& nd, const Vec& y) {
  const double r2 = (y - nd.center).squaredNorm();
  if (std::sqrt(r2) <= kPoleTolerance * nd.radius)
    throw Error(ErrorCode::OutOfDomain, "Kelvin transform evaluated at its center");
  return r2;
}

double kelvin_value(const Node& nd, const Vec& y) {
  const double r2 = kelvin_radius_check(nd, y);
  const double l2 = nd.radius * nd.radius;
  const Vec z = nd.center + (l2 / r2) * (y - nd.center);
  return std::pow(l2 / r2, 0.5 * (nd.n - 2)) * node_value(*nd.inner, z);
}

Jet2 kelvin_jet(const Node& nd, const Vec& y) {
  const int n = nd.n;
  const double r2 = kelvin_radius_check(nd, y);
  const double r4 = r2 * r2, r6 = r4 * r2;
  const double l2 = nd.radius * nd.radius;
  const double m = 0.5 * (n - 2);
  const Vec d = y - nd.center;

  MapJet z;
  z.value = nd.center + (l2 / r2) * d;
  z.jacobian = l2 * (Mat::Identity(n, n) / r2 - 2.0 * d * d.transpose() / r4);
  z.second.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    Mat& s = z.second[static_cast<std::size_t>(i)];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double v = 8.0 * d[i] * d[a] * d[b] / r6;
        if (i == a) v -= 2.0 * d[b] / r4;
        if (i == b) v -= 2.0 * d[a] / r4;
        if (a == b) v -= 2.0 * d[i] / r4;
        s(a, b) = l2 * v;
      }
  }
  const Jet2 inner = pull_back_scalar(node_jet(*nd.inner, z.value), z);

  Jet2 log_weight;
  log_weight.value = m * std::log(l2 / r2);
  log_weight.gradient = (-2.0 * m / r2) * d;
  log_weight.hessian = (-2.0 * m / r2) * SymMatrix::identity(n) + (4.0 * m / r4) * SymMatrix::outer(d);
  return product(exp_jet(log_weight), inner);
}

double pullback_value(const Node& nd, const Vec& x) {
  const double det = jacobian_det(*nd.map, x);
  return std::pow(det, (nd.n - 2.0) / (2.0 * nd.n)) * node_value(*nd.inner, apply_map(*nd.map, x));
}

Jet2 pullback_jet(const Node& nd, const Vec& x) {
  const MapJet mj = map_jet(*nd.map, x);
  const Jet2 inner = pull_back_scalar(node_jet(*nd.inner, mj.value), mj);
  return product(exp_jet(0.5 * (nd.n - 2) * mj.log_factor), inner);
}

double node_value(const Node& nd, const Vec& x) {
  check_point(nd, x);
  switch (nd.kind) {
    case AnalyticField::Kind::Constant: return nd.c;
    case AnalyticField::Kind::Bubble: return bubble_value(nd.bubble, nd.n, x);
    case AnalyticField::Kind::RadialProfile: {
      const double g = nd.table.eval((x - nd.center).norm())[0];
      if (!(g > 0.0)) throw Error(ErrorCode::NonPositiveU, "radial profile is not positive");
      return g;
    }
    case AnalyticField::Kind::KelvinOf: return kelvin_value(nd, x);
    case AnalyticField::Kind::MobiusPullback: return pullback_value(nd, x);
    case AnalyticField::Kind::ScalarMultiple: return nd.c * node_value(*nd.inner, x);
  }
  return 0.0;
}

Jet2 node_jet(const Node& nd, const Vec& x) {
  check_point(nd, x);
  switch (nd.kind) {
    case AnalyticField::Kind::Constant: return Jet2::constant(nd.n, nd.c);
    case AnalyticField::Kind::Bubble: return bubble_jet(nd.bubble, nd.n, x);
    case AnalyticField::Kind::RadialProfile: return radial_jet(nd, x);
    case AnalyticField::Kind::KelvinOf: return kelvin_jet(nd, x);
    case AnalyticField::Kind::MobiusPullback: return pullback_jet(nd, x);
    case AnalyticField::Kind::ScalarMultiple: return nd.c * node_jet(*nd.inner, x);
  }
  return {};
}

std::string vec_text(const Vec& v) {
  std::ostringstream o;
  o << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) o << (i ? ", " : "") << v[i];
  o << ')';
  return o.str();
}

std::string node_text(const Node& nd) {
  std::ostringstream o;
  switch (nd.kind) {
    case AnalyticField::Kind::Constant: o << "constant(" << nd.c << ")"; break;
    case AnalyticField::Kind::Bubble:
      o << "bubble(a=" << nd.bubble.a << ", b=" << nd.bubble.b << ", x0=" << vec_text(nd.bubble.x0) << ")";
      break;
    case AnalyticField::Kind::RadialProfile:
      o << "radial(center=" << vec_text(nd.center) << ", rows=" << nd.table.r.size() << ")";
      break;
    case AnalyticField::Kind::KelvinOf:
      o << "kelvin(" << node_text(*nd.inner) << ", x=" << vec_text(nd.center) << ", lambda=" << nd.radius << ")";
      break;
    case AnalyticField::Kind::MobiusPullback:
      o << "pullback(" << node_text(*nd.inner) << ", ops=" << nd.map->ops().size() << ")";
      break;
    case AnalyticField::Kind::ScalarMultiple: o << nd.c << "*" << node_text(*nd.inner); break;
  }
  return o.str();
}

std::shared_ptr<Node> make_node(AnalyticField::Kind kind, int n) {
  auto nd = std::make_shared<Node>();
  nd->kind = kind;
  nd->n = n;
  return nd;
}

}  // namespace

AnalyticField AnalyticField::constant(int n, double c) {
  if (n < 1) throw Error(ErrorCode::BadDimension, "dimension must be positive");
  if (!(c > 0.0)) throw Error(ErrorCode::NonPositiveU, "constant field must be positive");
  auto nd = make_node(Kind::Constant, n);
  nd->c = c;
  return AnalyticField(nd);
}

AnalyticField AnalyticField::bubble(int n, BubbleParams p) {
  if (n < 3) throw Error(ErrorCode::BadDimension, "bubbles need n >= 3");
  p.validate(n);
  auto nd = make_node(Kind::Bubble, n);
  nd->bubble = std::move(p);
  return AnalyticField(nd);
}

AnalyticField AnalyticField::radial(int n, Vec center, RadialTable table) {
  if (center.size() != n) throw Error(ErrorCode::BadDimension, "radial center has the wrong dimension");
  table.validate();
  auto nd = make_node(Kind::RadialProfile, n);
  nd->center = std::move(center);
  nd->table = std::move(table);
  return AnalyticField(nd);
}

AnalyticField AnalyticField::kelvin_of(AnalyticField w, Vec center, double radius) {
  if (center.size() != w.n()) throw Error(ErrorCode::DomainMismatch, "Kelvin center has the wrong dimension");
  if (!(radius > 0.0)) throw Error(ErrorCode::BadParams, "Kelvin radius must be positive");
  auto nd = make_node(Kind::KelvinOf, w.n());
  nd->center = std::move(center);
  nd->radius = radius;
  nd->inner = w.node_;
  return AnalyticField(nd);
}

AnalyticField AnalyticField::pullback(AnalyticField w, MobiusMap phi) {
  if (phi.n() != w.n()) throw Error(ErrorCode::DomainMismatch, "map and field dimensions differ");
  auto nd = make_node(Kind::MobiusPullback, w.n());
  nd->map = std::move(phi);
  nd->inner = w.node_;
  return AnalyticField(nd);
}

AnalyticField AnalyticField::scaled(double c, AnalyticField w) {
  if (!(c > 0.0)) throw Error(ErrorCode::NonPositiveU, "scale factor must be positive");
  auto nd = make_node(Kind::ScalarMultiple, w.n());
  nd->c = c;
  nd->inner = w.node_;
  return AnalyticField(nd);
}

int AnalyticField::n() const { return node_->n; }
AnalyticField::Kind AnalyticField::kind() const { return node_->kind; }
std::string AnalyticField::describe() const { return node_text(*node_); }

const BubbleParams* AnalyticField::bubble_params() const {
  return node_->kind == Kind::Bubble ? &node_->bubble : nullptr;
}

double AnalyticField::value(const Vec& x) const { return node_value(*node_, x); }
Jet2 AnalyticField::jet_u(const Vec& x) const { return node_jet(*node_, x); }
Jet2 AnalyticField::jet_psi(const Vec& x) const { return log_jet_from_u(jet_u(x)); }

GridField sample(const AnalyticField& field, const GridSpec& grid, BoundaryPolicy policy) {
  grid.validate();
  if (grid.n() != field.n()) throw Error(ErrorCode::DomainMismatch, "grid and field dimensions differ");
  std::vector<double> values(grid.size());
  parallel_for(values.size(), [&](std::size_t f) { values[f] = field.value(grid.coords(f)); });
  return GridField(grid, std::move(values), GridField::Kind::U, policy);
}

PsiField::PsiField(int n, ValueFn value, JetFn jet, RegularFn regular, std::string name)
    : n_(n), value_(std::move(value)), jet_(std::move(jet)), regular_(std::move(regular)), name_(std::move(name)) {}

PsiField PsiField::from_analytic(const AnalyticField& u) {
  return PsiField(
      u.n(), [u](const Vec& x) { return -std::log(u.value(x)); }, [u](const Vec& x) { return u.jet_psi(x); },
      {}, "-ln " + u.describe());
}

PsiField PsiField::max_of(PsiField p, PsiField q, double kink_tol) {
  if (p.n() != q.n()) throw Error(ErrorCode::DomainMismatch, "max of fields of different dimension");
  const int n = p.n();
  auto value = [p, q](const Vec& x) { return std::max(p.value(x), q.value(x)); };
  auto jet = [p, q](const Vec& x) { return p.value(x) >= q.value(x) ? p.jet(x) : q.jet(x); };
  auto regular = [p, q, kink_tol](const Vec& x) {
    return p.regular(x) && q.regular(x) && std::abs(p.value(x) - q.value(x)) > kink_tol;
  };
  return PsiField(n, value, jet, regular, "max(" + p.name() + ", " + q.name() + ")");
}

int ScalarField::n() const {
  return std::visit([](const auto& f) { return f.n(); }, field_);
}

double ScalarField::value(const Vec& x) const {
  if (const auto* a = analytic()) return a->value(x);
  return multilinear(*grid(), x);
}

std::string ScalarField::describe() const {
  if (const auto* a = analytic()) return a->describe();
  std::ostringstream o;
  o << "grid(" << grid()->size() << " nodes)";
  return o.str();
}

}  // namespace confvisc
