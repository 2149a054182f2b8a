#include "confvisc/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>

#include "confvisc/parallel.hpp"
#include "confvisc/report.hpp"
#include "confvisc/rng.hpp"

namespace confvisc {

std::string_view to_string(ContactVerdict v) noexcept {
  switch (v) {
    case ContactVerdict::IdenticallyEqual: return "IdenticallyEqual";
    case ContactVerdict::StrictlyOrdered: return "StrictlyOrdered";
    case ContactVerdict::ContactDetected: return "ContactDetected";
  }
  return "?";
}

namespace {

ContactReport contact_from_gaps(const std::vector<double>& gaps, double tol,
                                const std::function<std::string(std::size_t)>& where) {
  if (gaps.empty()) throw Error(ErrorCode::EmptyRegion, "no points to compare");
  ContactReport r;
  r.min_gap = std::numeric_limits<double>::infinity();
  r.max_gap = -r.min_gap;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] < r.min_gap) {
      r.min_gap = gaps[i];
      worst = i;
    }
    r.max_gap = std::max(r.max_gap, gaps[i]);
    if (gaps[i] <= tol) r.contact_set.push_back(i);
  }
  if (r.min_gap < -tol)
    throw Error(ErrorCode::OrderViolation, "psi1 exceeds psi2 by " + format_double(-r.min_gap) + " at " + where(worst));
  if (std::max(std::abs(r.min_gap), std::abs(r.max_gap)) <= tol) r.verdict = ContactVerdict::IdenticallyEqual;
  else if (r.contact_set.empty()) r.verdict = ContactVerdict::StrictlyOrdered;
  else r.verdict = ContactVerdict::ContactDetected;
  return r;
}

std::string point_text(const Vec& x) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) s += (i ? ", " : "") + format_double(x[i]);
  return s + ")";
}

}  // namespace

ContactReport detect_contact(const GridField& psi1, const GridField& psi2, double contact_tol) {
  if (psi1.size() != psi2.size() || psi1.spec().extents != psi2.spec().extents)
    throw Error(ErrorCode::DomainMismatch, "fields live on different grids");
  std::vector<double> gaps(psi1.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) gaps[i] = psi2[i] - psi1[i];
  return contact_from_gaps(gaps, contact_tol,
                           [&](std::size_t i) { return "node " + std::to_string(i) + " " + point_text(psi1.spec().coords(i)); });
}

ContactReport detect_contact(const PsiField& psi1, const PsiField& psi2, const std::vector<Vec>& points,
                             double contact_tol) {
  std::vector<double> gaps(points.size());
  parallel_for(points.size(), [&](std::size_t i) { gaps[i] = psi2.value(points[i]) - psi1.value(points[i]); });
  return contact_from_gaps(gaps, contact_tol, [&](std::size_t i) { return point_text(points[i]); });
}

double DeformationParams::max_A_radius(double alpha) { return std::numbers::pi / (3.0 * std::sqrt(alpha)); }

double DeformationParams::tau0() const {
  const double closest = std::max(0.0, xhat.norm() - A_radius);
  return std::exp(-alpha * closest * closest) - std::exp(-alpha * R * R);
}

void DeformationParams::validate(int n) const {
  if (xhat.size() != n) throw Error(ErrorCode::BadParams, "xhat has the wrong dimension");
  if (!(alpha > 0.0) || !(R > 0.0) || !(mu >= 0.0)) throw Error(ErrorCode::BadParams, "need alpha > 0, R > 0, mu >= 0");
  if (std::abs(xhat.norm() - R) > 1e-9 * R) throw Error(ErrorCode::BadParams, "xhat must lie on the sphere |x| = R");
  if (!(A_radius > 0.0) || A_radius > max_A_radius(alpha) * (1.0 + 1e-12) || A_radius >= R)
    throw Error(ErrorCode::BadParams, "A_radius must lie in (0, min(R, pi/(3 sqrt(alpha)))]");
  if (tau < 0.0 || tau > tau0() * (1.0 + 1e-12)) throw Error(ErrorCode::BadParams, "tau must lie in [0, tau0]");
}

Jet2 deformation_bump(const DeformationParams& p, const Vec& x) {
  const int n = static_cast<int>(x.size());
  const double a = p.alpha, ra = std::sqrt(a);
  const double e = std::exp(-a * x.squaredNorm());
  const double h = e - std::exp(-a * p.R * p.R);
  const double arg = ra * (x[0] - p.xhat[0]);
  const double zeta = std::cos(arg), sine = std::sin(arg);
  const double ht = h - p.tau;
  const Vec e1 = Vec::Unit(n, 0);

  Jet2 out;
  out.value = ht * zeta;
  out.gradient = (-2.0 * a * e * zeta) * x - (ra * ht * sine) * e1;
  SymMatrix hess = (2.0 * a * e * zeta) * (2.0 * a * SymMatrix::outer(x) - SymMatrix::identity(n));
  Mat cross = x * e1.transpose();
  cross += cross.transpose().eval();
  hess += (2.0 * a * ra * e * sine) * SymMatrix::from_upper(cross);
  hess.set(0, 0, hess(0, 0) - a * ht * zeta);
  out.hessian = std::move(hess);
  return out;
}

PsiField build_deformation(const PsiField& psi, const DeformationParams& params, int sign) {
  params.validate(psi.n());
  if (sign != 1 && sign != -1) throw Error(ErrorCode::BadParams, "sign must be +1 or -1");
  const double s = sign * params.mu;
  auto value = [psi, params, s](const Vec& x) { return psi.value(x) + s * deformation_bump(params, x).value; };
  auto jet = [psi, params, s](const Vec& x) { return psi.jet(x) + s * deformation_bump(params, x); };
  auto regular = [psi](const Vec& x) { return psi.regular(x); };
  return PsiField(psi.n(), value, jet, regular, psi.name() + (sign < 0 ? " - " : " + ") + "mu (h - tau) zeta");
}

std::vector<Vec> sample_lens(const DeformationParams& p, int count, Rng& rng) {
  std::vector<Vec> pts;
  const Vec inward = -p.xhat / p.xhat.norm();
  const int radial = std::max(2, count / 10);
  for (int i = 0; i < radial; ++i) pts.push_back(p.xhat + (p.A_radius * i / (radial - 1.0)) * inward);
  int guard = 0;
  while (static_cast<int>(pts.size()) < count && guard++ < 1000 * count) {
    Vec y = rng.in_ball(p.xhat, p.A_radius);
    if (y.norm() <= p.R) pts.push_back(std::move(y));
  }
  return pts;
}

namespace {

DeformationReport margins(const PsiField& base, const DeformationParams& params, const OperatorSpec& spec,
                          const std::vector<Vec>& lens, int sign) {
  spec.validate();
  if (lens.empty()) throw Error(ErrorCode::EmptyRegion, "empty sample of A");
  DeformationReport rep;
  rep.params = params;
  rep.tau0 = params.tau0();
  rep.beta_min = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (double tau : {0.0, 0.5 * rep.tau0, rep.tau0}) {
    DeformationParams p = params;
    p.tau = tau;
    const PsiField tilde = build_deformation(base, p, sign);
    std::vector<std::optional<double>> vals(lens.size());
    parallel_for(lens.size(), [&](std::size_t i) { vals[i] = evaluate_psi_jet(tilde.jet(lens[i]), spec).value; });
    MarginRow row;
    row.tau = tau;
    row.extreme_value = sign < 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& v : vals) {
      if (!v) {
        ++row.outside_cone;
        continue;
      }
      any = true;
      row.extreme_value = sign < 0 ? std::max(row.extreme_value, *v) : std::min(row.extreme_value, *v);
    }
    if (sign < 0) {
      // Outside the closed cone counts toward the super side; an all-outside
      // sample has no finite maximum and passes trivially.
      row.beta = any ? (spec.level - row.extreme_value) / p.mu : std::numeric_limits<double>::infinity();
    } else {
      row.beta = row.outside_cone > 0 ? -std::numeric_limits<double>::infinity()
                                      : (row.extreme_value - spec.level) / p.mu;
    }
    if (!(row.beta > 0.0)) ok = false;
    rep.beta_min = std::min(rep.beta_min, row.beta);
    rep.rows.push_back(row);
  }
  rep.pass = ok;
  return rep;
}

}  // namespace

DeformationReport verify_strict_supersolution(const PsiField& psi2, const DeformationParams& params,
                                              const OperatorSpec& spec, const std::vector<Vec>& lens) {
  return margins(psi2, params, spec, lens, -1);
}

DeformationReport verify_strict_subsolution(const PsiField& psi1, const DeformationParams& params,
                                            const OperatorSpec& spec, const std::vector<Vec>& lens) {
  return margins(psi1, params, spec, lens, +1);
}

AlphaSearch search_alpha(const PsiField& psi2, DeformationParams base, const OperatorSpec& spec, int samples,
                         std::uint64_t seed, int max_doublings, int mu_halvings) {
  AlphaSearch out;
  const double alpha0 = base.alpha, mu0 = base.mu, a_cap = base.A_radius;
  for (int j = 0; j <= max_doublings; ++j) {
    DeformationParams p = base;
    p.alpha = alpha0 * std::ldexp(1.0, j);
    p.A_radius = std::min(a_cap > 0.0 ? a_cap : std::numeric_limits<double>::infinity(),
                          DeformationParams::max_A_radius(p.alpha));
    p.A_radius = std::min(p.A_radius, 0.5 * p.R);
    p.tau = 0.0;
    Rng rng(seed);
    const auto lens = sample_lens(p, samples, rng);
    for (int k = 0; k <= mu_halvings; ++k) {
      p.mu = std::ldexp(mu0, -k);
      out.attempts.push_back(verify_strict_supersolution(psi2, p, spec, lens));
      if (out.attempts.back().pass) {
        out.selected = static_cast<int>(out.attempts.size()) - 1;
        return out;
      }
    }
  }
  return out;
}

TauSelection select_tau1(const PsiField& psi1, const PsiField& psi2, const DeformationParams& params,
                         const std::vector<Vec>& lens, double tol, int max_steps) {
  if (lens.empty()) throw Error(ErrorCode::EmptyRegion, "empty sample of A");
  const double tau0 = params.tau0();
  std::vector<double> base(lens.size()), bump(lens.size());
  DeformationParams p0 = params;
  p0.tau = 0.0;
  parallel_for(lens.size(), [&](std::size_t i) {
    const Vec& x = lens[i];
    const double e = std::exp(-p0.alpha * x.squaredNorm()) - std::exp(-p0.alpha * p0.R * p0.R);
    const double zeta = std::cos(std::sqrt(p0.alpha) * (x[0] - p0.xhat[0]));
    base[i] = psi2.value(x) - psi1.value(x) - p0.mu * e * zeta;
    bump[i] = p0.mu * zeta;
  });
  auto inf_at = [&](double tau) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < base.size(); ++i) m = std::min(m, base[i] + tau * bump[i]);
    return m;
  };
  TauSelection sel;
  double g0 = inf_at(0.0), g1 = inf_at(tau0);
  if (std::abs(g0) <= tol) return {0.0, g0, 0};
  if (std::abs(g1) <= tol) return {tau0, g1, 0};
  if (g0 > 0.0 || g1 < 0.0) throw Error(ErrorCode::BracketFailure, "inf over A does not change sign on [0, tau0]");
  double lo = 0.0, hi = tau0;
  sel.tau1 = 0.5 * (lo + hi);
  sel.residual = inf_at(sel.tau1);
  while (std::abs(sel.residual) > tol && sel.steps < max_steps) {
    ++sel.steps;
    (sel.residual < 0.0 ? lo : hi) = sel.tau1;
    sel.tau1 = 0.5 * (lo + hi);
    sel.residual = inf_at(sel.tau1);
  }
  if (std::abs(sel.residual) > tol)
    throw Error(ErrorCode::NonConvergence, "tau bisection did not reach the tolerance");
  return sel;
}

std::vector<double> geometric_s(double s_max, double s_min) {
  if (!(s_max > 0.0) || !(s_min > 0.0) || s_min > s_max) throw Error(ErrorCode::BadParams, "need 0 < s_min <= s_max");
  std::vector<double> s;
  for (double v = s_max; v >= s_min * (1.0 - 1e-12); v *= 0.5) s.push_back(v);
  return s;
}

HopfQuotient hopf_quotient(const PsiField& psi1, const PsiField& psi2, const Vec& xhat, const Vec& nu,
                           const std::vector<double>& s_values, double contact_tol, double pass_tol) {
  if (s_values.size() < 3) throw Error(ErrorCode::BadParams, "need at least three s values");
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    if (!(s_values[i] > 0.0) || (i > 0 && !(s_values[i] < s_values[i - 1])))
      throw Error(ErrorCode::BadParams, "s values must be positive and strictly decreasing");
  }
  const double gap0 = psi2.value(xhat) - psi1.value(xhat);
  if (std::abs(gap0) > contact_tol) throw Error(ErrorCode::BadParams, "psi1 and psi2 do not touch at xhat");

  HopfQuotient hq;
  hq.xhat = xhat;
  hq.nu = nu / nu.norm();
  hq.s_values = s_values;
  hq.pass_tol = pass_tol;
  for (double s : s_values) {
    const Vec y = xhat - s * hq.nu;
    const double q = (psi2.value(y) - psi1.value(y)) / s;
    if (!std::isfinite(q)) throw Error(ErrorCode::OutOfDomain, "quotient is not finite");
    hq.quotients.push_back(q);
  }
  for (std::size_t i = 0; i + 1 < s_values.size(); ++i) {
    const double s0 = s_values[i], s1 = s_values[i + 1];
    hq.extrapolated.push_back((s0 * hq.quotients[i + 1] - s1 * hq.quotients[i]) / (s0 - s1));
  }
  double proxy = std::numeric_limits<double>::infinity();
  for (std::size_t i = hq.quotients.size() - 3; i < hq.quotients.size(); ++i) proxy = std::min(proxy, hq.quotients[i]);
  for (std::size_t i = hq.extrapolated.size() - 3; i < hq.extrapolated.size(); ++i)
    proxy = std::min(proxy, hq.extrapolated[i]);
  hq.extrapolated_liminf = proxy;
  hq.pass = proxy > pass_tol;
  return hq;
}

nlohmann::json deformation_json(const DeformationReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"tau", row.tau}, {"extreme_value", row.extreme_value}, {"beta", row.beta},
                    {"outside_cone", row.outside_cone}});
  return {{"verdict", r.pass ? "PASS" : "FAIL"},
          {"alpha", r.params.alpha},
          {"mu", r.params.mu},
          {"R", r.params.R},
          {"A_radius", r.params.A_radius},
          {"tau0", r.tau0},
          {"beta_min", r.beta_min},
          {"rows", rows}};
}

std::string deformation_csv(const DeformationReport& r) {
  CsvTable t({"alpha", "mu", "tau", "extreme_value", "beta", "outside_cone"});
  for (const auto& row : r.rows)
    t.row().cell(r.params.alpha).cell(r.params.mu).cell(row.tau).cell(row.extreme_value).cell(row.beta).cell(row.outside_cone);
  return t.str();
}

nlohmann::json hopf_json(const HopfQuotient& h) {
  return {{"verdict", h.pass ? "PASS" : "FAIL"},
          {"extrapolated_liminf", h.extrapolated_liminf},
          {"pass_tol", h.pass_tol},
          {"xhat", std::vector<double>(h.xhat.data(), h.xhat.data() + h.xhat.size())},
          {"nu", std::vector<double>(h.nu.data(), h.nu.data() + h.nu.size())},
          {"s_values", h.s_values},
          {"quotients", h.quotients},
          {"extrapolated", h.extrapolated}};
}

std::string hopf_csv(const HopfQuotient& h) {
  CsvTable t({"s", "quotient", "extrapolated"});
  for (std::size_t i = 0; i < h.s_values.size(); ++i) {
    t.row().cell(h.s_values[i]).cell(h.quotients[i]);
    if (i + 1 < h.s_values.size()) t.cell(h.extrapolated[i]);
    else t.cell(std::string_view{});
  }
  return t.str();
}

}  // namespace confvisc
