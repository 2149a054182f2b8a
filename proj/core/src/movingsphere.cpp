#include "confvisc/movingsphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "confvisc/parallel.hpp"
#include "confvisc/rng.hpp"

namespace confvisc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double exponent(int n) { return static_cast<double>(n - 2); }

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

// Geometric radii on [r0, r1], endpoints included.
std::vector<double> shell_radii(double r0, double r1, int count) {
  std::vector<double> r;
  for (int j = 0; j < count; ++j) r.push_back(r0 * std::pow(r1 / r0, count == 1 ? 0.0 : j / (count - 1.0)));
  return r;
}

// min over the shell r0 <= |y| <= r1 of weight(|y|) v(y).
template <class Weight>
double shell_min(const ScalarField& v, double r0, double r1, const SphereSampling& s, Weight weight) {
  const auto dirs = sphere_directions(v.n(), s);
  const auto radii = shell_radii(r0, r1, std::max(2, s.radii / 4));
  std::vector<double> best(dirs.size(), kInf);
  parallel_for(dirs.size(), [&](std::size_t i) {
    for (double r : radii) best[i] = std::min(best[i], weight(r) * v.value(r * dirs[i]));
  });
  return *std::min_element(best.begin(), best.end());
}

double bubble_log(const BubbleParams& p, const Vec& x, int n) {
  return 0.5 * exponent(n) * (std::log(p.a) - std::log1p(p.b * p.b * (x - p.x0).squaredNorm()));
}

}  // namespace

double reflected_value(const ScalarField& v, const Vec& x, double lam, const Vec& y) {
  const Vec d = y - x;
  const double r2 = d.squaredNorm();
  if (!(r2 > 0.0)) throw Error(ErrorCode::OutOfDomain, "reflection at its own center");
  const double ratio = lam * lam / r2;
  return std::pow(std::sqrt(ratio), exponent(v.n())) * v.value(x + ratio * d);
}

std::vector<Vec> sphere_directions(int n, const SphereSampling& s) {
  std::vector<Vec> dirs;
  for (int i = 0; i < n; ++i) {
    dirs.push_back(Vec::Unit(n, i));
    dirs.push_back(-Vec::Unit(n, i));
  }
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = (mask >> i & 1) ? -1.0 : 1.0;
    dirs.push_back(d / std::sqrt(static_cast<double>(n)));
  }
  Rng rng(s.seed);
  for (int k = 0; k < s.random_directions; ++k) dirs.push_back(rng.unit_vector(n));
  return dirs;
}

SphereComparison sphere_compare(const ScalarField& v, const Vec& x, double lam, double R,
                                const std::vector<Vec>& directions, int radii) {
  if (!(lam > 0.0)) throw Error(ErrorCode::BadParams, "radius must be positive");
  if (x.norm() + lam >= R) throw Error(ErrorCode::OutOfDomain, "sphere leaves the ball of radius R");
  struct Slot {
    double abs = -kInf, rel = -kInf;
    Vec at;
    std::size_t count = 0;
  };
  std::vector<Slot> slots(directions.size());
  parallel_for(directions.size(), [&](std::size_t i) {
    const Vec& d = directions[i];
    const double xd = x.dot(d);
    const double t_max = (-xd + std::sqrt(xd * xd - x.squaredNorm() + R * R)) * (1.0 - 1e-12);
    std::vector<double> ts{lam * (1.0 + 1e-4), lam * (1.0 + 1e-2)};
    for (int j = 1; j <= radii; ++j) ts.push_back(lam * std::pow(t_max / lam, j / static_cast<double>(radii)));
    Slot& s = slots[i];
    for (double t : ts) {
      const Vec y = x + t * d;
      const double base = v.value(y);
      const double gap = reflected_value(v, x, lam, y) - base;
      ++s.count;
      if (gap > s.abs) s.abs = gap;
      if (gap / base > s.rel) {
        s.rel = gap / base;
        s.at = y;
      }
    }
  });
  SphereComparison out;
  out.worst_violation = out.worst_relative = -kInf;
  for (auto& s : slots) {
    out.samples += s.count;
    out.worst_violation = std::max(out.worst_violation, s.abs);
    if (s.rel > out.worst_relative) {
      out.worst_relative = s.rel;
      out.worst_point = s.at;
    }
  }
  return out;
}

MovingSphereState critical_radius(const ScalarField& v, const Vec& x, double R, const MovingSphereOptions& opt) {
  if (x.size() != v.n()) throw Error(ErrorCode::BadDimension, "center has the wrong dimension");
  if (!(R > 0.0) || !(x.norm() < R / 5.0)) throw Error(ErrorCode::BadParams, "need |x| < R/5");
  const auto dirs = sphere_directions(v.n(), opt.sampling);
  MovingSphereState st;
  st.x = x;
  st.R = R;
  auto holds = [&](double lam) {
    ++st.compare_calls;
    return sphere_compare(v, x, lam, R, dirs, opt.sampling.radii).holds(opt.hold_tol);
  };

  double lo = R / 10.0;
  int halvings = 0;
  while (!holds(lo)) {
    if (++halvings > opt.max_halvings)
      throw Error(ErrorCode::NoStartingRadius, "comparison fails for every radius down to " + format_double(lo));
    lo *= 0.5;
  }
  st.lambda0 = lo;

  const double cap = R / 5.0;
  double hi = cap;
  if (holds(cap)) {
    lo = cap;
  }
  for (int round = 0; round <= opt.max_rebisections; ++round) {
    while (hi - lo > opt.tol * lo) {
      const double mid = 0.5 * (lo + hi);
      (holds(mid) ? lo : hi) = mid;
    }
    // Probe sweep below the candidate; a failing probe becomes the new upper end.
    const double top = lo * (1.0 - opt.tol);
    double failed = kInf, held_below = st.lambda0;
    for (int k = 1; k <= opt.probes; ++k) {
      const double p = top * k / opt.probes;
      if (holds(p)) {
        if (failed == kInf) held_below = std::max(held_below, p);
      } else if (failed == kInf) {
        failed = p;
      }
    }
    if (failed == kInf) break;
    hi = failed;
    lo = std::min(held_below, failed);
    if (lo >= hi) lo = 0.5 * hi;
  }
  st.lambda_bar = lo;
  st.capped = lo >= cap;
  if (st.capped) {
    st.violation_gap = std::numeric_limits<double>::quiet_NaN();
  } else {
    ++st.compare_calls;
    st.violation_gap = sphere_compare(v, x, lo * (1.0 + opt.tol), R, dirs, opt.sampling.radii).worst_relative;
  }
  return st;
}

AsymptoticAlpha asymptotic_alpha(const ScalarField& v, double R, const SphereSampling& s) {
  const double m = exponent(v.n());
  auto weight = [m](double r) { return std::pow(r, m); };
  AsymptoticAlpha a;
  a.alpha_hat = shell_min(v, 0.8 * R, R, s, weight);
  a.inner = shell_min(v, 0.4 * R, 0.5 * R, s, weight);
  a.growth = a.alpha_hat / a.inner;
  // A constant in three dimensions sits exactly on the threshold.
  a.infinite = a.growth >= 2.0 * (1.0 - 1e-9);
  return a;
}

double decay_lower_bound(const ScalarField& v, double R, const SphereSampling& s) {
  const double m = exponent(v.n());
  return shell_min(v, 0.8 * R, R, s, [m](double r) { return std::pow(1.0 + r, m); });
}

std::string_view to_string(LiouvilleKind k) noexcept {
  switch (k) {
    case LiouvilleKind::Constant: return "Constant";
    case LiouvilleKind::Bubble: return "Bubble";
    case LiouvilleKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

BubbleFit fit_bubble(const std::vector<Vec>& xs, const std::vector<double>& vs, BubbleParams start,
                     int max_iterations) {
  if (xs.empty() || xs.size() != vs.size()) throw Error(ErrorCode::BadParams, "fit needs matching samples");
  const int n = static_cast<int>(xs.front().size());
  const int np = n + 2;
  if (static_cast<int>(xs.size()) < np) throw Error(ErrorCode::BadParams, "fit needs at least n + 2 samples");
  start.validate(n);
  const double m = 0.5 * exponent(n);

  auto unpack = [&](const Vec& th) { return BubbleParams{std::exp(th[0]), std::exp(th[1]), th.tail(n)}; };
  auto residuals = [&](const Vec& th) {
    const BubbleParams p = unpack(th);
    Vec r(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) r[static_cast<Eigen::Index>(i)] = std::log(vs[i]) - bubble_log(p, xs[i], n);
    return r;
  };

  Vec th(np);
  th[0] = std::log(start.a);
  th[1] = std::log(start.b);
  th.tail(n) = start.x0;
  Vec r = residuals(th);
  double cost = r.squaredNorm();
  BubbleFit fit;
  for (; fit.iterations < max_iterations && cost > 1e-30; ++fit.iterations) {
    const BubbleParams p = unpack(th);
    Mat J(static_cast<Eigen::Index>(xs.size()), np);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const Vec d = xs[i] - p.x0;
      const double b2 = p.b * p.b, q = 1.0 + b2 * d.squaredNorm();
      const auto row = static_cast<Eigen::Index>(i);
      J(row, 0) = -m;
      J(row, 1) = m * 2.0 * b2 * d.squaredNorm() / q;
      J.row(row).tail(n) = (-2.0 * m * b2 / q) * d.transpose();
    }
    const Vec step = J.colPivHouseholderQr().solve(-r);
    double t = 1.0;
    bool improved = false;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      const Vec trial = th + t * step;
      const Vec rt = residuals(trial);
      const double ct = rt.squaredNorm();
      if (std::isfinite(ct) && ct < cost) {
        th = trial;
        r = rt;
        cost = ct;
        improved = true;
        break;
      }
    }
    if (!improved || t * step.norm() <= 1e-15 * (1.0 + th.norm())) break;
  }
  fit.params = unpack(th);
  fit.rms = std::sqrt(cost / static_cast<double>(xs.size()));
  return fit;
}

namespace {

// Random search in B_{radius}, then compass search with halving steps.
Vec locate_maximum(const ScalarField& v, double radius, int samples, std::uint64_t seed) {
  const int n = v.n();
  Rng rng(seed);
  std::vector<Vec> pts(static_cast<std::size_t>(samples));
  for (auto& p : pts) p = rng.in_ball(Vec::Zero(n), radius);
  std::vector<double> vals(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { vals[i] = v.value(pts[i]); });
  const auto best = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  Vec x = pts[best];
  double fx = vals[best];
  for (double step = radius / 20.0; step > 1e-12 * radius; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (int i = 0; i < n && !moved; ++i) {
        for (double sgn : {1.0, -1.0}) {
          Vec y = x;
          y[i] += sgn * step;
          if (y.norm() > radius) continue;
          const double fy = v.value(y);
          if (fy > fx) {
            x = y;
            fx = fy;
            moved = true;
            break;
          }
        }
      }
    }
  }
  return x;
}

LiouvilleVerdict inconclusive(LiouvilleVerdict v, std::string reason) {
  v.kind = LiouvilleKind::Inconclusive;
  v.reason = std::move(reason);
  return v;
}

}  // namespace

LiouvilleVerdict liouville_classify(const ScalarField& v, double R, const OperatorSpec& spec,
                                    const LiouvilleOptions& opt) {
  spec.validate();
  const int n = v.n();
  if (n != spec.n) throw Error(ErrorCode::BadDimension, "field and operator dimensions differ");
  if (!(R > 0.0)) throw Error(ErrorCode::BadParams, "R must be positive");
  LiouvilleVerdict out;

  Rng rng(opt.seed);
  std::vector<Vec> sample;
  for (int i = 0; i < opt.certify_points; ++i) sample.push_back(rng.in_ball(Vec::Zero(n), R));
  if (const AnalyticField* f = v.analytic()) {
    out.certification = classify(*f, sample, spec, opt.certify_tol).aggregate;
  } else {
    const GridField& g = *v.grid();
    const double tol = std::max(opt.certify_tol, grid_verdict_tolerance(g.spec()));
    out.certification = classify(g, spec, tol).aggregate;
  }
  if (out.certification != Aggregate::Solution)
    throw Error(ErrorCode::NotASolution,
                "field certifies as " + std::string(to_string(out.certification)) + ", not a solution");

  std::vector<double> values(sample.size());
  parallel_for(sample.size(), [&](std::size_t i) { values[i] = v.value(sample[i]); });
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  out.oscillation = (*hi_it - *lo_it) / *hi_it;
  out.alpha = asymptotic_alpha(v, R, opt.sphere.sampling);
  out.lower_bound = decay_lower_bound(v, R, opt.sphere.sampling);

  if (out.alpha.infinite) {
    if (out.oscillation <= opt.constant_tol) {
      out.kind = LiouvilleKind::Constant;
      return out;
    }
    return inconclusive(std::move(out), "growth flag set but the field is not constant");
  }

  out.maximum_point = locate_maximum(v, R / 5.0, opt.max_search_points, opt.seed + 1);
  std::vector<Vec> centers{out.maximum_point};
  for (int i = 0; i < n; ++i) {
    centers.push_back(out.maximum_point + (R / 20.0) * Vec::Unit(n, i));
    centers.push_back(out.maximum_point - (R / 20.0) * Vec::Unit(n, i));
  }
  centers.push_back(out.maximum_point + (R / 40.0) * Vec::Ones(n) / std::sqrt(static_cast<double>(n)));
  for (const auto& c : centers)
    if (!(c.norm() < R / 5.0)) return inconclusive(std::move(out), "maximum too close to |x| = R/5 for the centers");

  for (const auto& c : centers) out.centers.push_back(critical_radius(v, c, R, opt.sphere));
  for (const auto& st : out.centers) {
    const double val = std::pow(st.lambda_bar, exponent(n)) * v.value(st.x);
    out.identity_values.push_back(val);
    out.identity_max_rel = std::max(out.identity_max_rel, std::abs(val - out.alpha.alpha_hat) / out.alpha.alpha_hat);
  }
  if (out.identity_max_rel > opt.identity_tol) return inconclusive(std::move(out), "moving-sphere identity check failed");

  BubbleParams start;
  start.b = 1.0 / out.centers.front().lambda_bar;
  const double t = solve_diagonal_level(spec, spec.level);
  start.a = start.b * std::sqrt(2.0 / t);
  start.x0 = out.maximum_point;
  std::vector<double> cv;
  for (const auto& c : centers) cv.push_back(v.value(c));
  const BubbleFit fit = fit_bubble(centers, cv, start, opt.gauss_newton_iterations);
  out.fit_iterations = fit.iterations;

  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double model = std::exp(bubble_log(fit.params, sample[i], n));
    out.fit_residual = std::max(out.fit_residual, std::abs(values[i] - model) / values[i]);
  }
  const double level = f_diagonal(2.0 * fit.params.b * fit.params.b / (fit.params.a * fit.params.a), spec);
  out.level_residual = std::abs(level - spec.level) / std::max(1.0, std::abs(spec.level));
  out.bubble = fit.params;
  if (out.fit_residual > opt.residual_tol) return inconclusive(std::move(out), "bubble fit residual too large");
  if (!(out.level_residual <= opt.level_tol)) return inconclusive(std::move(out), "fitted bubble misses the level");
  out.kind = LiouvilleKind::Bubble;
  return out;
}

nlohmann::json moving_sphere_json(const MovingSphereState& s) {
  nlohmann::json j{{"x", to_std(s.x)},
                   {"lambda0", s.lambda0},
                   {"lambda_bar", s.lambda_bar},
                   {"R", s.R},
                   {"capped", s.capped},
                   {"compare_calls", s.compare_calls}};
  j["violation_gap"] = std::isnan(s.violation_gap) ? nlohmann::json(nullptr) : nlohmann::json(s.violation_gap);
  return j;
}

std::string moving_sphere_csv(const ScalarField& v, const std::vector<MovingSphereState>& states) {
  std::vector<std::string> head{"center"};
  for (auto& c : axis_columns("x", v.n())) head.push_back(c);
  for (const char* c : {"lambda0", "lambda_bar", "identity_value", "violation_gap", "capped"}) head.emplace_back(c);
  CsvTable t(head);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    t.row().cell(i).cells(s.x).cell(s.lambda0).cell(s.lambda_bar);
    t.cell(std::pow(s.lambda_bar, exponent(v.n())) * v.value(s.x)).cell(s.violation_gap).cell(s.capped ? 1 : 0);
  }
  return t.str();
}

nlohmann::json liouville_json(const LiouvilleVerdict& v) {
  nlohmann::json centers = nlohmann::json::array();
  for (const auto& s : v.centers) centers.push_back(moving_sphere_json(s));
  nlohmann::json j{{"kind", to_string(v.kind)},
                   {"reason", v.reason},
                   {"certification", to_string(v.certification)},
                   {"alpha_hat", v.alpha.alpha_hat},
                   {"alpha_inner", v.alpha.inner},
                   {"alpha_growth", v.alpha.growth},
                   {"alpha_infinite", v.alpha.infinite},
                   {"lower_bound", v.lower_bound},
                   {"oscillation", v.oscillation},
                   {"centers", centers},
                   {"identity_values", v.identity_values},
                   {"identity_max_rel", v.identity_max_rel},
                   {"fit_residual", v.fit_residual},
                   {"fit_iterations", v.fit_iterations},
                   {"level_residual", v.level_residual}};
  if (v.maximum_point.size() > 0) j["maximum_point"] = to_std(v.maximum_point);
  if (v.bubble) j["bubble"] = {{"a", v.bubble->a}, {"b", v.bubble->b}, {"x0", to_std(v.bubble->x0)}};
  return j;
}

std::string lambda_svg(const std::vector<MovingSphereState>& states) {
  PlotSeries s{"critical radius", {}, {}};
  for (std::size_t i = 0; i < states.size(); ++i) {
    s.x.push_back(static_cast<double>(i));
    s.y.push_back(states[i].lambda_bar);
  }
  return svg_line_plot({"Critical radius per center", "center", "radius", false, false}, {s});
}

}  // namespace confvisc
