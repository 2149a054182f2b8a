#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "confvisc/conformal.hpp"
#include "confvisc/fields.hpp"
#include "confvisc/report.hpp"

namespace confvisc {

/// Value of the reflected field (lam/|y-x|)^{n-2} v(x + lam^2 (y-x)/|y-x|^2).
double reflected_value(const ScalarField& v, const Vec& x, double lam, const Vec& y);

struct SphereSampling {
  int random_directions = 64;
  int radii = 48;
  std::uint64_t seed = 1;
};

/// Directions: the coordinate axes, the 2^n diagonals, then seeded random ones.
std::vector<Vec> sphere_directions(int n, const SphereSampling& s);

struct SphereComparison {
  double worst_violation = 0.0;  // max of v_{x,lam} - v over the sample
  double worst_relative = 0.0;   // max of (v_{x,lam} - v) / v
  Vec worst_point;
  std::size_t samples = 0;
  bool holds(double rel_tol) const { return worst_relative <= rel_tol; }
};

/// Compares the reflected field with v on rays from x, radii geometric from
/// lam out to the sphere |y| = R.
SphereComparison sphere_compare(const ScalarField& v, const Vec& x, double lam, double R,
                                const std::vector<Vec>& directions, int radii = 48);

struct MovingSphereOptions {
  double tol = 1e-6;         // relative bisection width
  double hold_tol = 1e-10;   // relative violation still counted as holding
  int probes = 64;
  int max_halvings = 60;
  int max_rebisections = 8;
  SphereSampling sampling;
};

struct MovingSphereState {
  Vec x;
  double lambda0 = 0.0;
  double lambda_bar = 0.0;
  double R = 0.0;
  double violation_gap = 0.0;  // worst relative violation at lambda_bar (1 + tol); NaN at the cap
  bool capped = false;          // lambda_bar = R/5
  int compare_calls = 0;
};

/// Critical radius by bisection between a holding start radius and a failing
/// radius or the cap R/5. Throws NoStartingRadius, BadParams.
MovingSphereState critical_radius(const ScalarField& v, const Vec& x, double R, const MovingSphereOptions& opt = {});

struct AsymptoticAlpha {
  double alpha_hat = 0.0;   // min over |y| in [0.8R, R] of |y|^{n-2} v
  double inner = 0.0;       // same over |y| in [0.4R, 0.5R]
  double growth = 0.0;      // alpha_hat / inner
  bool infinite = false;    // growth >= 2
};

AsymptoticAlpha asymptotic_alpha(const ScalarField& v, double R, const SphereSampling& s = {});

/// min over the outer shell of (1 + |y|)^{n-2} v.
double decay_lower_bound(const ScalarField& v, double R, const SphereSampling& s = {});

enum class LiouvilleKind { Constant, Bubble, Inconclusive };
std::string_view to_string(LiouvilleKind k) noexcept;

struct LiouvilleOptions {
  double certify_tol = 1e-8;
  int certify_points = 200;
  double constant_tol = 1e-10;    // relative oscillation
  double identity_tol = 2e-2;
  double residual_tol = 1e-6;     // relative, over the certification sample
  double level_tol = 1e-6;
  int max_search_points = 4000;
  int gauss_newton_iterations = 100;
  std::uint64_t seed = 1;
  MovingSphereOptions sphere;
};

struct LiouvilleVerdict {
  LiouvilleKind kind = LiouvilleKind::Inconclusive;
  std::optional<BubbleParams> bubble;
  std::string reason;
  AsymptoticAlpha alpha;
  double lower_bound = 0.0;
  double oscillation = 0.0;
  Aggregate certification = Aggregate::Mixed;
  Vec maximum_point;
  std::vector<MovingSphereState> centers;
  std::vector<double> identity_values;  // lambda_bar^{n-2} v at each center
  double identity_max_rel = 0.0;
  double fit_residual = 0.0;
  int fit_iterations = 0;
  double level_residual = 0.0;
};

/// Gauss-Newton fit of log v by a bubble in (log a, log b, x0), with backtracking.
struct BubbleFit {
  BubbleParams params;
  double rms = 0.0;
  int iterations = 0;
};
BubbleFit fit_bubble(const std::vector<Vec>& xs, const std::vector<double>& vs, BubbleParams start,
                     int max_iterations = 100);

/// Throws NotASolution unless v certifies as a solution on B_R.
LiouvilleVerdict liouville_classify(const ScalarField& v, double R, const OperatorSpec& spec,
                                    const LiouvilleOptions& opt = {});

nlohmann::json moving_sphere_json(const MovingSphereState& s);
std::string moving_sphere_csv(const ScalarField& v, const std::vector<MovingSphereState>& states);
nlohmann::json liouville_json(const LiouvilleVerdict& v);
/// SVG of lambda_bar against the center index.
std::string lambda_svg(const std::vector<MovingSphereState>& states);

}  // namespace confvisc
