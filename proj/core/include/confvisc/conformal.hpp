#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "confvisc/fields.hpp"
#include "confvisc/grid.hpp"
#include "confvisc/jet.hpp"
#include "confvisc/symfun.hpp"

namespace confvisc {

struct ConformalJet {
  SymMatrix A;
  Spectrum lambda;
  Jet2 u_jet;
};

/// A^u = -(2/(n-2)) u^{-(n+2)/(n-2)} D^2u + (2n/(n-2)^2) u^{-2n/(n-2)} Du (x) Du
///       - (2/(n-2)^2) u^{-2n/(n-2)} |Du|^2 I.
ConformalJet conformal_hessian(const Jet2& u_jet, int n);

/// Same matrix written in psi = -ln u:
/// e^{4 psi/(n-2)} [ (2/(n-2)) D^2psi + (4/(n-2)^2) Dpsi (x) Dpsi - (2/(n-2)^2) |Dpsi|^2 I ].
ConformalJet conformal_hessian_psi(const Jet2& psi_jet, int n);

struct OperatorValue {
  std::optional<double> value;  // nullopt: eigenvalues outside the closed cone
  ConformalJet jet;
};

OperatorValue evaluate_jet(const Jet2& u_jet, const OperatorSpec& spec);
OperatorValue evaluate_psi_jet(const Jet2& psi_jet, const OperatorSpec& spec);
OperatorValue evaluate_operator(const AnalyticField& field, const Vec& x, const OperatorSpec& spec);

enum class Verdict {
  StrictSub,          // value >= level + tol, eigenvalues in the open cone
  StrictSuper,        // value <= level - tol
  OnLevel,            // |value - level| <= tol, eigenvalues in the open cone
  OnConeBoundary,     // in the closed cone but not the open one, value short of level
  OutsideClosedCone,  // eigenvalues outside the closed cone
  ConeViolation,      // outside the closed cone although the formula reaches level
  Kink,               // no second-order jet at this point
};

enum class Aggregate { Solution, SubSolution, SuperSolution, Mixed };

std::string_view to_string(Verdict v) noexcept;
std::string_view to_string(Aggregate a) noexcept;

/// Points with these verdicts satisfy "outside the closed domain or F <= level".
bool is_super_side(Verdict v) noexcept;

struct PointVerdict {
  Vec x;
  std::optional<double> value;
  double min_eigenvalue = 0.0;
  Verdict verdict = Verdict::OnLevel;
  double margin = 0.0;  // value - level where defined
};

/// Pointwise verdict from a conformal jet.
PointVerdict judge(const Vec& x, const OperatorValue& ov, const OperatorSpec& spec, double tol);

struct Classification {
  std::vector<PointVerdict> points;
  Aggregate aggregate = Aggregate::Mixed;
  double tol = 0.0;
  double boundary_tol = 0.0;
  double level = 1.0;
  double max_level_deviation = 0.0;  // max |value - level| over points with a value
  double min_sub_margin = 0.0;       // min (value - level) over StrictSub points
  double min_super_margin = 0.0;     // min (level - value) over StrictSuper points
  int count(Verdict v) const;
};

/// Aggregates a list of pointwise verdicts. Kink points are ignored;
/// any ConeViolation forces Mixed.
Classification aggregate(std::vector<PointVerdict> points, const OperatorSpec& spec, double tol);

/// Exact-jet classification at the given points.
Classification classify(const AnalyticField& field, const std::vector<Vec>& points, const OperatorSpec& spec,
                        double tol = 1e-8);

/// Finite-difference classification at every interior node of a u-grid.
Classification classify(const GridField& field, const OperatorSpec& spec, double tol);

/// 10 h^2 with h the largest spacing.
double grid_verdict_tolerance(const GridSpec& grid);

/// Rows: point, operator value, min eigenvalue, verdict.
std::string classification_csv(const Classification& c);
nlohmann::json classification_json(const Classification& c);

}  // namespace confvisc
