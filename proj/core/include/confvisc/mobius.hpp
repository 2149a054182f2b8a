#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "confvisc/conformal.hpp"
#include "confvisc/fields.hpp"
#include "confvisc/mobius_map.hpp"

namespace confvisc {

class Rng;

struct KelvinTransform {
  Vec x;
  double lam = 1.0;
};

/// x -> |det D phi(x)|^((n-2)/(2n)) w(phi(x)), with chain-rule jets.
AnalyticField pullback_field(const AnalyticField& w, const MobiusMap& phi);

/// w_{x,lam}(y) = (lam/|y-x|)^(n-2) w(x + lam^2 (y-x)/|y-x|^2), hand-differentiated.
AnalyticField kelvin(const AnalyticField& w, const KelvinTransform& kt);

/// The same transform realised as a pullback under the radius-lam sphere inversion.
AnalyticField kelvin_via_map(const AnalyticField& w, const KelvinTransform& kt);

/// Random composition of `ops` generators: translations in [-1,1]^n,
/// dilations in [1/2, 2], unit inversions centered in [-2,2]^n.
MobiusMap random_mobius_map(int n, int ops, Rng& rng);

/// Smallest distance from the running image of x to an inversion center
/// along the composition; +inf for maps without inversions.
double pole_distance(const MobiusMap& phi, const Vec& x);

struct InvariancePoint {
  Vec x;
  std::optional<double> lhs;  // F(A^{w_phi}(x))
  std::optional<double> rhs;  // F(A^w(phi(x)))
  double discrepancy = 0.0;
  double eigen_discrepancy = 0.0;  // max over sorted eigenvalue lists
};

struct InvarianceReport {
  std::vector<InvariancePoint> points;
  double max_discrepancy = 0.0;
  double max_eigen_discrepancy = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Both sides with exact jets. PASS iff the operator values and the sorted
/// eigenvalue lists agree within tol at every point.
InvarianceReport check_conformal_invariance(const AnalyticField& w, const MobiusMap& phi,
                                            const std::vector<Vec>& points, const OperatorSpec& spec,
                                            double tol = 1e-8);

/// Left side from finite differences of the pulled-back values with step h,
/// right side exact; the discrepancy is O(h^2).
InvarianceReport check_conformal_invariance_fd(const AnalyticField& w, const MobiusMap& phi,
                                               const std::vector<Vec>& points, const OperatorSpec& spec,
                                               double h, double tol);

std::string invariance_csv(const InvarianceReport& r);
nlohmann::json invariance_json(const InvarianceReport& r);

}  // namespace confvisc
