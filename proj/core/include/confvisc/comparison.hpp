#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "confvisc/conformal.hpp"
#include "confvisc/fields.hpp"
#include "confvisc/grid.hpp"

namespace confvisc {

class Rng;

enum class ContactVerdict { IdenticallyEqual, StrictlyOrdered, ContactDetected };
std::string_view to_string(ContactVerdict v) noexcept;

struct ContactReport {
  std::vector<std::size_t> contact_set;  // indices into the evaluated points / nodes
  double min_gap = 0.0;
  double max_gap = 0.0;
  ContactVerdict verdict = ContactVerdict::StrictlyOrdered;
};

/// Gap psi2 - psi1 node by node. Throws OrderViolation (naming the worst
/// node) if psi1 > psi2 + contact_tol anywhere.
ContactReport detect_contact(const GridField& psi1, const GridField& psi2, double contact_tol);
ContactReport detect_contact(const PsiField& psi1, const PsiField& psi2, const std::vector<Vec>& points,
                             double contact_tol);

/// Parameters of psi2 - mu (h - tau) zeta with E = exp(-alpha |x|^2),
/// h = E - exp(-alpha R^2), zeta = cos(sqrt(alpha) (x_1 - xhat_1)), on the
/// ball A of radius A_radius around the boundary point xhat of B_R(0).
struct DeformationParams {
  double alpha = 1.0;
  double mu = 1e-3;
  double tau = 0.0;
  double R = 1.0;
  Vec xhat;
  double A_radius = 0.0;

  /// Largest admissible A radius, pi / (3 sqrt(alpha)), where zeta >= 1/2.
  static double max_A_radius(double alpha);
  /// sup of h over A intersected with B_R.
  double tau0() const;
  void validate(int n) const;
};

/// The bump (h - tau) zeta with closed-form jet.
Jet2 deformation_bump(const DeformationParams& p, const Vec& x);

/// sign = -1: psi - mu (h - tau) zeta (perturbing a solution downward in F).
/// sign = +1: psi + mu (h - tau) zeta (the mirrored construction).
PsiField build_deformation(const PsiField& psi, const DeformationParams& params, int sign = -1);

/// Points of A intersected with B_R: seeded uniform samples plus a radial
/// family along xhat.
std::vector<Vec> sample_lens(const DeformationParams& p, int count, Rng& rng);

struct MarginRow {
  double tau = 0.0;
  double extreme_value = 0.0;  // max F (strict super check) or min F (strict sub check)
  double beta = 0.0;
  int outside_cone = 0;
};

struct DeformationReport {
  DeformationParams params;
  double tau0 = 0.0;
  std::vector<MarginRow> rows;  // tau = 0, tau0/2, tau0
  double beta_min = 0.0;
  bool pass = false;
};

/// beta = (level - max F(J2 psi_tilde)) / mu over the lens, for each tau in
/// {0, tau0/2, tau0}. PASS iff every beta > 0.
DeformationReport verify_strict_supersolution(const PsiField& psi2, const DeformationParams& params,
                                              const OperatorSpec& spec, const std::vector<Vec>& lens);

/// Mirror: beta = (min F(J2 psi_tilde) - level) / mu with psi1 + mu (h - tau) zeta.
DeformationReport verify_strict_subsolution(const PsiField& psi1, const DeformationParams& params,
                                            const OperatorSpec& spec, const std::vector<Vec>& lens);

struct AlphaSearch {
  std::vector<DeformationReport> attempts;
  int selected = -1;  // index into attempts, -1 if none passed
};

/// Doubling search alpha0 * 2^j, j = 0..max_doublings. At each alpha, mu is
/// halved up to `mu_halvings` times before moving on. A_radius is capped by
/// max_A_radius(alpha). Stops at the first PASS.
AlphaSearch search_alpha(const PsiField& psi2, DeformationParams base, const OperatorSpec& spec, int samples,
                         std::uint64_t seed, int max_doublings = 20, int mu_halvings = 10);

struct TauSelection {
  double tau1 = 0.0;
  double residual = 0.0;  // inf_A (psi_tilde_{tau1} - psi1)
  int steps = 0;
};

/// Bisection on tau in [0, tau0] for inf_A(psi2 - mu (h - tau) zeta - psi1) = 0.
/// BracketFailure unless the infimum changes sign across the interval.
TauSelection select_tau1(const PsiField& psi1, const PsiField& psi2, const DeformationParams& params,
                         const std::vector<Vec>& lens, double tol = 1e-12, int max_steps = 60);

struct HopfQuotient {
  Vec xhat;
  Vec nu;
  std::vector<double> s_values;
  std::vector<double> quotients;
  std::vector<double> extrapolated;  // 2 q(s/2) - q(s) for consecutive pairs
  double extrapolated_liminf = 0.0;
  double pass_tol = 0.0;
  bool pass = false;
};

/// Geometric sequence s_max, s_max/2, ... down to s_min.
std::vector<double> geometric_s(double s_max, double s_min);

/// Quotients (psi2 - psi1)(xhat - s nu)/s. The liminf proxy is the minimum of
/// the last three quotients and their first-order Richardson values.
HopfQuotient hopf_quotient(const PsiField& psi1, const PsiField& psi2, const Vec& xhat, const Vec& nu,
                           const std::vector<double>& s_values, double contact_tol = 1e-10,
                           double pass_tol = 1e-8);

nlohmann::json deformation_json(const DeformationReport& r);
std::string deformation_csv(const DeformationReport& r);
nlohmann::json hopf_json(const HopfQuotient& h);
std::string hopf_csv(const HopfQuotient& h);

}  // namespace confvisc
