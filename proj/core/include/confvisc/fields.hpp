#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "confvisc/grid.hpp"
#include "confvisc/jet.hpp"
#include "confvisc/mobius_map.hpp"
#include "confvisc/types.hpp"

namespace confvisc {

/// v(x) = (a / (1 + b^2 |x - x0|^2))^((n-2)/2).
struct BubbleParams {
  double a = 1.0;
  double b = 1.0;
  Vec x0;

  void validate(int n) const;
};

/// Bubble whose constant eigenvalue 2b^2/a^2 puts the operator exactly at
/// spec.level. Keeps `a` and `x0`, solves for b.
BubbleParams tuned_bubble(const OperatorSpec& spec, double a, Vec x0);

/// Samples (r, g, g', g'') of a radial profile on increasing radii.
/// Between samples g is the quintic Hermite interpolant, so the field is C^2.
struct RadialTable {
  std::vector<double> r;
  std::vector<double> g;
  std::vector<double> dg;
  std::vector<double> d2g;

  void validate() const;
  /// (g, g', g'') at radius s, inside [r.front(), r.back()].
  std::array<double, 3> eval(double s) const;
};

/// Immutable analytic positive field with exact second-order jets. Copies
/// share the underlying expression tree.
class AnalyticField {
public:
  enum class Kind { Constant, Bubble, RadialProfile, KelvinOf, MobiusPullback, ScalarMultiple };

  static AnalyticField constant(int n, double c);
  static AnalyticField bubble(int n, BubbleParams p);
  static AnalyticField radial(int n, Vec center, RadialTable table);
  /// y -> (radius/|y-center|)^(n-2) w(center + radius^2 (y-center)/|y-center|^2).
  static AnalyticField kelvin_of(AnalyticField w, Vec center, double radius);
  /// x -> |det D phi(x)|^((n-2)/(2n)) w(phi(x)).
  static AnalyticField pullback(AnalyticField w, MobiusMap phi);
  static AnalyticField scaled(double c, AnalyticField w);

  int n() const;
  Kind kind() const;
  std::string describe() const;

  /// Bubble parameters when kind() == Bubble.
  const BubbleParams* bubble_params() const;

  double value(const Vec& x) const;
  Jet2 jet_u(const Vec& x) const;
  Jet2 jet_psi(const Vec& x) const;

  struct Node;

private:
  explicit AnalyticField(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Pointwise evaluation on every node.
GridField sample(const AnalyticField& field, const GridSpec& grid,
                 BoundaryPolicy policy = BoundaryPolicy::Reject);

/// Log-form field psi with jets, possibly only piecewise smooth. Used for
/// deformations and for max-type fields whose kink set must be flagged.
class PsiField {
public:
  using ValueFn = std::function<double(const Vec&)>;
  using JetFn = std::function<Jet2(const Vec&)>;
  using RegularFn = std::function<bool(const Vec&)>;

  PsiField(int n, ValueFn value, JetFn jet, RegularFn regular = {}, std::string name = "psi");

  /// psi = -ln u for an analytic u.
  static PsiField from_analytic(const AnalyticField& u);
  /// max(p, q). Points where |p - q| <= kink_tol are not regular.
  static PsiField max_of(PsiField p, PsiField q, double kink_tol);

  int n() const { return n_; }
  const std::string& name() const { return name_; }
  double value(const Vec& x) const { return value_(x); }
  Jet2 jet(const Vec& x) const { return jet_(x); }
  /// False where no second-order jet exists.
  bool regular(const Vec& x) const { return regular_ ? regular_(x) : true; }

private:
  int n_;
  ValueFn value_;
  JetFn jet_;
  RegularFn regular_;
  std::string name_;
};

/// Either an analytic field (exact jets) or a sampled grid field.
class ScalarField {
public:
  ScalarField(AnalyticField f) : field_(std::move(f)) {}  // NOLINT
  ScalarField(GridField g) : field_(std::move(g)) {}      // NOLINT

  int n() const;
  /// Exact for analytic fields, multilinear for grids.
  double value(const Vec& x) const;
  const AnalyticField* analytic() const { return std::get_if<AnalyticField>(&field_); }
  const GridField* grid() const { return std::get_if<GridField>(&field_); }
  std::string describe() const;

private:
  std::variant<AnalyticField, GridField> field_;
};

}  // namespace confvisc
