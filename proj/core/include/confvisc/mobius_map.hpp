#pragma once

#include <vector>

#include "confvisc/jet.hpp"
#include "confvisc/types.hpp"

namespace confvisc {

struct MobiusOp {
  enum class Kind { Translate, Dilate, Invert };

  Kind kind = Kind::Translate;
  Vec vector;           // translation, or inversion center
  double factor = 1.0;  // dilation factor

  static MobiusOp translate(Vec v) { return {Kind::Translate, std::move(v), 1.0}; }
  static MobiusOp dilate(double r) { return {Kind::Dilate, Vec(), r}; }
  /// Unit-radius inversion x -> c + (x - c)/|x - c|^2.
  static MobiusOp invert(Vec center) { return {Kind::Invert, std::move(center), 1.0}; }
};

/// Composition of translations, dilations and unit inversions, applied in
/// list order (ops[0] first). The empty list is the identity.
class MobiusMap {
public:
  explicit MobiusMap(int n) : n_(n) {}
  MobiusMap(int n, std::vector<MobiusOp> ops);

  int n() const { return n_; }
  const std::vector<MobiusOp>& ops() const { return ops_; }
  bool is_identity() const { return ops_.empty(); }

  /// This map followed by `after`.
  MobiusMap then(const MobiusMap& after) const;
  MobiusMap then(const MobiusOp& op) const;
  MobiusMap inverse() const;

  /// y -> x + r^2 (y - x)/|y - x|^2, built as Translate(-x), Dilate(1/r),
  /// Invert(0), Dilate(r), Translate(x).
  static MobiusMap sphere_inversion(const Vec& center, double radius);

private:
  int n_;
  std::vector<MobiusOp> ops_;
};

/// Relative pole distance below which an inversion refuses to evaluate.
inline constexpr double kPoleTolerance = 1e-9;

Vec apply_map(const MobiusMap& phi, const Vec& x);

/// |det D phi(x)|, multiplied factor by factor along the composition.
double jacobian_det(const MobiusMap& phi, const Vec& x);

/// Value, Jacobian and second derivatives of phi at x, plus the 2-jet of
/// log(rho), where D phi = rho * (orthogonal) and |det D phi| = rho^n.
struct MapJet {
  Vec value;
  Mat jacobian;             // jacobian(i, j) = d phi_i / d x_j
  std::vector<Mat> second;  // second[i](j, k) = d^2 phi_i / dx_j dx_k
  Jet2 log_factor;
};

MapJet map_jet(const MobiusMap& phi, const Vec& x);

/// Jet at x of s(phi(x)), given the jet of s at phi(x).
Jet2 pull_back_scalar(const Jet2& outer, const MapJet& inner);

}  // namespace confvisc
