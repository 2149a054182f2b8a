#include "confvisc/jet.hpp"

#include <cmath>

namespace confvisc {

Jet2 exp_jet(const Jet2& g) {
  const double e = std::exp(g.value);
  return Jet2(e, e * g.gradient, e * (g.hessian + SymMatrix::outer(g.gradient)));
}

Jet2 ln_jet(const Jet2& w) {
  if (!(w.value > 0.0)) throw Error(ErrorCode::NonPositiveU, "logarithm of a non-positive value");
  const double inv = 1.0 / w.value;
  return Jet2(std::log(w.value), inv * w.gradient,
              inv * w.hessian - (inv * inv) * SymMatrix::outer(w.gradient));
}

Jet2 log_jet_from_u(const Jet2& u) { return -1.0 * ln_jet(u); }

Jet2 u_jet_from_log(const Jet2& psi) { return exp_jet(-1.0 * psi); }

Jet2 product(const Jet2& a, const Jet2& b) {
  Mat cross = a.gradient * b.gradient.transpose();
  cross += cross.transpose().eval();
  return Jet2(a.value * b.value, a.value * b.gradient + b.value * a.gradient,
              a.value * b.hessian + b.value * a.hessian + SymMatrix::from_upper(cross));
}

Jet2 operator+(const Jet2& a, const Jet2& b) {
  return Jet2(a.value + b.value, a.gradient + b.gradient, a.hessian + b.hessian);
}

Jet2 operator-(const Jet2& a, const Jet2& b) {
  return Jet2(a.value - b.value, a.gradient - b.gradient, a.hessian - b.hessian);
}

Jet2 operator*(double s, const Jet2& a) { return Jet2(s * a.value, s * a.gradient, s * a.hessian); }

}  // namespace confvisc
