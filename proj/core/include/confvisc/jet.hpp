#pragma once

#include "confvisc/symfun.hpp"
#include "confvisc/types.hpp"

namespace confvisc {

/// Second-order jet (value, gradient, Hessian) of a scalar field at a point.
struct Jet2 {
  double value = 0.0;
  Vec gradient;
  SymMatrix hessian;

  Jet2() = default;
  Jet2(double v, Vec g, SymMatrix h) : value(v), gradient(std::move(g)), hessian(std::move(h)) {}

  static Jet2 constant(int n, double v) { return Jet2(v, Vec::Zero(n), SymMatrix::zero(n)); }
  int n() const { return static_cast<int>(gradient.size()); }
};

/// psi = -ln u and back. Both directions are exact given exact inputs.
Jet2 log_jet_from_u(const Jet2& u);
Jet2 u_jet_from_log(const Jet2& psi);

/// Jet of exp(g) from the jet of g, and of ln(w) from the jet of w > 0.
Jet2 exp_jet(const Jet2& g);
Jet2 ln_jet(const Jet2& w);

Jet2 product(const Jet2& a, const Jet2& b);
Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator*(double s, const Jet2& a);

}  // namespace confvisc
