#pragma once

// Reference computations for the test suites. Each one takes a different
// route from the library code it checks.

#include <functional>
#include <vector>

#include "confvisc/fields.hpp"
#include "confvisc/grid.hpp"
#include "confvisc/types.hpp"

namespace oracle {

using confvisc::Mat;
using confvisc::Vec;

/// Coefficients c[0..n] of det(t I - M) = sum c[k] t^k (Faddeev-LeVerrier).
std::vector<double> char_poly(const Mat& m);

/// Real parts of all roots of sum c[k] t^k, ascending (Durand-Kerner, then Newton polish).
std::vector<double> poly_roots(const std::vector<double>& c);

/// Eigenvalues as characteristic-polynomial roots, ascending.
std::vector<double> eigenvalues_by_char_poly(const Mat& m);

/// Sum of all k x k principal minors, which equals sigma_k of the eigenvalues.
double sigma_k_by_minors(const Mat& m, int k);

/// sigma_k as the explicit sum over k-subsets.
double sigma_k_by_subsets(const std::vector<double>& lambda, int k);

/// Fourth-order central differences.
Vec fd4_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h);
Mat fd4_hessian(const std::function<double(const Vec&)>& f, const Vec& x, double h);

/// max over every node y of psi(y) - |x - y|^2 / eps, at node `node`.
double brute_sup_convolution(const confvisc::GridField& psi, double eps, std::size_t node);

/// Concave envelope at x of the data (points[i], values[i]) as the LP
/// max sum w_i values_i s.t. sum w_i points_i = x, sum w_i = 1, w >= 0.
/// Dense two-phase simplex with Bland's rule.
double lp_concave_envelope(const std::vector<Vec>& points, const std::vector<double>& values, const Vec& x);

/// Bubble parameters from exact samples: v^{-2/(n-2)} is the quadratic
/// (1 + b^2 |x - x0|^2)/a, fitted by linear least squares.
confvisc::BubbleParams linear_bubble_fit(const std::vector<Vec>& xs, const std::vector<double>& vs, int n);

struct RadialJet {
  double value;
  Vec gradient;
  Mat hessian;
};

/// Bubble jet from its radial profile g(r): Hess = g'' rr^T + (g'/r)(I - rr^T).
RadialJet radial_bubble_jet(const confvisc::BubbleParams& p, const Vec& x, int n);

}  // namespace oracle
