#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "confvisc/types.hpp"

namespace confvisc {

class Rng;

/// Dense symmetric matrix. The upper triangle is authoritative: every
/// constructor mirrors it into the lower triangle, so entries (i,j) and (j,i)
/// are always bit-identical.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : m_(Mat::Zero(n, n)) {}

  static SymMatrix zero(int n) { return SymMatrix(n); }
  static SymMatrix identity(int n);
  static SymMatrix diagonal(const Vec& d);
  static SymMatrix outer(const Vec& v);
  static SymMatrix from_upper(const Mat& m);

  int n() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Mat& dense() const { return m_; }

  double trace() const { return m_.trace(); }
  double frobenius() const { return m_.norm(); }

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

  /// R^T M R for a square (typically orthogonal) R.
  SymMatrix congruence(const Mat& r) const;

private:
  Mat m_;
};

struct Spectrum {
  Vec eigenvalues;   // ascending
  Mat eigenvectors;  // column i pairs with eigenvalues[i]
  double residual = 0.0;
  int sweeps = 0;
};

/// Cyclic Jacobi. Stops once the off-diagonal Frobenius norm drops below
/// tol * ||M||_F and every pair satisfies max|Mv - lambda v| <= tol * max(1, ||M||_F).
Spectrum eigen_sym(const SymMatrix& m, double tol = 1e-12);

/// sigma_k of lambda via the prefix-product recursion. The input is sorted
/// first so the result is bit-identical under permutations.
double sigma_k(std::span<const double> lambda, int k);

/// All of sigma_0 .. sigma_n, same ordering convention as sigma_k.
std::vector<double> sigma_all(std::span<const double> lambda);

struct ConeSpec {
  enum class Kind { GammaK, HalfSpaceGamma1, Custom };
  using Predicate = std::function<bool(std::span<const double>)>;
  using ClosedPredicate = std::function<bool(std::span<const double>, double)>;

  Kind kind = Kind::GammaK;
  int n = 3;
  int k = 1;
  std::string name;
  Predicate contains;             // Custom only
  ClosedPredicate contains_closed;  // Custom only; falls back to contains

  static ConeSpec gamma_k(int n, int k);
  static ConeSpec half_space(int n);
  static ConeSpec custom(int n, std::string name, Predicate open, ClosedPredicate closed = {});
};

bool in_cone(std::span<const double> lambda, const ConeSpec& cone);
/// Membership in the closure, with a band of width boundary_tol.
bool in_closed_cone(std::span<const double> lambda, const ConeSpec& cone, double boundary_tol);

enum class FFamily { SigmaKRoot, SigmaKRaw, Custom };

struct OperatorSpec {
  using Function = std::function<double(std::span<const double>)>;

  FFamily family = FFamily::SigmaKRoot;
  int k = 1;
  ConeSpec cone;
  int n = 3;
  double boundary_tol = 1e-10;
  double level = 1.0;
  Function custom_f;
  std::string custom_name;

  static OperatorSpec sigma_k_root(int n, int k, double level = 1.0);
  static OperatorSpec sigma_k_raw(int n, int k, double level = 1.0);
  /// f = offset + sigma_1 on the half-space {sigma_1 > -offset}. With
  /// offset = 1, 0 lies in the cone and f(0) = 1, so constants solve at level 1.
  static OperatorSpec affine_trace(int n, double offset, double level = 1.0);

  /// Throws BadParams / BadK when the invariants fail.
  void validate() const;
  std::string describe() const;
};

/// f(lambda) when lambda is in the closed cone, nullopt (OutsideClosedCone) otherwise.
std::optional<double> f_eval(std::span<const double> lambda, const OperatorSpec& spec);

/// The formula for f evaluated without the cone test; nullopt where the
/// formula itself is undefined (e.g. a negative sigma_k under the k-th root).
std::optional<double> f_extended(std::span<const double> lambda, const OperatorSpec& spec);

/// Value of f on the diagonal (t, ..., t).
double f_diagonal(double t, const OperatorSpec& spec);

/// Solves f(t,...,t) = target for t > 0 by bracketing and bisection.
double solve_diagonal_level(const OperatorSpec& spec, double target);

struct EllipticityProbe {
  double sampled_infimum = 0.0;  // inf of (f(l+m)-f(l))/|m|
  int samples = 0;
};

/// Samples the strict-ellipticity ratio on the box [lo, hi]^n intersected with
/// the cone, with perturbations m in [0, step]^n.
EllipticityProbe probe_strict_ellipticity(const OperatorSpec& spec, double lo, double hi,
                                          double step, int samples, Rng& rng);

}  // namespace confvisc
