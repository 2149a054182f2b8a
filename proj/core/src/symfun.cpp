#include "confvisc/symfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "confvisc/rng.hpp"

namespace confvisc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::TooCloseToBoundary: return "TooCloseToBoundary";
    case ErrorCode::NonPositiveU: return "NonPositiveU";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::HitsPole: return "HitsPole";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::DimensionTooHigh: return "DimensionTooHigh";
    case ErrorCode::UnboundedHessian: return "UnboundedHessian";
    case ErrorCode::OrderViolation: return "OrderViolation";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::NoStartingRadius: return "NoStartingRadius";
    case ErrorCode::NotASolution: return "NotASolution";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix s(n);
  s.m_.setIdentity();
  return s;
}

SymMatrix SymMatrix::diagonal(const Vec& d) {
  SymMatrix s(static_cast<int>(d.size()));
  s.m_.diagonal() = d;
  return s;
}

SymMatrix SymMatrix::outer(const Vec& v) {
  const int n = static_cast<int>(v.size());
  SymMatrix s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.set(i, j, v[i] * v[j]);
  return s;
}

SymMatrix SymMatrix::from_upper(const Mat& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::BadDimension, "SymMatrix needs a square matrix");
  const int n = static_cast<int>(m.rows());
  SymMatrix s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.set(i, j, m(i, j));
  return s;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  m_ += o.m_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  m_ -= o.m_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

SymMatrix SymMatrix::congruence(const Mat& r) const {
  return from_upper(r.transpose() * m_ * r);
}

namespace {

double off_diagonal_norm(const Mat& a) {
  double s = 0.0;
  const auto n = a.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double pair_residual(const Mat& m, const Vec& lambda, const Mat& v) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const Vec r = m * v.col(i) - lambda[i] * v.col(i);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

Spectrum eigen_sym(const SymMatrix& m, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::BadParams, "eigen_sym tolerance must be positive");
  const int n = m.n();
  if (n < 1) throw Error(ErrorCode::BadDimension, "eigen_sym on an empty matrix");

  constexpr int kMaxSweeps = 100;
  Mat a = m.dense();
  Mat v = Mat::Identity(n, n);
  const double scale = m.frobenius();
  const double residual_bound = tol * std::max(1.0, scale);

  Spectrum out;
  for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= tol * scale) {
      Vec lambda = a.diagonal();
      const double res = pair_residual(m.dense(), lambda, v);
      if (res <= residual_bound) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int i, int j) { return lambda[i] < lambda[j]; });
        out.eigenvalues.resize(n);
        out.eigenvectors.resize(n, n);
        for (int i = 0; i < n; ++i) {
          out.eigenvalues[i] = lambda[order[i]];
          out.eigenvectors.col(i) = v.col(order[i]);
        }
        out.residual = res;
        out.sweeps = sweep;
        return out;
      }
    }
    if (sweep == kMaxSweeps) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  throw Error(ErrorCode::NonConvergence, "Jacobi iteration cap exceeded");
}

namespace {

std::vector<double> sorted_copy(std::span<const double> lambda) {
  std::vector<double> s(lambda.begin(), lambda.end());
  std::sort(s.begin(), s.end());
  return s;
}

// e[j] after processing the prefix lambda[0..i] is sigma_j of that prefix.
std::vector<double> elementary(const std::vector<double>& s, int kmax) {
  std::vector<double> e(static_cast<std::size_t>(kmax) + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int top = std::min<int>(kmax, static_cast<int>(i) + 1);
    for (int j = top; j >= 1; --j) e[j] += s[i] * e[j - 1];
  }
  return e;
}

}  // namespace

double sigma_k(std::span<const double> lambda, int k) {
  const int n = static_cast<int>(lambda.size());
  if (k < 1 || k > n) throw Error(ErrorCode::BadK, "k must lie in 1..n");
  return elementary(sorted_copy(lambda), k)[k];
}

std::vector<double> sigma_all(std::span<const double> lambda) {
  return elementary(sorted_copy(lambda), static_cast<int>(lambda.size()));
}

ConeSpec ConeSpec::gamma_k(int n, int k) {
  if (n < 1) throw Error(ErrorCode::BadDimension, "cone dimension must be >= 1");
  if (k < 1 || k > n) throw Error(ErrorCode::BadK, "Gamma_k needs 1 <= k <= n");
  ConeSpec c;
  c.kind = Kind::GammaK;
  c.n = n;
  c.k = k;
  c.name = "gamma_" + std::to_string(k);
  return c;
}

ConeSpec ConeSpec::half_space(int n) {
  if (n < 1) throw Error(ErrorCode::BadDimension, "cone dimension must be >= 1");
  ConeSpec c;
  c.kind = Kind::HalfSpaceGamma1;
  c.n = n;
  c.k = 1;
  c.name = "half_space";
  return c;
}

ConeSpec ConeSpec::custom(int n, std::string name, Predicate open, ClosedPredicate closed) {
  ConeSpec c;
  c.kind = Kind::Custom;
  c.n = n;
  c.name = std::move(name);
  c.contains = std::move(open);
  c.contains_closed = std::move(closed);
  return c;
}

bool in_cone(std::span<const double> lambda, const ConeSpec& cone) {
  switch (cone.kind) {
    case ConeSpec::Kind::GammaK: {
      const auto e = elementary(sorted_copy(lambda), cone.k);
      for (int j = 1; j <= cone.k; ++j)
        if (!(e[j] > 0.0)) return false;
      return true;
    }
    case ConeSpec::Kind::HalfSpaceGamma1: {
      const auto s = sorted_copy(lambda);
      return std::accumulate(s.begin(), s.end(), 0.0) > 0.0;
    }
    case ConeSpec::Kind::Custom:
      return cone.contains && cone.contains(lambda);
  }
  return false;
}

bool in_closed_cone(std::span<const double> lambda, const ConeSpec& cone, double boundary_tol) {
  switch (cone.kind) {
    case ConeSpec::Kind::GammaK: {
      const auto e = elementary(sorted_copy(lambda), cone.k);
      for (int j = 1; j <= cone.k; ++j)
        if (!(e[j] >= -boundary_tol)) return false;
      return true;
    }
    case ConeSpec::Kind::HalfSpaceGamma1: {
      const auto s = sorted_copy(lambda);
      return std::accumulate(s.begin(), s.end(), 0.0) >= -boundary_tol;
    }
    case ConeSpec::Kind::Custom:
      if (cone.contains_closed) return cone.contains_closed(lambda, boundary_tol);
      return cone.contains && cone.contains(lambda);
  }
  return false;
}

OperatorSpec OperatorSpec::sigma_k_root(int n, int k, double level) {
  OperatorSpec s;
  s.family = FFamily::SigmaKRoot;
  s.k = k;
  s.n = n;
  s.cone = ConeSpec::gamma_k(n, k);
  s.level = level;
  return s;
}

OperatorSpec OperatorSpec::sigma_k_raw(int n, int k, double level) {
  OperatorSpec s = sigma_k_root(n, k, level);
  s.family = FFamily::SigmaKRaw;
  return s;
}

OperatorSpec OperatorSpec::affine_trace(int n, double offset, double level) {
  if (!(offset > 0.0)) throw Error(ErrorCode::BadParams, "affine_trace offset must be positive");
  OperatorSpec s;
  s.family = FFamily::Custom;
  s.n = n;
  s.k = 1;
  s.level = level;
  s.custom_name = "affine_trace";
  auto trace = [](std::span<const double> l) {
    auto v = sorted_copy(l);
    return std::accumulate(v.begin(), v.end(), 0.0);
  };
  s.custom_f = [offset, trace](std::span<const double> l) { return offset + trace(l); };
  s.cone = ConeSpec::custom(
      n, "affine_trace_half_space",
      [offset, trace](std::span<const double> l) { return trace(l) > -offset; },
      [offset, trace](std::span<const double> l, double tol) { return trace(l) >= -offset - tol; });
  return s;
}

void OperatorSpec::validate() const {
  if (n < 1) throw Error(ErrorCode::BadDimension, "operator dimension must be >= 1");
  if (cone.n != n) throw Error(ErrorCode::BadDimension, "cone dimension differs from operator dimension");
  if (family != FFamily::Custom && (k < 1 || k > n))
    throw Error(ErrorCode::BadK, "sigma_k family needs 1 <= k <= n");
  if (family == FFamily::Custom && !custom_f)
    throw Error(ErrorCode::BadParams, "custom operator without a function");
  if (!(boundary_tol > 0.0)) throw Error(ErrorCode::BadParams, "boundary_tol must be positive");
  if (!(level > 0.0)) throw Error(ErrorCode::BadParams, "level must be positive");
}

std::string OperatorSpec::describe() const {
  std::ostringstream os;
  switch (family) {
    case FFamily::SigmaKRoot: os << "sigma_" << k << "^(1/" << k << ")"; break;
    case FFamily::SigmaKRaw: os << "sigma_" << k; break;
    case FFamily::Custom: os << (custom_name.empty() ? "custom" : custom_name); break;
  }
  os << " on " << cone.name << ", n=" << n << ", level=" << level;
  return os.str();
}

namespace {

double sigma_family_value(std::span<const double> lambda, const OperatorSpec& spec) {
  const double s = std::max(0.0, sigma_k(lambda, spec.k));
  if (spec.family == FFamily::SigmaKRaw) return s;
  return spec.k == 1 ? s : std::pow(s, 1.0 / spec.k);
}

}  // namespace

std::optional<double> f_eval(std::span<const double> lambda, const OperatorSpec& spec) {
  if (!in_closed_cone(lambda, spec.cone, spec.boundary_tol)) return std::nullopt;
  if (spec.family == FFamily::Custom) return spec.custom_f(lambda);
  return sigma_family_value(lambda, spec);
}

std::optional<double> f_extended(std::span<const double> lambda, const OperatorSpec& spec) {
  if (spec.family == FFamily::Custom) return spec.custom_f(lambda);
  const double s = sigma_k(lambda, spec.k);
  if (spec.family == FFamily::SigmaKRaw) return s;
  if (s < 0.0) {
    if (spec.k % 2 == 1) return -std::pow(-s, 1.0 / spec.k);
    return std::nullopt;
  }
  return spec.k == 1 ? s : std::pow(s, 1.0 / spec.k);
}

double f_diagonal(double t, const OperatorSpec& spec) {
  std::vector<double> l(static_cast<std::size_t>(spec.n), t);
  const auto v = f_eval(l, spec);
  if (!v) throw Error(ErrorCode::OutOfDomain, "diagonal point outside the closed cone");
  return *v;
}

double solve_diagonal_level(const OperatorSpec& spec, double target) {
  if (spec.family != FFamily::Custom) {
    // f(t,...,t) = C(n,k)^{1/k} t (root) or C(n,k) t^k (raw).
    double binom = 1.0;
    for (int i = 1; i <= spec.k; ++i) binom = binom * (spec.n - spec.k + i) / i;
    if (spec.family == FFamily::SigmaKRoot) return target / std::pow(binom, 1.0 / spec.k);
    return std::pow(target / binom, 1.0 / spec.k);
  }
  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (f_diagonal(hi, spec) < target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw Error(ErrorCode::BracketFailure, "f(t,...,t) never reaches the level");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f_diagonal(mid, spec) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

EllipticityProbe probe_strict_ellipticity(const OperatorSpec& spec, double lo, double hi,
                                          double step, int samples, Rng& rng) {
  EllipticityProbe probe;
  probe.sampled_infimum = std::numeric_limits<double>::infinity();
  std::vector<double> l(static_cast<std::size_t>(spec.n));
  std::vector<double> lm(l.size());
  for (int s = 0; s < samples; ++s) {
    for (auto& x : l) x = rng.uniform(lo, hi);
    if (!in_cone(l, spec.cone)) continue;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) {
      const double m = rng.uniform(0.0, step);
      lm[i] = l[i] + m;
      norm2 += m * m;
    }
    if (norm2 == 0.0) continue;
    const auto f0 = f_eval(l, spec);
    const auto f1 = f_eval(lm, spec);
    if (!f0 || !f1) continue;
    probe.sampled_infimum = std::min(probe.sampled_infimum, (*f1 - *f0) / std::sqrt(norm2));
    ++probe.samples;
  }
  return probe;
}

}  // namespace confvisc
