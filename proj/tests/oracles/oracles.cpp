#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/QR>

namespace oracle {

std::vector<double> char_poly(const Mat& a) {
  const auto n = a.rows();
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  c[static_cast<std::size_t>(n)] = 1.0;
  Mat m = Mat::Zero(n, n);
  const Mat id = Mat::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(n - k + 1)] * id;
    c[static_cast<std::size_t>(n - k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

std::vector<double> poly_roots(const std::vector<double>& c) {
  using C = std::complex<double>;
  const std::size_t n = c.size() - 1;
  std::vector<double> monic(c.size());
  for (std::size_t k = 0; k <= n; ++k) monic[k] = c[k] / c[n];
  double bound = 0.0;
  for (std::size_t k = 0; k < n; ++k) bound = std::max(bound, std::abs(monic[k]));
  bound += 1.0;
  auto eval = [&](C z) {
    C p = 1.0;
    for (std::size_t k = n; k-- > 0;) p = p * z + monic[k];
    return p;
  };
  std::vector<C> z(n);
  const C seed(0.4, 0.9);
  for (std::size_t i = 0; i < n; ++i) z[i] = bound * std::pow(seed, static_cast<double>(i));
  for (int it = 0; it < 2000; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      C denom = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= z[i] - z[j];
      const C step = eval(z[i]) / denom;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15 * bound) break;
  }
  std::vector<double> roots;
  for (const C& r : z) {
    double t = r.real();
    for (int it = 0; it < 5; ++it) {
      double p = 1.0, dp = 0.0;
      for (std::size_t k = n; k-- > 0;) {
        dp = dp * t + p;
        p = p * t + monic[k];
      }
      if (std::abs(dp) < 1e-8) break;
      t -= p / dp;
    }
    roots.push_back(t);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<double> eigenvalues_by_char_poly(const Mat& m) { return poly_roots(char_poly(m)); }

double sigma_k_by_minors(const Mat& m, int k) {
  const int n = static_cast<int>(m.rows());
  if (k == 0) return 1.0;
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) idx.push_back(i);
    Mat sub(k, k);
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s) sub(r, s) = m(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(s)]);
    total += sub.determinant();
  }
  return total;
}

double sigma_k_by_subsets(const std::vector<double>& lambda, int k) {
  const int n = static_cast<int>(lambda.size());
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    double p = 1.0;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) p *= lambda[static_cast<std::size_t>(i)];
    total += p;
  }
  return total;
}

namespace {
constexpr double kW[4] = {1.0, -8.0, 8.0, -1.0};
constexpr int kOff[4] = {-2, -1, 1, 2};
}  // namespace

Vec fd4_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < 4; ++a) {
      Vec y = x;
      y[i] += kOff[a] * h;
      s += kW[a] * f(y);
    }
    g[i] = s / (12.0 * h);
  }
  return g;
}

Mat fd4_hessian(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  const auto n = x.size();
  Mat hs(n, n);
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec y = x;
    auto at = [&](double t) {
      y = x;
      y[i] += t;
      return f(y);
    };
    hs(i, i) = (-at(2 * h) + 16.0 * at(h) - 30.0 * f0 + 16.0 * at(-h) - at(-2 * h)) / (12.0 * h * h);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          Vec z = x;
          z[i] += kOff[a] * h;
          z[j] += kOff[b] * h;
          s += kW[a] * kW[b] * f(z);
        }
      hs(i, j) = hs(j, i) = s / (144.0 * h * h);
    }
  }
  return hs;
}

double brute_sup_convolution(const confvisc::GridField& psi, double eps, std::size_t node) {
  const auto& g = psi.spec();
  const Vec x = g.coords(node);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < g.size(); ++f) best = std::max(best, psi[f] - (g.coords(f) - x).squaredNorm() / eps);
  return best;
}

namespace {

// Tableau rows 0..r-1 are constraints, last row is the objective (reduced costs,
// minimization). Last column is the right-hand side.
class Simplex {
public:
  Simplex(Mat t, std::vector<int> basis) : t_(std::move(t)), basis_(std::move(basis)) {}

  // Bland's rule over columns with allowed[c]. Returns false when unbounded.
  bool run(const std::vector<bool>& allowed) {
    const auto rows = t_.rows() - 1, rhs = t_.cols() - 1;
    for (int guard = 0; guard < 100000; ++guard) {
      Eigen::Index enter = -1;
      for (Eigen::Index c = 0; c < rhs; ++c)
        if (allowed[static_cast<std::size_t>(c)] && t_(rows, c) < -1e-12) {
          enter = c;
          break;
        }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < rows; ++r) {
        if (t_(r, enter) <= 1e-12) continue;
        const double ratio = t_(r, rhs) / t_(r, enter);
        if (ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && leave >= 0 && basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex did not terminate");
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i)
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    basis_[static_cast<std::size_t>(r)] = static_cast<int>(c);
  }

  Mat& tableau() { return t_; }
  std::vector<int>& basis() { return basis_; }

private:
  Mat t_;
  std::vector<int> basis_;
};

}  // namespace

double lp_concave_envelope(const std::vector<Vec>& points, const std::vector<double>& values, const Vec& x) {
  const auto m = static_cast<Eigen::Index>(points.size());
  const auto d = x.size();
  const Eigen::Index r = d + 1;
  Mat a(r, m);
  Vec b(r);
  for (Eigen::Index j = 0; j < m; ++j) {
    a.col(j).head(d) = points[static_cast<std::size_t>(j)];
    a(d, j) = 1.0;
  }
  b.head(d) = x;
  b[d] = 1.0;
  for (Eigen::Index i = 0; i < r; ++i)
    if (b[i] < 0.0) {
      a.row(i) *= -1.0;
      b[i] *= -1.0;
    }
  // Columns: m structural, r artificial, rhs.
  Mat t = Mat::Zero(r + 1, m + r + 1);
  t.topLeftCorner(r, m) = a;
  t.block(0, m, r, r) = Mat::Identity(r, r);
  t.col(m + r).head(r) = b;
  for (Eigen::Index j = 0; j < m; ++j) t(r, j) = -a.col(j).sum();
  t(r, m + r) = -b.sum();
  std::vector<int> basis;
  for (Eigen::Index i = 0; i < r; ++i) basis.push_back(static_cast<int>(m + i));
  Simplex s(std::move(t), std::move(basis));
  s.run(std::vector<bool>(static_cast<std::size_t>(m + r), true));
  if (std::abs(s.tableau()(r, m + r)) > 1e-9) throw std::runtime_error("point outside the convex hull");
  for (Eigen::Index i = 0; i < r; ++i) {
    if (s.basis()[static_cast<std::size_t>(i)] < m) continue;
    for (Eigen::Index j = 0; j < m; ++j)
      if (std::abs(s.tableau()(i, j)) > 1e-9) {
        s.pivot(i, j);
        break;
      }
  }
  // Phase two: minimize -values . w.
  Mat& tb = s.tableau();
  tb.row(r).setZero();
  for (Eigen::Index j = 0; j < m; ++j) tb(r, j) = -values[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 0; i < r; ++i) {
    const int bv = s.basis()[static_cast<std::size_t>(i)];
    if (bv < m && tb(r, bv) != 0.0) tb.row(r) -= tb(r, bv) * tb.row(i);
  }
  std::vector<bool> allowed(static_cast<std::size_t>(m + r), false);
  for (Eigen::Index j = 0; j < m; ++j) allowed[static_cast<std::size_t>(j)] = true;
  if (!s.run(allowed)) throw std::runtime_error("unbounded envelope LP");
  return tb(r, m + r);
}

confvisc::BubbleParams linear_bubble_fit(const std::vector<Vec>& xs, const std::vector<double>& vs, int n) {
  const auto rows = static_cast<Eigen::Index>(xs.size());
  Mat a(rows, n + 2);
  Vec w(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vec& x = xs[static_cast<std::size_t>(i)];
    a(i, 0) = x.squaredNorm();
    a.row(i).segment(1, n) = x.transpose();
    a(i, n + 1) = 1.0;
    w[i] = std::pow(vs[static_cast<std::size_t>(i)], -2.0 / (n - 2));
  }
  const Vec coef = a.colPivHouseholderQr().solve(w);
  const double qa = coef[0];
  const Vec qb = coef.segment(1, n);
  const double qc = coef[n + 1];
  confvisc::BubbleParams p;
  p.x0 = -qb / (2.0 * qa);
  p.a = 1.0 / (qc - qa * p.x0.squaredNorm());
  p.b = std::sqrt(qa * p.a);
  return p;
}

RadialJet radial_bubble_jet(const confvisc::BubbleParams& p, const Vec& x, int n) {
  const double m = 0.5 * (n - 2);
  const Vec d = x - p.x0;
  const double r = d.norm(), b2 = p.b * p.b;
  const double q = 1.0 + b2 * r * r;
  const double am = std::pow(p.a, m);
  const double g = am * std::pow(q, -m);
  // g'(r) = -2 m b^2 r a^m q^{-m-1}; g''(r) by the product rule.
  const double g1 = -2.0 * m * b2 * r * am * std::pow(q, -m - 1.0);
  const double g2 = -2.0 * m * b2 * am * std::pow(q, -m - 1.0) +
                    4.0 * m * (m + 1.0) * b2 * b2 * r * r * am * std::pow(q, -m - 2.0);
  RadialJet j{g, Vec::Zero(n), Mat::Zero(n, n)};
  if (r == 0.0) {
    j.hessian = g2 * Mat::Identity(n, n);
    return j;
  }
  const Vec e = d / r;
  j.gradient = g1 * e;
  j.hessian = g2 * e * e.transpose() + (g1 / r) * (Mat::Identity(n, n) - e * e.transpose());
  return j;
}

}  // namespace oracle
