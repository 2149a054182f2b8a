#include <cmath>
#include <limits>

#include "confvisc/parallel.hpp"
#include "confvisc/report.hpp"
#include "confvisc/symfun.hpp"
#include "confvisc/viscosity.hpp"

namespace confvisc {

namespace {

// Lower envelope of the parabolas f[j] + c (i - j)^2 over i = 0..m-1.
void envelope_1d(const std::vector<double>& f, double c, std::vector<double>& out, std::vector<int>& arg,
                 std::vector<int>& v, std::vector<double>& z) {
  const int m = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  v.assign(static_cast<std::size_t>(m), 0);
  z.assign(static_cast<std::size_t>(m) + 1, 0.0);
  int k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  auto meet = [&](int q, int p) {
    return ((f[static_cast<std::size_t>(q)] + c * q * q) - (f[static_cast<std::size_t>(p)] + c * p * p)) /
           (2.0 * c * (q - p));
  };
  for (int q = 1; q < m; ++q) {
    double s = meet(q, v[static_cast<std::size_t>(k)]);
    while (s <= z[static_cast<std::size_t>(k)]) {
      --k;
      s = meet(q, v[static_cast<std::size_t>(k)]);
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < m; ++q) {
    while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
    const int j = v[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(q)] = c * (q - j) * (q - j) + f[static_cast<std::size_t>(j)];
    arg[static_cast<std::size_t>(q)] = j;
  }
}

// min over nodes y of f(y) + |x - y|^2 / eps, with the minimizing flat index.
std::pair<std::vector<double>, std::vector<std::size_t>> min_convolve(const GridSpec& g, std::vector<double> f,
                                                                      double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::BadParams, "eps must be positive");
  const int n = g.n();
  const std::size_t total = g.size();
  std::vector<std::size_t> arg(total);
  for (std::size_t i = 0; i < total; ++i) arg[i] = i;

  for (int axis = 0; axis < n; ++axis) {
    const auto sa = static_cast<std::size_t>(axis);
    const int m = g.extents[sa];
    std::size_t stride = 1;
    for (int b = n - 1; b > axis; --b) stride *= static_cast<std::size_t>(g.extents[static_cast<std::size_t>(b)]);
    const double c = g.spacing[axis] * g.spacing[axis] / eps;
    const std::size_t lines = total / static_cast<std::size_t>(m);

    std::vector<double> next(total);
    std::vector<std::size_t> next_arg(total);
    parallel_for(lines, [&](std::size_t line) {
      // Line start: split line number into (outer, inner) around this axis.
      const std::size_t outer = line / stride, inner = line % stride;
      const std::size_t start = outer * stride * static_cast<std::size_t>(m) + inner;
      std::vector<double> in(static_cast<std::size_t>(m)), out(static_cast<std::size_t>(m));
      std::vector<int> which(static_cast<std::size_t>(m)), v;
      std::vector<double> z;
      for (int i = 0; i < m; ++i) in[static_cast<std::size_t>(i)] = f[start + static_cast<std::size_t>(i) * stride];
      envelope_1d(in, c, out, which, v, z);
      for (int i = 0; i < m; ++i) {
        const auto si = static_cast<std::size_t>(i);
        // Keep the node itself on ties.
        if (in[si] <= out[si]) {
          out[si] = in[si];
          which[si] = i;
        }
        const std::size_t node = start + si * stride;
        next[node] = out[si];
        next_arg[node] = arg[start + static_cast<std::size_t>(which[si]) * stride];
      }
    });
    f = std::move(next);
    arg = std::move(next_arg);
  }
  return {std::move(f), std::move(arg)};
}

}  // namespace

ConvolutionResult sup_convolve(const GridField& psi, double eps) {
  std::vector<double> neg(psi.values().size());
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -psi[i];
  auto [vals, arg] = min_convolve(psi.spec(), std::move(neg), eps);
  for (auto& v : vals) v = -v;
  return {psi.with_values(std::move(vals), GridField::Kind::Psi), eps, std::move(arg), ConvolutionKind::Sup};
}

ConvolutionResult inf_convolve(const GridField& psi, double eps) {
  auto [vals, arg] = min_convolve(psi.spec(), psi.values(), eps);
  return {psi.with_values(std::move(vals), GridField::Kind::Psi), eps, std::move(arg), ConvolutionKind::Inf};
}

SemiconvexReport certify_semiconvex(const GridField& psi_hat, double bound, double stencil_tol) {
  const auto& g = psi_hat.spec();
  SemiconvexReport r;
  r.bound = bound;
  r.stencil_tol = stencil_tol;
  r.node_min_eigenvalue.assign(g.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> axis_min(g.size(), std::numeric_limits<double>::infinity());
  parallel_for(g.size(), [&](std::size_t f) {
    const Index idx = g.unflat(f);
    if (!g.interior(idx)) return;
    const Jet2 jet = fd_jet(psi_hat, idx);
    r.node_min_eigenvalue[f] = eigen_sym(jet.hessian).eigenvalues[0];
    for (int a = 0; a < g.n(); ++a) axis_min[f] = std::min(axis_min[f], jet.hessian(a, a));
  });
  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  r.min_axis_second_difference = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < g.size(); ++f) {
    const double e = r.node_min_eigenvalue[f];
    if (std::isnan(e)) continue;
    r.min_eigenvalue = std::min(r.min_eigenvalue, e);
    r.min_axis_second_difference = std::min(r.min_axis_second_difference, axis_min[f]);
    if (e < -bound - stencil_tol) r.violations.push_back(f);
  }
  r.pass = r.violations.empty() && std::isfinite(r.min_eigenvalue);
  return r;
}

std::string convolution_csv(const GridField& psi, const ConvolutionResult& r, const SemiconvexReport& s) {
  const auto& g = psi.spec();
  auto cols = std::vector<std::string>{"index"};
  for (auto& c : axis_columns("x", g.n())) cols.push_back(c);
  cols.emplace_back("psi");
  cols.emplace_back("psi_hat");
  for (auto& c : axis_columns("xstar", g.n())) cols.push_back(c);
  cols.emplace_back("min_eigenvalue");
  CsvTable t(cols);
  for (std::size_t f = 0; f < g.size(); ++f) {
    t.row().cell(f).cells(g.coords(f)).cell(psi[f]).cell(r.regularized[f]).cells(g.coords(r.argmax[f]));
    if (std::isnan(s.node_min_eigenvalue[f])) t.cell(std::string_view{});
    else t.cell(s.node_min_eigenvalue[f]);
  }
  return t.str();
}

nlohmann::json convolution_json(const ConvolutionResult& r, const SemiconvexReport& s) {
  return {{"kind", r.kind == ConvolutionKind::Sup ? "sup" : "inf"},
          {"eps", r.eps},
          {"nodes", r.regularized.size()},
          {"semiconvexity",
           {{"verdict", s.pass ? "PASS" : "FAIL"},
            {"bound", s.bound},
            {"stencil_tol", s.stencil_tol},
            {"min_eigenvalue", s.min_eigenvalue},
            {"min_axis_second_difference", s.min_axis_second_difference},
            {"violations", s.violations.size()}}}};
}

}  // namespace confvisc
