#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "confvisc/conformal.hpp"
#include "confvisc/fields.hpp"
#include "confvisc/grid.hpp"

namespace confvisc {

enum class ConvolutionKind { Sup, Inf };

struct ConvolutionResult {
  GridField regularized;
  double eps = 0.0;
  std::vector<std::size_t> argmax;  // flat index of the maximizer (minimizer for Inf) per node
  ConvolutionKind kind = ConvolutionKind::Sup;
};

/// max over grid nodes y of psi(y) - |x - y|^2 / eps, at every node x. Exact
/// for the discrete problem; one lower-envelope pass per axis.
ConvolutionResult sup_convolve(const GridField& psi, double eps);

/// min over grid nodes y of psi(y) + |x - y|^2 / eps. Equals -sup_convolve(-psi).
ConvolutionResult inf_convolve(const GridField& psi, double eps);

struct SemiconvexReport {
  double bound = 0.0;
  double stencil_tol = 0.0;
  double min_eigenvalue = 0.0;             // min over interior nodes of the FD Hessian's smallest eigenvalue
  double min_axis_second_difference = 0.0;  // min over interior nodes and axes of D_ii
  std::vector<double> node_min_eigenvalue;  // per flat index, NaN on the outer layer
  std::vector<std::size_t> violations;
  bool pass = false;
};

/// Every interior node's FD Hessian has smallest eigenvalue >= -bound - stencil_tol.
SemiconvexReport certify_semiconvex(const GridField& psi_hat, double bound, double stencil_tol = 0.0);

std::string convolution_csv(const GridField& psi, const ConvolutionResult& r, const SemiconvexReport& s);
nlohmann::json convolution_json(const ConvolutionResult& r, const SemiconvexReport& s);

struct EnvelopeResult {
  GridField envelope;
  std::vector<std::size_t> contact_nodes;
  double contact_tol = 0.0;
  std::size_t hull_facets = 0;
};

/// Concave envelope of grid data over the grid box: the smallest concave
/// function above xi, from the upper hull of the graph points. n <= 3.
/// contact = { xi >= envelope - contact_rel * (max xi - min xi) }.
EnvelopeResult concave_envelope(const GridField& xi, double contact_rel = 1e-9);

struct C11Point {
  Vec x;
  bool regular = true;
  Verdict pointwise = Verdict::Kink;
  std::vector<Verdict> touching;  // per delta
  bool agrees = false;
};

struct C11Report {
  std::vector<double> deltas;
  std::vector<C11Point> points;
  int kink_points = 0;
  int agreeing = 0;
  int classified = 0;
  Aggregate pointwise_aggregate = Aggregate::Mixed;
  Aggregate touching_aggregate = Aggregate::Mixed;
  bool pass = false;
};

struct C11Options {
  std::vector<double> deltas = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10};
  /// Agreement is required on this many of the smallest deltas.
  int tail = 3;
  double tol = 1e-8;
  double hessian_bound = 1e8;
};

/// Pointwise classification versus the touching-paraboloid test
/// T2 psi(x0) +- delta |x - x0|^2 at every sample point. Non-regular points are
/// counted as kinks and left unclassified. Throws UnboundedHessian when a jet
/// exceeds the bound.
C11Report verify_c11_equivalence(const PsiField& psi, const std::vector<Vec>& points, const OperatorSpec& spec,
                                 const C11Options& options = {});

}  // namespace confvisc
