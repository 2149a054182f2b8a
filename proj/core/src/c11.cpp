#include <algorithm>

#include "confvisc/parallel.hpp"
#include "confvisc/viscosity.hpp"

namespace confvisc {

namespace {

// Verdict from the two paraboloids touching at x0. The one from above carries
// the lower bound F >= level, the one from below the upper bound F <= level.
Verdict touching_verdict(const Jet2& jet, double delta, const OperatorSpec& spec, double tol) {
  const int n = jet.n();
  Jet2 above = jet, below = jet;
  above.hessian += (2.0 * delta) * SymMatrix::identity(n);
  below.hessian -= (2.0 * delta) * SymMatrix::identity(n);
  const PointVerdict up = judge(Vec::Zero(n), evaluate_psi_jet(above, spec), spec, tol);
  const PointVerdict down = judge(Vec::Zero(n), evaluate_psi_jet(below, spec), spec, tol);
  const bool sub_holds = up.verdict == Verdict::OnLevel || up.verdict == Verdict::StrictSub;
  const bool super_holds = down.verdict == Verdict::OnLevel || is_super_side(down.verdict);
  if (up.verdict == Verdict::ConeViolation || down.verdict == Verdict::ConeViolation) return Verdict::ConeViolation;
  if (sub_holds && super_holds) return Verdict::OnLevel;
  if (sub_holds) return Verdict::StrictSub;
  if (super_holds) return down.verdict == Verdict::StrictSuper ? Verdict::StrictSuper : down.verdict;
  return Verdict::Kink;
}

bool same_side(Verdict a, Verdict b) {
  if (a == b) return true;
  return is_super_side(a) && is_super_side(b);
}

}  // namespace

C11Report verify_c11_equivalence(const PsiField& psi, const std::vector<Vec>& points, const OperatorSpec& spec,
                                 const C11Options& options) {
  spec.validate();
  if (psi.n() != spec.n) throw Error(ErrorCode::BadDimension, "field and operator dimensions differ");
  if (points.empty()) throw Error(ErrorCode::EmptyRegion, "no sample points");
  if (options.deltas.empty() || options.tail < 1) throw Error(ErrorCode::BadParams, "need at least one delta");
  auto deltas = options.deltas;
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  const auto tail = std::min<std::size_t>(static_cast<std::size_t>(options.tail), deltas.size());

  C11Report rep;
  rep.deltas = deltas;
  rep.points.resize(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    C11Point cp;
    cp.x = points[i];
    cp.regular = psi.regular(cp.x);
    if (cp.regular) {
      const Jet2 jet = psi.jet(cp.x);
      if (jet.hessian.frobenius() > options.hessian_bound)
        throw Error(ErrorCode::UnboundedHessian, "second derivatives exceed the C^{1,1} bound");
      cp.pointwise = judge(cp.x, evaluate_psi_jet(jet, spec), spec, options.tol).verdict;
      for (double d : deltas) cp.touching.push_back(touching_verdict(jet, d, spec, options.tol));
      cp.agrees = std::all_of(cp.touching.end() - static_cast<std::ptrdiff_t>(tail), cp.touching.end(),
                              [&](Verdict t) { return same_side(t, cp.pointwise); });
    }
    rep.points[i] = std::move(cp);
  });

  std::vector<PointVerdict> pointwise, touching;
  for (const auto& cp : rep.points) {
    if (!cp.regular) {
      ++rep.kink_points;
      continue;
    }
    ++rep.classified;
    if (cp.agrees) ++rep.agreeing;
    PointVerdict a;
    a.x = cp.x;
    a.verdict = cp.pointwise;
    a.value = 0.0;
    pointwise.push_back(a);
    a.verdict = cp.touching.back();
    touching.push_back(a);
  }
  if (rep.classified > 0) {
    rep.pointwise_aggregate = aggregate(pointwise, spec, options.tol).aggregate;
    rep.touching_aggregate = aggregate(touching, spec, options.tol).aggregate;
  }
  rep.pass = rep.classified > 0 && rep.agreeing == rep.classified &&
             rep.pointwise_aggregate == rep.touching_aggregate;
  return rep;
}

}  // namespace confvisc
