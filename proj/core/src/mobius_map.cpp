#include "confvisc/mobius_map.hpp"

#include <cmath>

namespace confvisc {

MobiusMap::MobiusMap(int n, std::vector<MobiusOp> ops) : n_(n), ops_(std::move(ops)) {
  for (const auto& op : ops_) {
    if (op.kind == MobiusOp::Kind::Dilate) {
      if (!(op.factor > 0.0)) throw Error(ErrorCode::BadParams, "dilation factor must be positive");
    } else if (op.vector.size() != n_) {
      throw Error(ErrorCode::BadDimension, "Mobius op vector has the wrong dimension");
    }
  }
}

MobiusMap MobiusMap::then(const MobiusMap& after) const {
  if (after.n_ != n_) throw Error(ErrorCode::BadDimension, "composing maps of different dimension");
  auto ops = ops_;
  ops.insert(ops.end(), after.ops_.begin(), after.ops_.end());
  return MobiusMap(n_, std::move(ops));
}

MobiusMap MobiusMap::then(const MobiusOp& op) const {
  auto ops = ops_;
  ops.push_back(op);
  return MobiusMap(n_, std::move(ops));
}

MobiusMap MobiusMap::inverse() const {
  std::vector<MobiusOp> inv;
  inv.reserve(ops_.size());
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
    switch (it->kind) {
      case MobiusOp::Kind::Translate: inv.push_back(MobiusOp::translate(-it->vector)); break;
      case MobiusOp::Kind::Dilate: inv.push_back(MobiusOp::dilate(1.0 / it->factor)); break;
      case MobiusOp::Kind::Invert: inv.push_back(*it); break;
    }
  }
  return MobiusMap(n_, std::move(inv));
}

MobiusMap MobiusMap::sphere_inversion(const Vec& center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::BadParams, "inversion radius must be positive");
  const int n = static_cast<int>(center.size());
  return MobiusMap(n, {MobiusOp::translate(-center), MobiusOp::dilate(1.0 / radius),
                       MobiusOp::invert(Vec::Zero(n)), MobiusOp::dilate(radius),
                       MobiusOp::translate(center)});
}

namespace {

Vec invert_point(const Vec& x, const Vec& c) {
  const Vec w = x - c;
  const double r2 = w.squaredNorm();
  if (std::sqrt(r2) <= kPoleTolerance) throw Error(ErrorCode::HitsPole, "point sits on an inversion center");
  return c + w / r2;
}

MapJet op_jet(const MobiusOp& op, const Vec& x) {
  const int n = static_cast<int>(x.size());
  MapJet j;
  j.second.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  switch (op.kind) {
    case MobiusOp::Kind::Translate:
      j.value = x + op.vector;
      j.jacobian = Mat::Identity(n, n);
      j.log_factor = Jet2::constant(n, 0.0);
      break;
    case MobiusOp::Kind::Dilate:
      j.value = op.factor * x;
      j.jacobian = op.factor * Mat::Identity(n, n);
      j.log_factor = Jet2::constant(n, std::log(op.factor));
      break;
    case MobiusOp::Kind::Invert: {
      const Vec w = x - op.vector;
      const double r2 = w.squaredNorm();
      if (std::sqrt(r2) <= kPoleTolerance)
        throw Error(ErrorCode::HitsPole, "point sits on an inversion center");
      const double r4 = r2 * r2;
      const double r6 = r4 * r2;
      j.value = op.vector + w / r2;
      j.jacobian = Mat::Identity(n, n) / r2 - 2.0 * w * w.transpose() / r4;
      for (int i = 0; i < n; ++i) {
        Mat& s = j.second[static_cast<std::size_t>(i)];
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            double v = 8.0 * w[i] * w[a] * w[b] / r6;
            if (i == a) v -= 2.0 * w[b] / r4;
            if (i == b) v -= 2.0 * w[a] / r4;
            if (a == b) v -= 2.0 * w[i] / r4;
            s(a, b) = v;
          }
        }
      }
      j.log_factor.value = -std::log(r2);
      j.log_factor.gradient = -2.0 * w / r2;
      j.log_factor.hessian =
          SymMatrix::from_upper(-2.0 * Mat::Identity(n, n) / r2 + 4.0 * w * w.transpose() / r4);
      break;
    }
  }
  return j;
}

// Jet of g o f at x, given the jet of f at x and of g at f(x).
MapJet compose(const MapJet& f, const MapJet& g) {
  const auto n = f.value.size();
  MapJet out;
  out.value = g.value;
  out.jacobian = g.jacobian * f.jacobian;
  out.second.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Mat s = f.jacobian.transpose() * g.second[static_cast<std::size_t>(i)] * f.jacobian;
    for (Eigen::Index m = 0; m < n; ++m) s += g.jacobian(i, m) * f.second[static_cast<std::size_t>(m)];
    out.second[static_cast<std::size_t>(i)] = s;
  }
  Jet2 lg = pull_back_scalar(g.log_factor, f);
  out.log_factor.value = lg.value + f.log_factor.value;
  out.log_factor.gradient = lg.gradient + f.log_factor.gradient;
  out.log_factor.hessian = lg.hessian + f.log_factor.hessian;
  return out;
}

MapJet identity_jet(const Vec& x) {
  const int n = static_cast<int>(x.size());
  MapJet j;
  j.value = x;
  j.jacobian = Mat::Identity(n, n);
  j.second.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  j.log_factor = Jet2::constant(n, 0.0);
  return j;
}

}  // namespace

Vec apply_map(const MobiusMap& phi, const Vec& x) {
  if (x.size() != phi.n()) throw Error(ErrorCode::BadDimension, "point dimension differs from map dimension");
  Vec y = x;
  for (const auto& op : phi.ops()) {
    switch (op.kind) {
      case MobiusOp::Kind::Translate: y += op.vector; break;
      case MobiusOp::Kind::Dilate: y *= op.factor; break;
      case MobiusOp::Kind::Invert: y = invert_point(y, op.vector); break;
    }
  }
  return y;
}

double jacobian_det(const MobiusMap& phi, const Vec& x) {
  if (x.size() != phi.n()) throw Error(ErrorCode::BadDimension, "point dimension differs from map dimension");
  const int n = phi.n();
  Vec y = x;
  double det = 1.0;
  for (const auto& op : phi.ops()) {
    switch (op.kind) {
      case MobiusOp::Kind::Translate: y += op.vector; break;
      case MobiusOp::Kind::Dilate:
        det *= std::pow(op.factor, n);
        y *= op.factor;
        break;
      case MobiusOp::Kind::Invert: {
        const double r2 = (y - op.vector).squaredNorm();
        if (std::sqrt(r2) <= kPoleTolerance)
          throw Error(ErrorCode::HitsPole, "point sits on an inversion center");
        det *= std::pow(r2, -n);
        y = invert_point(y, op.vector);
        break;
      }
    }
  }
  return det;
}

MapJet map_jet(const MobiusMap& phi, const Vec& x) {
  if (x.size() != phi.n()) throw Error(ErrorCode::BadDimension, "point dimension differs from map dimension");
  MapJet acc = identity_jet(x);
  for (const auto& op : phi.ops()) acc = compose(acc, op_jet(op, acc.value));
  return acc;
}

Jet2 pull_back_scalar(const Jet2& outer, const MapJet& inner) {
  const auto n = inner.value.size();
  Mat h = inner.jacobian.transpose() * outer.hessian.dense() * inner.jacobian;
  for (Eigen::Index m = 0; m < n; ++m) h += outer.gradient[m] * inner.second[static_cast<std::size_t>(m)];
  return Jet2(outer.value, inner.jacobian.transpose() * outer.gradient, SymMatrix::from_upper(h));
}

}  // namespace confvisc
