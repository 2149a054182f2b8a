#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "confvisc/parallel.hpp"
#include "confvisc/viscosity.hpp"

namespace confvisc {

namespace {

constexpr int kMaxDim = 4;

struct Facet {
  std::array<int, kMaxDim> verts{};
  std::array<int, kMaxDim> neighbor{};  // neighbor[j] shares every vertex except verts[j]
  Vec normal;
  double offset = 0.0;
  std::vector<int> outside;
  bool alive = true;
  int mark = -1;
};

using RidgeKey = std::array<int, kMaxDim - 1>;

// Incremental hull (beneath-beyond with conflict lists) in dimension D <= 4.
class Hull {
public:
  Hull(const std::vector<Vec>& pts, double eps) : p_(pts), d_(static_cast<int>(pts.front().size())), eps_(eps) {}

  // False when the points do not span a full-dimensional simplex.
  bool build() {
    std::vector<int> simplex;
    if (!initial_simplex(simplex)) return false;
    interior_ = Vec::Zero(d_);
    for (int v : simplex) interior_ += p_[static_cast<std::size_t>(v)];
    interior_ /= static_cast<double>(simplex.size());

    for (int skip = 0; skip <= d_; ++skip) {
      Facet f;
      int k = 0;
      for (int v = 0; v <= d_; ++v)
        if (v != skip) f.verts[static_cast<std::size_t>(k++)] = simplex[static_cast<std::size_t>(v)];
      // Facet `skip` misses simplex vertex `skip`; across the ridge missing
      // verts[j] lies the facet that misses that vertex.
      k = 0;
      for (int v = 0; v <= d_; ++v)
        if (v != skip) f.neighbor[static_cast<std::size_t>(k++)] = v;
      plane(f);
      facets_.push_back(std::move(f));
    }
    std::vector<bool> used(p_.size(), false);
    for (int v : simplex) used[static_cast<std::size_t>(v)] = true;
    std::vector<int> all;
    for (std::size_t i = 0; i < p_.size(); ++i)
      if (!used[i]) all.push_back(static_cast<int>(i));
    std::vector<int> first;
    for (int i = 0; i <= d_; ++i) first.push_back(i);
    assign(all, first);

    std::deque<int> queue(first.begin(), first.end());
    while (!queue.empty()) {
      const int fi = queue.front();
      queue.pop_front();
      if (!facets_[static_cast<std::size_t>(fi)].alive || facets_[static_cast<std::size_t>(fi)].outside.empty())
        continue;
      for (int nf : add_point(fi)) queue.push_back(nf);
    }
    return true;
  }

  const std::vector<Facet>& facets() const { return facets_; }

private:
  double dist(const Facet& f, int i) const { return f.normal.dot(p_[static_cast<std::size_t>(i)]) - f.offset; }

  void plane(Facet& f) const {
    const Vec& base = p_[static_cast<std::size_t>(f.verts[0])];
    Mat m(d_ - 1, d_);
    for (int r = 1; r < d_; ++r) m.row(r - 1) = (p_[static_cast<std::size_t>(f.verts[static_cast<std::size_t>(r)])] - base).transpose();
    Vec normal(d_);
    for (int c = 0; c < d_; ++c) {
      Mat minor(d_ - 1, d_ - 1);
      for (int cc = 0, k = 0; cc < d_; ++cc) {
        if (cc == c) continue;
        minor.col(k++) = m.col(cc);
      }
      normal[c] = ((c % 2) ? -1.0 : 1.0) * minor.determinant();
    }
    const double len = normal.norm();
    if (len > 0.0) normal /= len;
    f.normal = normal;
    f.offset = normal.dot(base);
    if (f.normal.dot(interior_) - f.offset > 0.0) {
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
  }

  bool initial_simplex(std::vector<int>& simplex) const {
    const auto count = p_.size();
    int first = 0;
    for (std::size_t i = 1; i < count; ++i)
      if (p_[i][0] < p_[static_cast<std::size_t>(first)][0]) first = static_cast<int>(i);
    simplex = {first};
    std::vector<Vec> basis;
    const Vec& origin = p_[static_cast<std::size_t>(first)];
    while (static_cast<int>(simplex.size()) < d_ + 1) {
      double best = -1.0;
      int arg = -1;
      Vec best_dir;
      for (std::size_t i = 0; i < count; ++i) {
        Vec r = p_[i] - origin;
        for (const auto& b : basis) r -= r.dot(b) * b;
        const double len = r.norm();
        if (len > best) {
          best = len;
          arg = static_cast<int>(i);
          best_dir = r;
        }
      }
      if (best <= eps_) return false;
      basis.push_back(best_dir / best);
      simplex.push_back(arg);
    }
    return true;
  }

  void assign(const std::vector<int>& points, const std::vector<int>& candidates) {
    for (int i : points) {
      double best = eps_;
      int arg = -1;
      for (int fi : candidates) {
        const double dd = dist(facets_[static_cast<std::size_t>(fi)], i);
        if (dd > best) {
          best = dd;
          arg = fi;
        }
      }
      if (arg >= 0) facets_[static_cast<std::size_t>(arg)].outside.push_back(i);
    }
  }

  static RidgeKey key_without(const Facet& f, int j, int d) {
    RidgeKey k{};
    k.fill(-1);
    int c = 0;
    for (int t = 0; t < d; ++t)
      if (t != j) k[static_cast<std::size_t>(c++)] = f.verts[static_cast<std::size_t>(t)];
    std::sort(k.begin(), k.begin() + c);
    return k;
  }

  std::vector<int> add_point(int start) {
    const Facet& sf = facets_[static_cast<std::size_t>(start)];
    int apex = sf.outside.front();
    double far = dist(sf, apex);
    for (int i : sf.outside) {
      const double dd = dist(sf, i);
      if (dd > far) {
        far = dd;
        apex = i;
      }
    }
    ++stamp_;
    std::vector<int> visible{start};
    facets_[static_cast<std::size_t>(start)].mark = stamp_;
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const Facet& f = facets_[static_cast<std::size_t>(visible[q])];
      for (int j = 0; j < d_; ++j) {
        const int nb = f.neighbor[static_cast<std::size_t>(j)];
        Facet& g = facets_[static_cast<std::size_t>(nb)];
        if (g.mark == stamp_) continue;
        if (dist(g, apex) > eps_) {
          g.mark = stamp_;
          visible.push_back(nb);
        }
      }
    }

    std::vector<int> created;
    std::map<RidgeKey, std::pair<int, int>> open;  // ridge -> (facet, slot)
    for (int vf : visible) {
      for (int j = 0; j < d_; ++j) {
        const int nb = facets_[static_cast<std::size_t>(vf)].neighbor[static_cast<std::size_t>(j)];
        if (facets_[static_cast<std::size_t>(nb)].mark == stamp_) continue;
        Facet nf;
        for (int t = 0; t < d_; ++t) nf.verts[static_cast<std::size_t>(t)] = facets_[static_cast<std::size_t>(vf)].verts[static_cast<std::size_t>(t)];
        nf.verts[static_cast<std::size_t>(j)] = apex;
        nf.neighbor[static_cast<std::size_t>(j)] = nb;
        plane(nf);
        const int id = static_cast<int>(facets_.size());
        Facet& other = facets_[static_cast<std::size_t>(nb)];
        for (int t = 0; t < d_; ++t)
          if (other.neighbor[static_cast<std::size_t>(t)] == vf) other.neighbor[static_cast<std::size_t>(t)] = id;
        facets_.push_back(std::move(nf));
        created.push_back(id);
        for (int t = 0; t < d_; ++t) {
          if (t == j) continue;
          const RidgeKey k = key_without(facets_.back(), t, d_);
          auto it = open.find(k);
          if (it == open.end()) {
            open.emplace(k, std::make_pair(id, t));
          } else {
            facets_.back().neighbor[static_cast<std::size_t>(t)] = it->second.first;
            facets_[static_cast<std::size_t>(it->second.first)].neighbor[static_cast<std::size_t>(it->second.second)] = id;
            open.erase(it);
          }
        }
      }
    }
    std::vector<int> orphans;
    for (int vf : visible) {
      Facet& f = facets_[static_cast<std::size_t>(vf)];
      f.alive = false;
      for (int i : f.outside)
        if (i != apex) orphans.push_back(i);
      f.outside.clear();
    }
    assign(orphans, created);
    return created;
  }

  const std::vector<Vec>& p_;
  int d_;
  double eps_;
  Vec interior_;
  std::vector<Facet> facets_;
  int stamp_ = 0;
};

}  // namespace

EnvelopeResult concave_envelope(const GridField& xi, double contact_rel) {
  const auto& g = xi.spec();
  const int n = g.n();
  if (n > 3) throw Error(ErrorCode::DimensionTooHigh, "concave envelope supports n <= 3");
  const auto& v = xi.values();
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it, range = *hi_it - *lo_it;

  EnvelopeResult res{xi.with_values(v, GridField::Kind::Psi), {}, contact_rel * range, 0};
  std::vector<double> env = v;
  if (range > 0.0) {
    std::vector<Vec> pts(g.size(), Vec(n + 1));
    double scale = 1.0;
    for (std::size_t f = 0; f < g.size(); ++f) {
      const Index idx = g.unflat(f);
      for (int a = 0; a < n; ++a) pts[f][a] = idx[static_cast<std::size_t>(a)];
      pts[f][n] = (v[f] - lo) / range;
    }
    for (int e : g.extents) scale = std::max(scale, static_cast<double>(e));
    Hull hull(pts, 1e-11 * scale);
    if (hull.build()) {
      std::vector<const Facet*> upper;
      for (const auto& f : hull.facets())
        if (f.alive && f.normal[n] > 1e-9) upper.push_back(&f);
      res.hull_facets = upper.size();
      parallel_for(g.size(), [&](std::size_t f) {
        double best = std::numeric_limits<double>::infinity();
        for (const Facet* fc : upper) {
          double s = fc->offset;
          for (int a = 0; a < n; ++a) s -= fc->normal[a] * pts[f][a];
          best = std::min(best, s / fc->normal[n]);
        }
        env[f] = std::max(v[f], lo + range * best);
      });
    }
  }
  res.envelope = xi.with_values(env, GridField::Kind::Psi);
  for (std::size_t f = 0; f < g.size(); ++f)
    if (v[f] >= env[f] - res.contact_tol) res.contact_nodes.push_back(f);
  return res;
}

}  // namespace confvisc
