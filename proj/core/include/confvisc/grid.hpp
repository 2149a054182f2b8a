#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "confvisc/jet.hpp"
#include "confvisc/types.hpp"

namespace confvisc {

using Index = std::vector<int>;

/// Uniform rectilinear grid. Node i sits at origin + i * spacing, flattened
/// row-major with the last axis fastest.
struct GridSpec {
  Vec origin;
  Vec spacing;
  std::vector<int> extents;

  /// A grid of `nodes` points per axis covering [lo, hi]^n.
  static GridSpec cube(int n, double lo, double hi, int nodes);

  int n() const { return static_cast<int>(extents.size()); }
  std::size_t size() const;
  std::size_t flat(const Index& idx) const;
  Index unflat(std::size_t flat) const;
  Vec coords(const Index& idx) const;
  Vec coords(std::size_t flat) const { return coords(unflat(flat)); }
  bool contains(const Index& idx) const;
  /// Nodes at least `margin` steps away from every face.
  bool interior(const Index& idx, int margin = 1) const;

  /// Throws BadParams on non-positive spacing or fewer than 5 nodes on an axis.
  void validate() const;
};

enum class BoundaryPolicy { Clip, Reflect, Reject };

std::string_view to_string(BoundaryPolicy p) noexcept;
BoundaryPolicy boundary_policy_from_string(std::string_view s);

/// Sampled scalar values on a grid. Kind::U stores a positive field u;
/// Kind::Psi stores an arbitrary real field (log-form or test data).
class GridField {
public:
  enum class Kind { U, Psi };

  GridField(GridSpec spec, std::vector<double> values, Kind kind = Kind::U,
            BoundaryPolicy policy = BoundaryPolicy::Reject);

  const GridSpec& spec() const { return spec_; }
  const std::vector<double>& values() const { return values_; }
  Kind kind() const { return kind_; }
  BoundaryPolicy policy() const { return policy_; }
  int n() const { return spec_.n(); }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t flat) const { return values_[flat]; }
  double at(const Index& idx) const { return values_[spec_.flat(idx)]; }

  /// Smallest stored value (the positivity floor for Kind::U).
  double positivity_floor() const { return floor_; }

  GridField with_values(std::vector<double> values, Kind kind) const;

  /// Node value after applying the boundary policy to an out-of-range index.
  double lookup(Index idx) const;

private:
  GridSpec spec_;
  std::vector<double> values_;
  Kind kind_;
  BoundaryPolicy policy_;
  double floor_ = 0.0;
};

/// Centered second-order jet of the stored values at a node: 2-point first
/// differences, 3-point second differences, 4-point cross stencil for mixed
/// terms. Nodes on the outer layer need Clip or Reflect.
Jet2 fd_jet(const GridField& gf, const Index& node);

/// Jet of psi = -ln u from the u-stencil (Kind::U only).
Jet2 fd_jet_psi(const GridField& gf, const Index& node);

/// The same stencils applied to a function evaluated at x +- h e_i (+- h e_j).
Jet2 fd_jet_of(const std::function<double(const Vec&)>& f, const Vec& x, double h);

/// Multilinear interpolation. Outside the grid: OutOfDomain, unless the
/// policy is Clip, in which case the point is clamped to the box.
double multilinear(const GridField& gf, const Vec& x);

/// Nearest node, clamped to the grid.
Index nearest_node(const GridSpec& spec, const Vec& x);

/// JSON header plus CSV body. The header names the CSV file, which is written
/// next to it. Values print with 17 significant digits, so a write/read pair
/// reproduces every double bit for bit.
struct GridDocuments {
  std::string header;  // JSON
  std::string values;  // CSV
};
/// The two documents of the grid file format, in memory.
GridDocuments grid_documents(const GridField& gf, const std::string& values_file);

void write_grid(const GridField& gf, const std::filesystem::path& header_path);
GridField read_grid(const std::filesystem::path& header_path);

}  // namespace confvisc
