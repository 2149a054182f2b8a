#include "confvisc/grid.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

#include "confvisc/report.hpp"

namespace confvisc {

GridSpec GridSpec::cube(int n, double lo, double hi, int nodes) {
  GridSpec g;
  g.origin = Vec::Constant(n, lo);
  g.spacing = Vec::Constant(n, (hi - lo) / (nodes - 1));
  g.extents.assign(static_cast<std::size_t>(n), nodes);
  return g;
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int e : extents) s *= static_cast<std::size_t>(e);
  return s;
}

std::size_t GridSpec::flat(const Index& idx) const {
  std::size_t f = 0;
  for (std::size_t a = 0; a < extents.size(); ++a)
    f = f * static_cast<std::size_t>(extents[a]) + static_cast<std::size_t>(idx[a]);
  return f;
}

Index GridSpec::unflat(std::size_t f) const {
  Index idx(extents.size());
  for (std::size_t a = extents.size(); a-- > 0;) {
    const auto e = static_cast<std::size_t>(extents[a]);
    idx[a] = static_cast<int>(f % e);
    f /= e;
  }
  return idx;
}

Vec GridSpec::coords(const Index& idx) const {
  Vec x(n());
  for (int a = 0; a < n(); ++a) x[a] = origin[a] + idx[static_cast<std::size_t>(a)] * spacing[a];
  return x;
}

bool GridSpec::contains(const Index& idx) const {
  for (std::size_t a = 0; a < extents.size(); ++a)
    if (idx[a] < 0 || idx[a] >= extents[a]) return false;
  return true;
}

bool GridSpec::interior(const Index& idx, int margin) const {
  for (std::size_t a = 0; a < extents.size(); ++a)
    if (idx[a] < margin || idx[a] >= extents[a] - margin) return false;
  return true;
}

void GridSpec::validate() const {
  if (extents.empty()) throw Error(ErrorCode::BadParams, "grid has no axes");
  if (origin.size() != n() || spacing.size() != n())
    throw Error(ErrorCode::BadDimension, "grid origin/spacing do not match the number of axes");
  for (int a = 0; a < n(); ++a) {
    if (!(spacing[a] > 0.0)) throw Error(ErrorCode::BadParams, "grid spacing must be positive");
    if (extents[static_cast<std::size_t>(a)] < 5)
      throw Error(ErrorCode::BadParams, "grid needs at least 5 nodes per axis");
  }
}

std::string_view to_string(BoundaryPolicy p) noexcept {
  switch (p) {
    case BoundaryPolicy::Clip: return "clip";
    case BoundaryPolicy::Reflect: return "reflect";
    case BoundaryPolicy::Reject: return "reject";
  }
  return "reject";
}

BoundaryPolicy boundary_policy_from_string(std::string_view s) {
  if (s == "clip") return BoundaryPolicy::Clip;
  if (s == "reflect") return BoundaryPolicy::Reflect;
  if (s == "reject") return BoundaryPolicy::Reject;
  throw Error(ErrorCode::ConfigError, "unknown boundary policy '" + std::string(s) + "'");
}

GridField::GridField(GridSpec spec, std::vector<double> values, Kind kind, BoundaryPolicy policy)
    : spec_(std::move(spec)), values_(std::move(values)), kind_(kind), policy_(policy) {
  spec_.validate();
  if (values_.size() != spec_.size())
    throw Error(ErrorCode::BadParams, "grid value count does not match the extents");
  floor_ = *std::min_element(values_.begin(), values_.end());
  if (kind_ == Kind::U && !(floor_ > 0.0))
    throw Error(ErrorCode::NonPositiveU, "grid field u must be strictly positive");
}

GridField GridField::with_values(std::vector<double> values, Kind kind) const {
  return GridField(spec_, std::move(values), kind, policy_);
}

double GridField::lookup(Index idx) const {
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const int e = spec_.extents[a];
    if (idx[a] >= 0 && idx[a] < e) continue;
    switch (policy_) {
      case BoundaryPolicy::Reject:
        throw Error(ErrorCode::TooCloseToBoundary, "stencil leaves the grid");
      case BoundaryPolicy::Clip: idx[a] = std::clamp(idx[a], 0, e - 1); break;
      case BoundaryPolicy::Reflect: {
        const int period = 2 * (e - 1);
        int i = ((idx[a] % period) + period) % period;
        idx[a] = i < e ? i : period - i;
        break;
      }
    }
  }
  return values_[spec_.flat(idx)];
}

namespace {

template <class Sample>
Jet2 stencil_jet(int n, const Vec& h, Sample&& at) {
  // at(i, si, j, sj): value at the node shifted by si along i and sj along j.
  const double c = at(0, 0, 0, 0);
  Vec grad(n);
  SymMatrix hess(n);
  for (int i = 0; i < n; ++i) {
    const double p = at(i, 1, i, 0), m = at(i, -1, i, 0);
    grad[i] = (p - m) / (2.0 * h[i]);
    hess.set(i, i, (p - 2.0 * c + m) / (h[i] * h[i]));
    for (int j = i + 1; j < n; ++j) {
      const double pp = at(i, 1, j, 1), pm = at(i, 1, j, -1), mp = at(i, -1, j, 1), mm = at(i, -1, j, -1);
      hess.set(i, j, (pp - pm - mp + mm) / (4.0 * h[i] * h[j]));
    }
  }
  return Jet2(c, std::move(grad), std::move(hess));
}

}  // namespace

Jet2 fd_jet(const GridField& gf, const Index& node) {
  if (!gf.spec().contains(node)) throw Error(ErrorCode::OutOfDomain, "node outside the grid");
  Index shifted = node;
  return stencil_jet(gf.n(), gf.spec().spacing, [&](int i, int si, int j, int sj) {
    shifted = node;
    shifted[static_cast<std::size_t>(i)] += si;
    shifted[static_cast<std::size_t>(j)] += sj;
    return gf.lookup(shifted);
  });
}

Jet2 fd_jet_psi(const GridField& gf, const Index& node) {
  if (gf.kind() != GridField::Kind::U) throw Error(ErrorCode::BadParams, "psi jets need a u-grid");
  return log_jet_from_u(fd_jet(gf, node));
}

Jet2 fd_jet_of(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  const int n = static_cast<int>(x.size());
  Vec y = x;
  return stencil_jet(n, Vec::Constant(n, h), [&](int i, int si, int j, int sj) {
    y = x;
    y[i] += si * h;
    y[j] += sj * h;
    return f(y);
  });
}

double multilinear(const GridField& gf, const Vec& x) {
  const auto& g = gf.spec();
  const int n = g.n();
  if (x.size() != n) throw Error(ErrorCode::BadDimension, "point dimension differs from grid dimension");
  Index base(static_cast<std::size_t>(n));
  std::vector<double> frac(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const auto sa = static_cast<std::size_t>(a);
    double t = (x[a] - g.origin[a]) / g.spacing[a];
    const double top = g.extents[sa] - 1;
    if (t < -1e-12 || t > top + 1e-12) {
      if (gf.policy() != BoundaryPolicy::Clip) throw Error(ErrorCode::OutOfDomain, "point outside the grid box");
    }
    t = std::clamp(t, 0.0, top);
    int i = static_cast<int>(std::floor(t));
    if (i >= g.extents[sa] - 1) i = g.extents[sa] - 2;
    base[sa] = i;
    frac[sa] = t - i;
  }
  double acc = 0.0;
  Index corner(static_cast<std::size_t>(n));
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      const auto sa = static_cast<std::size_t>(a);
      const bool up = (mask >> a) & 1u;
      corner[sa] = base[sa] + (up ? 1 : 0);
      w *= up ? frac[sa] : 1.0 - frac[sa];
    }
    if (w != 0.0) acc += w * gf.at(corner);
  }
  return acc;
}

Index nearest_node(const GridSpec& g, const Vec& x) {
  Index idx(static_cast<std::size_t>(g.n()));
  for (int a = 0; a < g.n(); ++a) {
    const auto sa = static_cast<std::size_t>(a);
    const long r = std::lround((x[a] - g.origin[a]) / g.spacing[a]);
    idx[sa] = static_cast<int>(std::clamp<long>(r, 0, g.extents[sa] - 1));
  }
  return idx;
}

namespace {

std::vector<double> to_vector(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Vec from_json_vector(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double parse_double(const std::string& cell, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || (errno == ERANGE && std::isinf(v)))
    throw Error(ErrorCode::IoError, "bad number '" + cell + "' on CSV line " + std::to_string(line));
  return v;
}

}  // namespace

GridDocuments grid_documents(const GridField& gf, const std::string& values_file) {
  const auto& g = gf.spec();
  nlohmann::json header;
  header["dimension"] = g.n();
  header["origin"] = to_vector(g.origin);
  header["spacing"] = to_vector(g.spacing);
  header["extents"] = g.extents;
  header["positivity_floor"] = gf.positivity_floor();
  header["boundary_policy"] = std::string(to_string(gf.policy()));
  header["kind"] = gf.kind() == GridField::Kind::U ? "u" : "psi";
  header["values_file"] = values_file;

  auto cols = std::vector<std::string>{"index"};
  for (auto& c : axis_columns("x", g.n())) cols.push_back(c);
  cols.emplace_back("value");
  CsvTable table(cols);
  for (std::size_t f = 0; f < gf.size(); ++f) table.row().cell(f).cells(g.coords(f)).cell(gf[f]);
  return {header.dump(2) + "\n", table.str()};
}

void write_grid(const GridField& gf, const std::filesystem::path& header_path) {
  auto csv_path = header_path;
  csv_path.replace_extension(".csv");
  const GridDocuments docs = grid_documents(gf, csv_path.filename().string());
  write_text(header_path, docs.header);
  write_text(csv_path, docs.values);
}

GridField read_grid(const std::filesystem::path& header_path) {
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(read_text(header_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, header_path.string() + ": " + e.what());
  }
  GridSpec g;
  int n = 0;
  std::filesystem::path csv_path;
  GridField::Kind kind = GridField::Kind::U;
  BoundaryPolicy policy = BoundaryPolicy::Reject;
  try {
    n = header.at("dimension").get<int>();
    g.origin = from_json_vector(header.at("origin"));
    g.spacing = from_json_vector(header.at("spacing"));
    g.extents = header.at("extents").get<std::vector<int>>();
    if (header.contains("boundary_policy"))
      policy = boundary_policy_from_string(header["boundary_policy"].get<std::string>());
    if (header.contains("kind")) {
      const auto k = header["kind"].get<std::string>();
      if (k == "psi") kind = GridField::Kind::Psi;
      else if (k != "u") throw Error(ErrorCode::IoError, "grid kind must be 'u' or 'psi'");
    }
    csv_path = header_path.parent_path() / header.at("values_file").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, header_path.string() + ": " + e.what());
  }
  if (g.n() != n) throw Error(ErrorCode::IoError, "grid header dimension disagrees with extents");
  g.validate();

  std::istringstream in(read_text(csv_path));
  std::string line;
  std::getline(in, line);
  std::vector<double> values(g.size());
  std::vector<bool> seen(g.size(), false);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != static_cast<std::size_t>(n) + 2)
      throw Error(ErrorCode::IoError, "wrong cell count on CSV line " + std::to_string(lineno));
    const auto f = static_cast<std::size_t>(parse_double(cells.front(), lineno));
    if (f >= g.size() || seen[f]) throw Error(ErrorCode::IoError, "bad node index on CSV line " + std::to_string(lineno));
    seen[f] = true;
    values[f] = parse_double(cells.back(), lineno);
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw Error(ErrorCode::IoError, "grid CSV is missing nodes");
  return GridField(std::move(g), std::move(values), kind, policy);
}

}  // namespace confvisc
