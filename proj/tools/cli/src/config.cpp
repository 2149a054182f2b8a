#include "confvisc_cli/config.hpp"

#include <algorithm>

#include "confvisc/grid.hpp"
#include "confvisc/mobius.hpp"

namespace confvisc::cli {

int SourceText::line_of(std::size_t pos) const {
  pos = std::min(pos, text_.size());
  return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

int SourceText::line_of_key(std::string_view key) const {
  const std::string quoted = "\"" + std::string(key) + "\"";
  const auto pos = text_.find(quoted);
  return pos == std::string::npos ? 0 : line_of(pos);
}

json parse_json_text(const SourceText& src) {
  try {
    return json::parse(src.text());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError,
                "config is not valid JSON (line " + std::to_string(src.line_of(e.byte > 0 ? e.byte - 1 : 0)) +
                    "): " + e.what());
  }
}

Section::Section(const json& node, std::string pointer, const SourceText& src, json& resolved)
    : node_(node), pointer_(std::move(pointer)), src_(src), resolved_(resolved) {
  if (!node_.is_object()) {
    const auto slash = pointer_.find_last_of('/');
    fail(slash == std::string::npos ? std::string() : pointer_.substr(slash + 1), "expected an object");
  }
  if (!resolved_.is_object()) resolved_ = json::object();
}

std::string Section::child(const std::string& key) const { return pointer_ + "/" + key; }

void Section::fail(const std::string& key, const std::string& message) const {
  std::string where = key.empty() ? pointer_ : child(key);
  if (where.empty()) where = "/";
  const int line = key.empty() ? 0 : src_.line_of_key(key);
  throw Error(ErrorCode::ConfigError,
              where + ": " + message + (line > 0 ? " (line " + std::to_string(line) + ")" : std::string()));
}

bool Section::has(const std::string& key) const { return node_.contains(key); }

const json* Section::lookup(const std::string& key) {
  known_.insert(key);
  const auto it = node_.find(key);
  return it == node_.end() ? nullptr : &*it;
}

const json* Section::raw(const std::string& key) {
  const json* v = lookup(key);
  if (v) resolved_[key] = *v;
  return v;
}

double Section::number(const std::string& key, std::optional<double> fallback) {
  const json* v = lookup(key);
  double out;
  if (!v) {
    if (!fallback) fail(key, "required number is missing");
    out = *fallback;
  } else {
    if (!v->is_number()) fail(key, "expected a number");
    out = v->get<double>();
  }
  resolved_[key] = out;
  return out;
}

long long Section::integer(const std::string& key, std::optional<long long> fallback) {
  const json* v = lookup(key);
  long long out;
  if (!v) {
    if (!fallback) fail(key, "required integer is missing");
    out = *fallback;
  } else {
    if (!v->is_number_integer()) fail(key, "expected an integer");
    out = v->get<long long>();
  }
  resolved_[key] = out;
  return out;
}

bool Section::boolean(const std::string& key, std::optional<bool> fallback) {
  const json* v = lookup(key);
  bool out;
  if (!v) {
    if (!fallback) fail(key, "required boolean is missing");
    out = *fallback;
  } else {
    if (!v->is_boolean()) fail(key, "expected true or false");
    out = v->get<bool>();
  }
  resolved_[key] = out;
  return out;
}

std::string Section::text(const std::string& key, std::optional<std::string> fallback,
                          const std::vector<std::string>& choices) {
  const json* v = lookup(key);
  std::string out;
  if (!v) {
    if (!fallback) fail(key, "required string is missing");
    out = *fallback;
  } else {
    if (!v->is_string()) fail(key, "expected a string");
    out = v->get<std::string>();
  }
  if (!choices.empty() && std::find(choices.begin(), choices.end(), out) == choices.end()) {
    std::string list;
    for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
    fail(key, "unknown value \"" + out + "\" (expected one of " + list + ")");
  }
  resolved_[key] = out;
  return out;
}

namespace {

std::optional<Vec> to_vec(const json& v, int n) {
  if (!v.is_array() || static_cast<int>(v.size()) != n) return std::nullopt;
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) return std::nullopt;
    out[i] = v[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

json from_vec(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

Vec Section::vector(const std::string& key, int n, std::optional<Vec> fallback) {
  const json* v = lookup(key);
  Vec out;
  if (!v) {
    if (!fallback) fail(key, "required vector is missing");
    out = *fallback;
  } else {
    auto parsed = to_vec(*v, n);
    if (!parsed) fail(key, "expected an array of " + std::to_string(n) + " numbers");
    out = *parsed;
  }
  resolved_[key] = from_vec(out);
  return out;
}

std::vector<Vec> Section::vectors(const std::string& key, int n, std::optional<std::vector<Vec>> fallback) {
  const json* v = lookup(key);
  std::vector<Vec> out;
  if (!v) {
    if (!fallback) fail(key, "required list of vectors is missing");
    out = *fallback;
  } else {
    if (!v->is_array() || v->empty()) fail(key, "expected a non-empty array of vectors");
    for (const auto& item : *v) {
      auto parsed = to_vec(item, n);
      if (!parsed) fail(key, "every entry must be an array of " + std::to_string(n) + " numbers");
      out.push_back(*parsed);
    }
  }
  json arr = json::array();
  for (const auto& x : out) arr.push_back(from_vec(x));
  resolved_[key] = arr;
  return out;
}

Section Section::object(const std::string& key) {
  const json* v = lookup(key);
  if (!v) fail(key, "required object is missing");
  if (!v->is_object()) fail(key, "expected an object");
  return Section(*v, child(key), src_, resolved_[key]);
}

std::vector<Section> Section::objects(const std::string& key) {
  const json* v = lookup(key);
  if (!v) fail(key, "required array of objects is missing");
  if (!v->is_array()) fail(key, "expected an array of objects");
  json& arr = resolved_[key];
  arr = json::array();
  for (std::size_t i = 0; i < v->size(); ++i) arr.push_back(json::object());
  std::vector<Section> out;
  for (std::size_t i = 0; i < v->size(); ++i)
    out.emplace_back((*v)[i], child(key) + "/" + std::to_string(i), src_, arr[i]);
  return out;
}

void Section::finish() {
  for (const auto& [key, value] : node_.items()) {
    (void)value;
    if (!known_.count(key)) fail(key, "unknown key");
  }
}

OperatorSpec parse_operator(Section s, int n) {
  const auto family = s.text("family", "sigma_k_root", {"sigma_k_root", "sigma_k_raw", "affine_trace"});
  const double level = s.number("level", 1.0);
  OperatorSpec spec;
  if (family == "affine_trace") {
    spec = OperatorSpec::affine_trace(n, s.number("offset", 1.0), level);
  } else {
    const auto k = s.integer("k", 1);
    if (k < 1 || k > n) s.fail("k", "k must lie in 1..dimension");
    spec = family == "sigma_k_root" ? OperatorSpec::sigma_k_root(n, static_cast<int>(k), level)
                                    : OperatorSpec::sigma_k_raw(n, static_cast<int>(k), level);
  }
  spec.boundary_tol = s.number("boundary_tol", spec.boundary_tol);
  s.finish();
  spec.validate();
  return spec;
}

namespace {

AnalyticField need_analytic(const ScalarField& f, Section& s, const std::string& key) {
  if (const AnalyticField* a = f.analytic()) return *a;
  s.fail(key, "this transform needs an analytic field, not a grid");
}

MobiusMap parse_map(Section& s, int n) {
  std::vector<MobiusOp> ops;
  for (Section op : s.objects("map")) {
    const auto kind = op.text("op", std::nullopt, {"translate", "dilate", "invert"});
    if (kind == "translate") ops.push_back(MobiusOp::translate(op.vector("vector", n)));
    else if (kind == "dilate") ops.push_back(MobiusOp::dilate(op.number("factor")));
    else ops.push_back(MobiusOp::invert(op.vector("center", n)));
    op.finish();
  }
  return MobiusMap(n, std::move(ops));
}

}  // namespace

ScalarField parse_field(Section s, int n, const OperatorSpec& spec, const std::filesystem::path& base_dir) {
  const auto type = s.text("type", std::nullopt,
                           {"constant", "bubble", "tuned_bubble", "grid", "kelvin", "scaled", "pullback"});
  const Vec origin = Vec::Zero(n);
  std::optional<ScalarField> out;
  if (type == "constant") {
    out.emplace(AnalyticField::constant(n, s.number("value", 1.0)));
  } else if (type == "bubble") {
    BubbleParams p{s.number("a", 1.0), s.number("b", 1.0), s.vector("x0", n, origin)};
    out.emplace(AnalyticField::bubble(n, p));
  } else if (type == "tuned_bubble") {
    const double a = s.number("a", 1.0);
    const Vec x0 = s.vector("x0", n, origin);
    out.emplace(AnalyticField::bubble(n, tuned_bubble(spec, a, x0)));
  } else if (type == "grid") {
    auto path = std::filesystem::path(s.text("path"));
    if (path.is_relative()) path = base_dir / path;
    GridField g = read_grid(path);
    if (g.n() != n) s.fail("path", "grid dimension differs from the config dimension");
    out.emplace(std::move(g));
  } else if (type == "kelvin") {
    const Vec c = s.vector("center", n, origin);
    const double r = s.number("radius", 1.0);
    const AnalyticField w = need_analytic(parse_field(s.object("of"), n, spec, base_dir), s, "of");
    out.emplace(AnalyticField::kelvin_of(w, c, r));
  } else if (type == "scaled") {
    const double c = s.number("factor");
    const AnalyticField w = need_analytic(parse_field(s.object("of"), n, spec, base_dir), s, "of");
    out.emplace(AnalyticField::scaled(c, w));
  } else {
    const MobiusMap phi = parse_map(s, n);
    const AnalyticField w = need_analytic(parse_field(s.object("of"), n, spec, base_dir), s, "of");
    out.emplace(AnalyticField::pullback(w, phi));
  }
  s.finish();
  return *out;
}

}  // namespace confvisc::cli
