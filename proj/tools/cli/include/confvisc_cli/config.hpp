#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "confvisc/fields.hpp"
#include "confvisc/symfun.hpp"

namespace confvisc::cli {

using nlohmann::json;

/// Raw config text, kept to point errors at a line.
class SourceText {
public:
  explicit SourceText(std::string text) : text_(std::move(text)) {}
  const std::string& text() const { return text_; }
  /// 1-based line of byte offset `pos`.
  int line_of(std::size_t pos) const;
  /// Line of the first occurrence of "key", 0 when absent.
  int line_of_key(std::string_view key) const;

private:
  std::string text_;
};

/// One JSON object of the config. Every accessor records the key as known and
/// writes the value it resolved (default included) into `resolved`. `finish`
/// rejects any key that no accessor asked for.
class Section {
public:
  Section(const json& node, std::string pointer, const SourceText& src, json& resolved);

  bool has(const std::string& key) const;
  double number(const std::string& key, std::optional<double> fallback = std::nullopt);
  long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt);
  bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt);
  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt,
                   const std::vector<std::string>& choices = {});
  Vec vector(const std::string& key, int n, std::optional<Vec> fallback = std::nullopt);
  std::vector<Vec> vectors(const std::string& key, int n, std::optional<std::vector<Vec>> fallback = std::nullopt);
  Section object(const std::string& key);
  std::vector<Section> objects(const std::string& key);
  /// The raw value, marked as known; nullptr when absent.
  const json* raw(const std::string& key);

  void finish();
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;
  const std::string& pointer() const { return pointer_; }

private:
  const json* lookup(const std::string& key);
  std::string child(const std::string& key) const;

  const json& node_;
  std::string pointer_;
  const SourceText& src_;
  json& resolved_;
  std::set<std::string> known_;
};

/// Parses the operator section: family, k, level, offset, boundary_tol.
OperatorSpec parse_operator(Section s, int n);

/// Builds a field from its section. Grid paths resolve against `base_dir`.
ScalarField parse_field(Section s, int n, const OperatorSpec& spec, const std::filesystem::path& base_dir);

/// Parses JSON text, mapping syntax errors to ConfigError with a line.
json parse_json_text(const SourceText& src);

}  // namespace confvisc::cli
