#include "confvisc_cli/run.hpp"

#include <iostream>

#include "confvisc/report.hpp"
#include "confvisc_cli/commands.hpp"

namespace confvisc::cli {

RunResult run_config(const std::string& config_text, const RunOptions& options) {
  RunResult res;
  json resolved = json::object();
  json& summary = res.summary;
  summary = json::object();
  auto log = [&](const std::string& msg) {
    if (options.verbose) std::cerr << "[confvisc] " << msg << '\n';
  };
  try {
    const SourceText src(config_text);
    const json root = parse_json_text(src);
    Section top(root, "", src, resolved);
    const auto command = top.text("command", std::nullopt, command_names());
    summary["command"] = command;
    const auto seed = top.integer("seed", 1);
    if (seed < 0) top.fail("seed", "must be non-negative");
    const auto n = top.integer("dimension");
    if (n < 2 || n > 16) top.fail("dimension", "must lie in 2..16");
    const int dim = static_cast<int>(n);
    const OperatorSpec spec = parse_operator(top.object("operator"), dim);
    ScalarField field = parse_field(top.object("field"), dim, spec, options.base_dir);
    static const json empty = json::object();
    const json* params_node = top.raw("params");
    Section params(params_node ? *params_node : empty, "/params", src, resolved["params"]);
    top.finish();
    log("running " + command + " on " + field.describe());

    const CommandContext ctx{dim, spec, std::move(field), static_cast<std::uint64_t>(seed), options.plot, log};
    CommandOutput out = find_command(command)(ctx, params);
    res.exit_code = out.pass ? 0 : 1;
    summary["verdict"] = out.pass ? "PASS" : "FAIL";
    summary["result"] = std::move(out.result);
    res.csv = std::move(out.csv);
    res.svg = std::move(out.svg);
    res.files = std::move(out.files);
  } catch (const Error& e) {
    res.exit_code = e.code() == ErrorCode::NotASolution ? 1 : 2;
    summary["verdict"] = res.exit_code == 1 ? "FAIL" : "ERROR";
    summary["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  } catch (const std::exception& e) {
    res.exit_code = 2;
    summary["verdict"] = "ERROR";
    summary["error"] = {{"code", "Internal"}, {"message", e.what()}};
  }
  summary["exit_code"] = res.exit_code;
  summary["config"] = resolved;
  if (summary.contains("error")) {
    CsvTable t({"code", "message"});
    t.row().cell(summary["error"]["code"].get<std::string>()).cell(summary["error"]["message"].get<std::string>());
    res.csv = t.str();
  }
  return res;
}

void write_artifacts(const RunResult& result, const std::filesystem::path& out_dir) {
  write_text(out_dir / "summary.json", result.summary.dump(2) + "\n");
  write_text(out_dir / "diagnostics.csv", result.csv);
  if (!result.svg.empty()) write_text(out_dir / "plot.svg", result.svg);
  for (const auto& [name, content] : result.files) write_text(out_dir / name, content);
}

}  // namespace confvisc::cli
