#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "confvisc/parallel.hpp"
#include "confvisc/report.hpp"
#include "confvisc/types.hpp"
#include "confvisc_cli/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Verification runs for conformally invariant fully nonlinear elliptic operators"};
  std::filesystem::path config, out = "confvisc-out";
  bool plot = false, verbose = false;
  int threads = 1;
  app.add_option("--config", config, "Experiment config (JSON)")->required();
  app.add_flag("--plot", plot, "Also write plot.svg");
  app.add_option("--threads", threads, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out, "Output directory");
  app.add_flag("--verbose", verbose, "Progress on stderr");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  confvisc::set_thread_count(threads);
  confvisc::cli::RunOptions options;
  options.plot = plot;
  options.verbose = verbose;
  options.base_dir = config.parent_path().empty() ? std::filesystem::path(".") : config.parent_path();

  confvisc::cli::RunResult result;
  try {
    result = confvisc::cli::run_config(confvisc::read_text(config), options);
  } catch (const confvisc::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  try {
    confvisc::cli::write_artifacts(result, out);
  } catch (const std::exception& e) {
    std::cerr << "cannot write outputs: " << e.what() << '\n';
    return 2;
  }
  std::cout << result.summary.value("command", std::string("?")) << ": " << result.summary["verdict"].get<std::string>();
  if (result.summary.contains("error")) std::cout << " (" << result.summary["error"]["message"].get<std::string>() << ")";
  std::cout << '\n';
  return result.exit_code;
}
