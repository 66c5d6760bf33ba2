#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "dssf/common.hpp"
#include "dssf/harness.hpp"

namespace {

unsigned env_threads() {
  const char* v = std::getenv("DSSF_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0) {
    std::cerr << "ignoring DSSF_THREADS=" << v << "\n";
    return 1;
  }
  return static_cast<unsigned>(n);
}

void print_config_errors(const dssf::ConfigError& e) {
  std::cerr << "configuration has " << e.errors().size() << " problem(s):\n";
  for (const auto& m : e.errors()) std::cerr << "  " << m << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral shift and counting-function experiments for magnetic Dirac operators"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  int threads = -1;
  auto* run = app.add_subcommand("run", "Run the scenario of a config file");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_path, "Main CSV path (overrides [output] path)");
  run->add_option("--threads", threads, "Worker threads (0 = all cores); overrides DSSF_THREADS")
      ->check(CLI::NonNegativeNumber);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config file and print it with defaults filled in");
  validate->add_option("--config", validate_path, "Config file")->required();

  auto* list = app.add_subcommand("list-scenarios", "Print the scenario names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& n : dssf::scenario_names()) std::cout << n << "\n";
      return 0;
    }
    if (validate->parsed()) {
      const auto c = dssf::load_config(validate_path);
      std::cout << dssf::serialize_config(c);
      return 0;
    }
    dssf::set_thread_count(threads >= 0 ? static_cast<unsigned>(threads) : env_threads());
    const auto c = dssf::load_config(config_path);
    if (out_path.empty()) out_path = c.str("output.path");
    if (out_path.empty()) out_path = c.scenario() + ".csv";
    const auto result = dssf::run_scenario(c);
    for (const auto& p : dssf::write_result(result, out_path)) std::cout << "wrote " << p << "\n";
    if (!result.all_pass()) {
      std::cerr << c.scenario() << ": " << result.failures() << " of " << result.rows.size() << " rows failed\n";
      for (const auto& r : result.rows)
        if (r.status == dssf::RowStatus::Fail)
          std::cerr << "  " << r.metric << " = " << r.value << " (" << r.params << ")\n";
      return 1;
    }
    return 0;
  } catch (const dssf::ConfigError& e) {
    print_config_errors(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
