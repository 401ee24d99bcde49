#include <iostream>

#include "CLI11.hpp"
#include "selfedit/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Self-editing code population simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string trace_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config_path, "Run config path")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");
  auto* trace_opt = run->add_option("--trace", trace_path, "Override the trace path");

  std::string seq;
  std::size_t max_candidates = 5000;
  std::size_t steps = 1000;
  auto* diag = app.add_subcommand("diag", "Find the simplest program fitting a sequence");
  diag->add_option("--seq", seq, "Comma-separated codes")->required();
  diag->add_option("--max-candidates", max_candidates, "Enumeration budget");
  diag->add_option("--steps", steps, "Evaluation step budget");

  std::size_t count = 10;
  auto* en = app.add_subcommand("enum", "List the first programs of the enumeration");
  en->add_option("--count", count, "Number of programs")->required()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      std::optional<std::uint64_t> so;
      std::optional<std::string> to;
      if (*seed_opt) so = seed;
      if (*trace_opt) to = trace_path;
      return selfedit::cmd_run(config_path, so, to, std::cout, std::cerr);
    }
    if (*diag) return selfedit::cmd_diag(seq, max_candidates, steps, std::cout, std::cerr);
    return selfedit::cmd_enum(count, std::cout);
  } catch (const selfedit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
