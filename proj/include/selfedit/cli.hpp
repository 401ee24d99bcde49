#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "selfedit/environments.hpp"
#include "selfedit/evolution.hpp"

namespace selfedit {

struct RunConfig {
  Environment environment = arithmetic_env(1, 1, 20);
  EvolutionConfig evolution;
  std::string trace_path;  // empty: no trace file
  int verbosity = 1;
};

/// Parses and validates a JSON run config; unknown keys are rejected.
/// Throws ConfigError.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed_override,
            std::optional<std::string> trace_override, std::ostream& out, std::ostream& err);
int cmd_diag(const std::string& sequence_text, std::size_t max_candidates, std::size_t steps,
             std::ostream& out, std::ostream& err);
int cmd_enum(std::size_t count, std::ostream& out);

}  // namespace selfedit
