#pragma once

// Generation loop: every surviving member diagonalizes its own memory,
// proliferates, and the descendants whose OUT matches the demand survive.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "selfedit/code.hpp"
#include "selfedit/diagonalizer.hpp"
#include "selfedit/environments.hpp"
#include "selfedit/generator.hpp"
#include "selfedit/rng.hpp"

namespace selfedit {

struct RuleConfig {
  std::size_t s_min = 2;
  std::size_t k_a = 4056;
  std::size_t k_b = 100;
  std::size_t max_rank = 3;     // R_max
  std::size_t notice_many = 2;  // distinct targets a noticeable condition must imply
  std::size_t notice_every = 0; // 0 disables notice detection
};

struct EvolutionConfig {
  std::size_t population = 64;   // N
  std::size_t descendants = 8;   // m
  std::size_t warmup = 3;        // w
  std::size_t memory = 16;       // L
  std::uint64_t seed = 1;
  std::size_t generations = 20;  // T
  CfgParams cfg;
  RuleConfig rules;

  void validate() const;
};

struct DiagOptions {
  RuleConfig rules;
  Generator gen;
};

/// Fresh recursors for `c`: OUT first (guarded rule, recent fit, or a
/// higher-rank correction), then CFG.n when something other than ID fits.
/// An empty OUT result means the stored OUT entry still fits.
std::vector<Recursor> self_diagonalize(const Code& c, const DiagOptions& opts = {});

/// Fresh recursors plus the stored projected entries outside REC whose
/// target was not refreshed.
std::vector<Recursor> with_stored(const Code& c, const std::vector<Recursor>& fresh);

Population proliferate(const Code& c, const std::vector<Recursor>& fresh, std::size_t m,
                       std::size_t memory_cap, Rng& rng, const Generator& explore = {});
Population proliferate(const Code& c, std::size_t m, std::size_t memory_cap, Rng& rng,
                       const DiagOptions& opts = {});

/// Members whose OUT equals `demanded` and that are not dead on arrival,
/// sampled down to `cap` by `rng` keeping their relative order.
Population select(const Population& pop, const Atom& demanded, std::size_t cap, Rng& rng);

/// When no viable member matches `demanded`, forces OUT of the lowest-id
/// member to it.
void warmup_seed(Population& pop, const Atom& demanded);

struct BranchState {
  Population population;
  std::size_t generation = 0;
  bool extinct = false;
};

struct RecursorRecord {
  std::string addr;
  std::string prog;
  std::size_t index = 0;
  FitMode mode = FitMode::Projected;
};

struct GenerationReport {
  std::size_t gen = 0;
  Atom demand = Atom::token(Tok::Nil);
  std::size_t produced = 0;
  std::size_t survivors = 0;
  double correct_frac = 0.0;
  std::vector<RecursorRecord> recursors;
  std::vector<std::string> notices;
  bool extinct = false;
  std::size_t exploit_produced = 0;
  std::size_t exploit_correct = 0;
};

std::string to_json_line(const GenerationReport& r);

BranchState init_population(const EvolutionConfig& config);
GenerationReport step(BranchState& state, const Environment& env, const EvolutionConfig& config);
/// Runs until T generations have passed or the population dies out.
std::vector<GenerationReport> run(const EvolutionConfig& config, const Environment& env);

}  // namespace selfedit
