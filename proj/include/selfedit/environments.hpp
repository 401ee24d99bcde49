#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfedit/code.hpp"
#include "selfedit/diagonalizer.hpp"

namespace selfedit {

/// Demand sequence on [0, length) with an optional per-step condition flag
/// that is written into every member's notice board before proliferation.
class Environment {
 public:
  Environment(std::string name, std::vector<Atom> demands,
              std::optional<std::vector<bool>> flags = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  std::size_t length() const noexcept { return demands_.size(); }
  Atom demand(std::size_t t) const;
  std::optional<bool> condition(std::size_t t) const;
  bool has_condition() const noexcept { return flags_.has_value(); }

 private:
  std::string name_;
  std::vector<Atom> demands_;
  std::optional<std::vector<bool>> flags_;
};

struct SubExperiment {
  std::int64_t start = 1;
  std::int64_t step = 1;
};

struct NestedScript {
  std::vector<SubExperiment> parts;
  std::size_t terms = 3;

  /// Sub-experiment k (1-based) starts at 1 and steps by k.
  static NestedScript canonical(std::size_t count, std::size_t terms = 3);
  void validate() const;
  /// Demand index of the first visible term of sub-experiment k (1-based).
  std::size_t first_term_index(std::size_t k) const { return (k - 1) * (terms + 2) + 1; }
};

Environment arithmetic_env(std::int64_t start, std::int64_t step, std::size_t length);
/// LP, start, start+step, ..., RP for each sub-experiment in order.
Environment nested_env(const NestedScript& script);
/// Flag on every step t with t mod period == 0; a flagged step (t > 0) adds
/// action_step to the previous demand, any other step repeats it.
Environment guarded_env(std::size_t period, std::int64_t action_step, std::size_t length,
                        std::int64_t start = 0);
/// Integer part (floor) of each scheduled value.
Environment parameter_env(const std::vector<Fraction>& schedule);

}  // namespace selfedit
