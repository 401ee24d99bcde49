#pragma once

// Diagonalization: find the simplest program that fits a surviving branch's
// memory at an address, install it as a recursor, and detect long-memory
// rules (usefulness, guarded implications, noticeable conditions).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfedit/code.hpp"
#include "selfedit/generator.hpp"
#include "selfedit/minilang.hpp"
#include "selfedit/rng.hpp"

namespace selfedit {

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  /// ceil(num * m / den)
  std::size_t ceil_times(std::size_t m) const;

  friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
    return a.num * b.den <=> b.num * a.den;
  }
  friend bool operator==(const Fraction& a, const Fraction& b) { return (a <=> b) == 0; }
};

class ProjectionGap : public Error {
 public:
  explicit ProjectionGap(std::size_t snapshot)
      : Error(ErrorKind::ProjectionGap, "address invalid in snapshot " + std::to_string(snapshot)),
        snapshot_(snapshot) {}
  /// 1-based position of the first snapshot lacking the address.
  std::size_t snapshot() const noexcept { return snapshot_; }

 private:
  std::size_t snapshot_;
};

struct Transition {
  Code before;
  Code after;
};

/// Ancestor snapshots of one surviving branch, oldest first.
class MemoryTrace {
 public:
  MemoryTrace() = default;
  /// Throws ConfigError unless every snapshot obeys the slot layout.
  explicit MemoryTrace(std::vector<Code> snapshots);

  /// The last `window - 1` MEM entries of `c` followed by the snapshot of `c`
  /// itself; `window` of 0 keeps the whole log.
  static MemoryTrace of(const Code& c, std::size_t window = 0);

  std::span<const Code> snapshots() const noexcept { return snapshots_; }
  std::size_t size() const noexcept { return snapshots_.size(); }
  std::vector<Transition> transitions() const;

 private:
  std::vector<Code> snapshots_;
};

enum class FitMode { Projected, Contextual };
std::string_view to_string(FitMode mode);

struct Recursor {
  Address target;
  Program program;
  std::size_t found_at_index = 0;
  FitMode mode = FitMode::Projected;
};

struct GuardedRule {
  Program condition;
  Program action;
  std::size_t support = 0;
};

/// Contents at `theta` of every snapshot; throws ProjectionGap.
std::vector<Code> project(const MemoryTrace& memory, const Address& theta);

/// True iff evaluating `r` on each element yields exactly the next one.
bool fits(const Program& r, std::span<const Code> seq, const EvalBudget& budget = {});

struct Fit {
  Program program;
  std::size_t index = 0;
};

/// First of the next `k_max` yields of `gen` that fits `seq` (length >= 2).
std::optional<Fit> find_simplest_fit(std::span<const Code> seq, Generator gen, std::size_t k_max,
                                     const EvalBudget& budget = {});

/// Projected mode fits theta-content to theta-content; contextual mode fits
/// whole snapshots to the next snapshot's theta-content.
std::optional<Recursor> diagonalize(const MemoryTrace& memory, const Address& theta,
                                    const Generator& gen, std::size_t k_max,
                                    const EvalBudget& budget = {},
                                    FitMode mode = FitMode::Projected);

/// Result of running a recursor on `c`, or nullopt when evaluation fails.
std::optional<Code> recursor_output(const Recursor& r, const Code& c, const EvalBudget& budget);

// REC slot: entries [target, program, mode], mode TRUE = projected and
// FALSE = contextual. Projected entries come first in lexicographic target
// order, contextual entries follow in the same order.

std::vector<Recursor> read_rec(const Code& c);
Code write_rec(const Code& c, std::vector<Recursor> entries);
/// Replaces the entry with the same target and mode, or inserts it.
Code upsert_rec(const Code& c, const Recursor& r);

struct ProliferationParams {
  std::size_t m = 8;
  Fraction p{3, 4};
  std::size_t memory_cap = 16;
  EvalBudget budget;
};

/// Editors of size <= 3 the generator yields, in yield order.
std::vector<Program> explore_editors(const Generator& explore);

/// ceil(p*m) exploit descendants that apply every recursor, then random
/// explore descendants that apply one small editor at OUT. Each descendant
/// records the recursors in its REC slot and a snapshot of `c` in its memory.
/// Descendants whose evaluation fails are flagged dead-on-arrival.
Population apply_recursors(const Code& c, std::span<const Recursor> recursors,
                           const ProliferationParams& params, Rng& rng, const Generator& explore);

Fraction fit_fraction(const Program& x, std::span<const Transition> transitions, const Address& theta,
                      const EvalBudget& budget = {});

/// Programs among the first `k_max` yields whose fit fraction reaches `tau`,
/// excluding ID, in yield order.
std::vector<Program> detect_useful(const MemoryTrace& memory, const Address& theta, Fraction tau,
                                   std::size_t k_max, const EvalBudget& budget = {},
                                   const Generator& gen = {});

/// If eval(a, x) is TRUE then eval(b, x), else x. Probe conditions compile to
/// IFEQ(addr, v, b, ID); any other condition would exceed the program size
/// limit, so it throws DecodeError and the rule is applied by apply_guarded.
Program guarded_rule(const Program& a, const Program& b);
std::optional<Code> apply_guarded(const GuardedRule& rule, const Code& x, const EvalBudget& budget = {});

struct RuleSearch {
  std::size_t s_min = 2;
  std::size_t k_a = 4056;  // every probe with an address of length <= 3
  std::size_t k_b = 100;
  EvalBudget budget;
};

/// Every (a, b) with a among the first k_a probes and b among the first k_b
/// yields such that a holds on at least s_min transitions and b fits the
/// theta_target part of every one of them.
std::vector<GuardedRule> detect_implications(const MemoryTrace& memory, const Address& theta_target,
                                             const RuleSearch& search, const Generator& gen = {});

/// Conditions implying at least `many` distinct non-copy actions, counted as
/// distinct targets with a fitting action.
std::vector<Program> detect_noticeable(const MemoryTrace& memory, std::span<const Address> targets,
                                       std::size_t many, const RuleSearch& search,
                                       const Generator& gen = {});
/// Same, over OUT and the CFG integers.
std::vector<Program> detect_noticeable(const MemoryTrace& memory, std::size_t many,
                                       const RuleSearch& search, const Generator& gen = {});

// NB slot: entries [predicate, truth]. An entry whose predicate is the leaf
// NIL is an environment flag rather than a registered condition.

/// Registers `a` with its current truth value; a no-op if already registered.
Code notify(const Code& c, const Program& a, const EvalBudget& budget = {});
/// Re-evaluates every registered condition on `c`.
Code refresh_notices(const Code& c, const EvalBudget& budget = {});
std::vector<Program> noticed_conditions(const Code& c);
/// Writes the environment flag as NB entry 1.
Code set_env_flag(const Code& c, bool flag);
/// Address of the environment flag value.
inline Address env_flag_address() { return Address{layout::kNb, 1, 2}; }

}  // namespace selfedit
