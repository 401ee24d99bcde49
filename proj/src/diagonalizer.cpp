#include "selfedit/diagonalizer.hpp"

#include <algorithm>

namespace selfedit {

namespace {

const Code& true_leaf() {
  static const Code c = Code::token(Tok::True);
  return c;
}

bool holds(const Program& condition, const Code& x, const EvalBudget& budget) {
  EvalOutcome out = try_eval(condition, x, budget);
  return out.ok() && structural_eq(*out.value, true_leaf());
}

bool maps(const Program& p, const Code& from, const Code& to, const EvalBudget& budget) {
  EvalOutcome out = try_eval(p, from, budget);
  return out.ok() && structural_eq(*out.value, to);
}

std::vector<Code> slot_children(const Code& c, std::size_t slot) {
  const Code& s = c.child(slot - 1);
  return {s.children().begin(), s.children().end()};
}

// Pairs (before, after) restricted to theta; nullopt if theta is missing anywhere.
std::optional<std::vector<std::pair<Code, Code>>> restrict_to(std::span<const Transition> ts,
                                                              const Address& theta) {
  std::vector<std::pair<Code, Code>> out;
  out.reserve(ts.size());
  for (const Transition& t : ts) {
    const Code* b = find_at(t.before, theta);
    const Code* a = find_at(t.after, theta);
    if (!b || !a) return std::nullopt;
    out.emplace_back(*b, *a);
  }
  return out;
}

struct ConditionSupport {
  Program condition;
  std::vector<Transition> supported;
};

std::vector<ConditionSupport> supported_conditions(const MemoryTrace& memory, const RuleSearch& search) {
  const auto ts = memory.transitions();
  std::vector<ConditionSupport> out;
  for (const Program& a : boolean_probes(search.k_a)) {
    std::vector<Transition> supported;
    for (const Transition& t : ts)
      if (holds(a, t.before, search.budget)) supported.push_back(t);
    if (supported.size() >= search.s_min && !supported.empty())
      out.push_back({a, std::move(supported)});
  }
  return out;
}

// First action (by yield order) fitting every pair, if any.
std::optional<std::size_t> first_fitting_action(std::span<const Program> actions,
                                                std::span<const std::pair<Code, Code>> pairs,
                                                const EvalBudget& budget) {
  for (std::size_t i = 0; i < actions.size(); ++i) {
    bool all = std::all_of(pairs.begin(), pairs.end(), [&](const auto& pr) {
      return maps(actions[i], pr.first, pr.second, budget);
    });
    if (all) return i;
  }
  return std::nullopt;
}

}  // namespace

std::size_t Fraction::ceil_times(std::size_t m) const {
  const auto mm = static_cast<std::int64_t>(m);
  return static_cast<std::size_t>((num * mm + den - 1) / den);
}

MemoryTrace::MemoryTrace(std::vector<Code> snapshots) : snapshots_(std::move(snapshots)) {
  for (const Code& s : snapshots_)
    if (!obeys_layout(s)) throw Error(ErrorKind::ConfigError, "memory snapshot does not obey the slot layout");
}

MemoryTrace MemoryTrace::of(const Code& c, std::size_t window) {
  if (!obeys_layout(c)) throw Error(ErrorKind::ConfigError, "code does not obey the slot layout");
  std::vector<Code> log = slot_children(c, layout::kMem);
  if (window > 0 && log.size() > window - 1)
    log.erase(log.begin(), log.end() - static_cast<std::ptrdiff_t>(window - 1));
  log.push_back(snapshot_of(c));
  MemoryTrace m;
  m.snapshots_ = std::move(log);
  return m;
}

std::vector<Transition> MemoryTrace::transitions() const {
  std::vector<Transition> out;
  for (std::size_t i = 0; i + 1 < snapshots_.size(); ++i) out.push_back({snapshots_[i], snapshots_[i + 1]});
  return out;
}

std::string_view to_string(FitMode mode) { return mode == FitMode::Projected ? "projected" : "contextual"; }

std::vector<Code> project(const MemoryTrace& memory, const Address& theta) {
  std::vector<Code> out;
  out.reserve(memory.size());
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const Code* found = find_at(memory.snapshots()[i], theta);
    if (!found) throw ProjectionGap(i + 1);
    out.push_back(*found);
  }
  return out;
}

bool fits(const Program& r, std::span<const Code> seq, const EvalBudget& budget) {
  if (seq.size() < 2) return false;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    if (!maps(r, seq[i], seq[i + 1], budget)) return false;
  return true;
}

std::optional<Fit> find_simplest_fit(std::span<const Code> seq, Generator gen, std::size_t k_max,
                                     const EvalBudget& budget) {
  if (seq.size() < 2) return std::nullopt;
  for (std::size_t k = 0; k < k_max; ++k) {
    auto p = gen.advance();
    if (!p) break;
    if (fits(*p, seq, budget)) return Fit{*p, gen.yielded() - 1};
  }
  return std::nullopt;
}

std::optional<Recursor> diagonalize(const MemoryTrace& memory, const Address& theta, const Generator& gen,
                                    std::size_t k_max, const EvalBudget& budget, FitMode mode) {
  if (memory.size() < 2) return std::nullopt;
  if (mode == FitMode::Projected) {
    std::vector<Code> seq;
    try {
      seq = project(memory, theta);
    } catch (const ProjectionGap&) {
      return std::nullopt;
    }
    auto fit = find_simplest_fit(seq, gen, k_max, budget);
    if (!fit) return std::nullopt;
    return Recursor{theta, fit->program, fit->index, FitMode::Projected};
  }
  auto pairs = restrict_to(memory.transitions(), theta);
  if (!pairs) return std::nullopt;
  std::vector<std::pair<Code, Code>> contextual;
  for (std::size_t i = 0; i + 1 < memory.size(); ++i)
    contextual.emplace_back(memory.snapshots()[i], (*pairs)[i].second);
  Generator g = gen;
  for (std::size_t k = 0; k < k_max; ++k) {
    auto p = g.advance();
    if (!p) break;
    bool all = std::all_of(contextual.begin(), contextual.end(),
                           [&](const auto& pr) { return maps(*p, pr.first, pr.second, budget); });
    if (all) return Recursor{theta, *p, g.yielded() - 1, FitMode::Contextual};
  }
  return std::nullopt;
}

std::optional<Code> recursor_output(const Recursor& r, const Code& c, const EvalBudget& budget) {
  const Code* input = &c;
  if (r.mode == FitMode::Projected) {
    input = find_at(c, r.target);
    if (!input) return std::nullopt;
  }
  EvalOutcome out = try_eval(r.program, *input, budget);
  return out.value;
}

std::vector<Recursor> read_rec(const Code& c) {
  std::vector<Recursor> out;
  for (const Code& e : c.child(layout::kRec - 1).children()) {
    if (e.is_leaf() || e.arity() != 3 || !e.child(2).is_leaf())
      throw Error(ErrorKind::ConfigError, "malformed REC entry " + to_text(e));
    FitMode mode = e.child(2).is_tok(Tok::True) ? FitMode::Projected : FitMode::Contextual;
    out.push_back(Recursor{Address::from_code(e.child(0)), decode(e.child(1)), 0, mode});
  }
  return out;
}

Code write_rec(const Code& c, std::vector<Recursor> entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const Recursor& a, const Recursor& b) {
    if (a.mode != b.mode) return a.mode == FitMode::Projected;
    return a.target.path() < b.target.path();
  });
  std::vector<Code> nodes;
  nodes.reserve(entries.size());
  for (const Recursor& r : entries)
    nodes.push_back(Code::node({r.target.to_code(), r.program.code(),
                                Code::token(r.mode == FitMode::Projected ? Tok::True : Tok::False)}));
  return replace_at(c, layout::rec(), Code::node(std::move(nodes)));
}

Code upsert_rec(const Code& c, const Recursor& r) {
  auto entries = read_rec(c);
  auto same = std::find_if(entries.begin(), entries.end(), [&](const Recursor& e) {
    return e.mode == r.mode && e.target == r.target;
  });
  if (same != entries.end())
    *same = r;
  else
    entries.push_back(r);
  return write_rec(c, std::move(entries));
}

std::vector<Program> explore_editors(const Generator& explore) {
  Generator g = explore;
  std::vector<Program> out;
  while (auto p = g.advance()) {
    if (p->size() <= 3)
      out.push_back(*p);
    else if (g.yielded() > g.priority().size())
      break;
  }
  return out;
}

Population apply_recursors(const Code& c, std::span<const Recursor> recursors,
                           const ProliferationParams& params, Rng& rng, const Generator& explore) {
  if (params.m < 1) throw Error(ErrorKind::ConfigError, "m must be >= 1");
  Population out;

  Code inherited = c;
  for (const Recursor& r : recursors) inherited = upsert_rec(inherited, r);
  auto finish = [&](const Code& d) { return store_memory(c, d, params.memory_cap); };

  const std::size_t exploit = recursors.empty() ? 0 : std::min(params.m, params.p.ceil_times(params.m));
  if (exploit > 0) {
    std::vector<std::pair<Address, Code>> writes;
    bool ok = true;
    for (const Recursor& r : recursors) {
      auto v = recursor_output(r, c, params.budget);
      if (!v) {
        ok = false;
        break;
      }
      writes.emplace_back(r.target, *v);
    }
    Code child = c;
    if (ok) {
      try {
        for (const auto& [target, value] : writes) child = replace_at(child, target, value);
        for (const Recursor& r : recursors) child = upsert_rec(child, r);
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) child = inherited;
    Code stored = finish(child);
    for (std::size_t i = 0; i < exploit; ++i) out.add(stored, std::nullopt, Origin::Exploit, !ok);
  }

  const auto editors = explore_editors(explore);
  for (std::size_t i = exploit; i < params.m; ++i) {
    const Program& editor = editors[rng.below(editors.size())];
    EvalOutcome v = try_eval(editor, read_at(c, layout::out()), params.budget);
    bool ok = v.ok();
    Code child = inherited;
    if (ok) {
      try {
        child = replace_at(inherited, layout::out(), *v.value);
      } catch (const Error&) {
        ok = false;
      }
    }
    out.add(finish(child), std::nullopt, Origin::Explore, !ok);
  }
  return out;
}

Fraction fit_fraction(const Program& x, std::span<const Transition> transitions, const Address& theta,
                      const EvalBudget& budget) {
  if (transitions.empty()) return Fraction{0, 1};
  std::int64_t hits = 0;
  for (const Transition& t : transitions) {
    const Code* b = find_at(t.before, theta);
    const Code* a = find_at(t.after, theta);
    if (b && a && maps(x, *b, *a, budget)) ++hits;
  }
  return Fraction{hits, static_cast<std::int64_t>(transitions.size())};
}

std::vector<Program> detect_useful(const MemoryTrace& memory, const Address& theta, Fraction tau,
                                   std::size_t k_max, const EvalBudget& budget, const Generator& gen) {
  const auto ts = memory.transitions();
  std::vector<Program> out;
  if (ts.empty()) return out;
  const Program identity = prog::id();
  Generator g = gen;
  for (std::size_t k = 0; k < k_max; ++k) {
    auto p = g.advance();
    if (!p) break;
    if (*p == identity) continue;
    Fraction f = fit_fraction(*p, ts, theta, budget);
    if (f.num > 0 && f >= tau) out.push_back(*p);
  }
  return out;
}

Program guarded_rule(const Program& a, const Program& b) {
  if (is_probe(a)) return prog::if_eq(a.address(), a.literal(), b, prog::id());
  throw Error(ErrorKind::DecodeError, "guarded rule with a non-probe condition: " + to_text(a));
}

std::optional<Code> apply_guarded(const GuardedRule& rule, const Code& x, const EvalBudget& budget) {
  EvalOutcome cond = try_eval(rule.condition, x, budget);
  if (!cond.ok()) return std::nullopt;
  if (!cond.value->is_tok(Tok::True)) return x;
  return try_eval(rule.action, x, budget).value;
}

std::vector<GuardedRule> detect_implications(const MemoryTrace& memory, const Address& theta_target,
                                             const RuleSearch& search, const Generator& gen) {
  std::vector<GuardedRule> out;
  const auto actions = take(gen, search.k_b);
  for (const ConditionSupport& cs : supported_conditions(memory, search)) {
    auto pairs = restrict_to(cs.supported, theta_target);
    if (!pairs) continue;
    for (const Program& b : actions) {
      bool all = std::all_of(pairs->begin(), pairs->end(), [&](const auto& pr) {
        return maps(b, pr.first, pr.second, search.budget);
      });
      if (all) out.push_back(GuardedRule{cs.condition, b, cs.supported.size()});
    }
  }
  return out;
}

std::vector<Program> detect_noticeable(const MemoryTrace& memory, std::span<const Address> targets,
                                       std::size_t many, const RuleSearch& search, const Generator& gen) {
  std::vector<Program> out;
  const auto actions = take(gen, search.k_b);
  for (const ConditionSupport& cs : supported_conditions(memory, search)) {
    std::size_t implied = 0;
    for (const Address& theta : targets) {
      auto pairs = restrict_to(cs.supported, theta);
      if (!pairs) continue;
      bool all_copies = std::all_of(pairs->begin(), pairs->end(),
                                    [](const auto& pr) { return structural_eq(pr.first, pr.second); });
      if (all_copies) continue;
      if (first_fitting_action(actions, *pairs, search.budget)) ++implied;
    }
    if (implied >= many) out.push_back(cs.condition);
  }
  return out;
}

std::vector<Program> detect_noticeable(const MemoryTrace& memory, std::size_t many, const RuleSearch& search,
                                       const Generator& gen) {
  std::vector<Address> targets{layout::out()};
  for (std::size_t f = layout::kCfgN; f <= layout::kCfgSteps; ++f) targets.push_back(layout::cfg_field(f));
  return detect_noticeable(memory, targets, many, search, gen);
}

Code notify(const Code& c, const Program& a, const EvalBudget& budget) {
  if (!obeys_layout(c)) throw Error(ErrorKind::ConfigError, "notify needs a layout-conforming code");
  std::vector<Code> entries = slot_children(c, layout::kNb);
  for (const Code& e : entries)
    if (e.is_node() && e.arity() == 2 && structural_eq(e.child(0), a.code())) return c;
  Code truth = Code::token(holds(a, c, budget) ? Tok::True : Tok::False);
  entries.push_back(Code::node({a.code(), truth}));
  return replace_at(c, layout::nb(), Code::node(std::move(entries)));
}

Code refresh_notices(const Code& c, const EvalBudget& budget) {
  std::vector<Code> entries = slot_children(c, layout::kNb);
  bool changed = false;
  for (Code& e : entries) {
    if (e.is_leaf() || e.arity() != 2) continue;
    auto pred = try_decode(e.child(0));
    if (!pred) continue;
    Code truth = Code::token(holds(*pred, c, budget) ? Tok::True : Tok::False);
    if (!structural_eq(truth, e.child(1))) {
      e = Code::node({e.child(0), truth});
      changed = true;
    }
  }
  return changed ? replace_at(c, layout::nb(), Code::node(std::move(entries))) : c;
}

std::vector<Program> noticed_conditions(const Code& c) {
  std::vector<Program> out;
  for (const Code& e : c.child(layout::kNb - 1).children())
    if (e.is_node() && e.arity() == 2)
      if (auto p = try_decode(e.child(0))) out.push_back(*p);
  return out;
}

Code set_env_flag(const Code& c, bool flag) {
  std::vector<Code> entries = slot_children(c, layout::kNb);
  Code entry = Code::node({Code::token(Tok::Nil), Code::token(flag ? Tok::True : Tok::False)});
  if (!entries.empty() && entries.front().is_node() && entries.front().arity() == 2 &&
      entries.front().child(0).is_tok(Tok::Nil))
    entries.front() = entry;
  else
    entries.insert(entries.begin(), entry);
  return replace_at(c, layout::nb(), Code::node(std::move(entries)));
}

}  // namespace selfedit
