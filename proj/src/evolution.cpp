#include "selfedit/evolution.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace selfedit {

void EvolutionConfig::validate() const {
  if (population < 1) throw Error(ErrorKind::ConfigError, "population must be >= 1");
  if (descendants < 2) throw Error(ErrorKind::ConfigError, "descendants must be >= 2");
  cfg.validate();
  if (memory < static_cast<std::size_t>(cfg.n)) throw Error(ErrorKind::ConfigError, "memory must be >= cfg.n");
  if (rules.s_min < 1) throw Error(ErrorKind::ConfigError, "rules.s_min must be >= 1");
  if (rules.max_rank < 1) throw Error(ErrorKind::ConfigError, "rules.max_rank must be >= 1");
}

namespace {

struct Ctx {
  const Code& c;
  const DiagOptions& opts;
  std::size_t n;
  std::size_t k_max;
  EvalBudget budget;
  MemoryTrace full;
  std::vector<Recursor> rec;
};

bool holds(const Program& probe, const Code& x, const EvalBudget& budget) {
  EvalOutcome v = try_eval(probe, x, budget);
  return v.ok() && v.value->is_tok(Tok::True);
}

bool maps(const Program& p, const Code& in, const Code& out, const EvalBudget& budget) {
  EvalOutcome v = try_eval(p, in, budget);
  return v.ok() && *v.value == out;
}

void int_leaves(const Code& c, std::vector<std::size_t>& path, std::vector<Address>& out) {
  if (c.is_leaf()) {
    if (c.is_int()) out.emplace_back(path);
    return;
  }
  for (std::size_t i = 0; i < c.arity(); ++i) {
    path.push_back(i + 1);
    int_leaves(c.child(i), path, out);
    path.pop_back();
  }
}

std::optional<std::size_t> stored_out(const std::vector<Recursor>& rec) {
  for (std::size_t i = 0; i < rec.size(); ++i)
    if (rec[i].mode == FitMode::Projected && rec[i].target == layout::out()) return i;
  return std::nullopt;
}

// Long-memory guarded rule whose condition holds now and whose action
// predicts something other than the recent fit.
std::optional<Recursor> guarded_choice(const Ctx& x, const std::optional<Code>& recent_prediction) {
  const auto transitions = x.full.transitions();
  if (transitions.size() < x.opts.rules.s_min) return std::nullopt;
  const Code now = snapshot_of(x.c);
  const Code& out_now = x.c.child(layout::kOut - 1);
  const auto probes = boolean_probes(x.opts.rules.k_a);
  const auto actions = take(x.opts.gen, x.opts.rules.k_b);
  for (const Program& a : probes) {
    if (!holds(a, now, x.budget)) continue;
    std::vector<const Transition*> supported;
    for (const Transition& t : transitions)
      if (holds(a, t.before, x.budget)) supported.push_back(&t);
    if (supported.size() < x.opts.rules.s_min || supported.size() == transitions.size()) continue;
    for (std::size_t j = 0; j < actions.size(); ++j) {
      const Program& b = actions[j];
      bool all = std::all_of(supported.begin(), supported.end(), [&](const Transition* t) {
        return maps(b, t->before.child(layout::kOut - 1), t->after.child(layout::kOut - 1), x.budget);
      });
      if (!all) continue;
      EvalOutcome pred = try_eval(b, out_now, x.budget);
      if (!pred.ok() || (recent_prediction && *pred.value == *recent_prediction)) break;
      const Program& rd = prog::read(layout::out());
      Program rule = prog::if_eq(a.address(), a.literal(), prog::seq(rd, b), rd);
      return Recursor{layout::out(), rule, j, FitMode::Contextual};
    }
  }
  return std::nullopt;
}

// Values at theta across the whole memory with consecutive repeats collapsed;
// snapshots lacking theta are skipped.
std::vector<Code> change_points(const MemoryTrace& memory, const Address& theta, std::size_t keep) {
  std::vector<Code> out;
  for (const Code& s : memory.snapshots()) {
    const Code* v = find_at(s, theta);
    if (!v || !v->is_int()) continue;
    if (out.empty() || !(out.back() == *v)) out.push_back(*v);
  }
  if (keep > 0 && out.size() > keep) out.erase(out.begin(), out.end() - static_cast<std::ptrdiff_t>(keep));
  return out;
}

// Corrects stored entry `pos` by fitting the history of one of its integer
// literals. The last recursor returned is the corrected entry.
std::optional<std::vector<Recursor>> escalate(const Ctx& x, std::size_t pos, std::size_t rank) {
  if (rank >= x.opts.rules.max_rank) return std::nullopt;
  const Recursor& entry = x.rec[pos];
  const Code* input = find_at(x.c, entry.target);
  if (!input) return std::nullopt;
  std::vector<Address> leaves;
  std::vector<std::size_t> path;
  int_leaves(entry.program.code(), path, leaves);
  for (const Address& rho : leaves) {
    const Address theta = Address{layout::kRec, pos + 1, 2}.concat(rho);
    std::vector<Recursor> extra;
    std::optional<Program> r2;
    std::size_t index = 0;
    auto hist = change_points(x.full, theta, x.n);
    if (hist.size() >= 2) {
      if (auto fit = find_simplest_fit(hist, x.opts.gen, x.k_max, x.budget)) {
        r2 = fit->program;
        index = fit->index;
        extra.push_back(Recursor{theta, *r2, index, FitMode::Projected});
      }
    }
    if (!r2) {
      for (std::size_t j = 0; j < x.rec.size() && !r2; ++j) {
        if (x.rec[j].mode != FitMode::Projected || !(x.rec[j].target == theta)) continue;
        if (auto sub = escalate(x, j, rank + 1)) {
          r2 = sub->back().program;
          index = sub->back().found_at_index;
          extra = std::move(*sub);
        }
      }
    }
    if (!r2) continue;
    EvalOutcome nv = try_eval(*r2, read_at(x.c, theta), x.budget);
    if (!nv.ok()) continue;
    std::optional<Program> next;
    try {
      next = try_decode(replace_at(entry.program.code(), rho, *nv.value));
    } catch (const Error&) {
    }
    if (!next || !try_eval(*next, *input, x.budget).ok()) continue;
    extra.push_back(Recursor{entry.target, *next, index, FitMode::Projected});
    return extra;
  }
  return std::nullopt;
}

std::size_t clamp_size(std::int64_t v) { return v < 1 ? 1 : static_cast<std::size_t>(v); }

}  // namespace

std::vector<Recursor> self_diagonalize(const Code& c, const DiagOptions& opts) {
  const CfgParams cfg = read_cfg(c);
  Ctx x{c, opts, clamp_size(cfg.n), clamp_size(cfg.k_max),
        EvalBudget{clamp_size(cfg.steps), kMaxNodes}, MemoryTrace::of(c, 0), read_rec(c)};
  const MemoryTrace recent = MemoryTrace::of(c, x.n);
  std::vector<Recursor> found;

  std::optional<Recursor> r1;
  if (recent.size() >= 2) r1 = diagonalize(recent, layout::out(), opts.gen, x.k_max, x.budget);
  std::optional<Code> r1_prediction;
  if (r1) r1_prediction = recursor_output(*r1, c, x.budget);

  if (auto rule = guarded_choice(x, r1_prediction)) {
    found.push_back(*rule);
  } else if (r1) {
    found.push_back(*r1);
  } else if (auto pos = stored_out(x.rec)) {
    const auto transitions = x.full.transitions();
    bool still_fits = !transitions.empty() &&
                      maps(x.rec[*pos].program, transitions.back().before.child(layout::kOut - 1),
                           transitions.back().after.child(layout::kOut - 1), x.budget);
    if (!still_fits) {
      if (auto esc = escalate(x, *pos, 1)) found.insert(found.end(), esc->begin(), esc->end());
    }
  }

  if (recent.size() >= 2) {
    auto rn = diagonalize(recent, layout::cfg_field(layout::kCfgN), opts.gen, x.k_max, x.budget);
    if (rn && rn->program.op() != Op::Id) found.push_back(*rn);
  }
  return found;
}

std::vector<Recursor> with_stored(const Code& c, const std::vector<Recursor>& fresh) {
  std::vector<Recursor> all = fresh;
  for (const Recursor& r : read_rec(c)) {
    if (r.mode != FitMode::Projected || layout::rec().is_prefix_of(r.target)) continue;
    bool refreshed = std::any_of(fresh.begin(), fresh.end(), [&](const Recursor& f) { return f.target == r.target; });
    if (!refreshed) all.push_back(r);
  }
  return all;
}

Population proliferate(const Code& c, const std::vector<Recursor>& fresh, std::size_t m, std::size_t memory_cap,
                       Rng& rng, const Generator& explore) {
  const CfgParams cfg = read_cfg(c);
  ProliferationParams params;
  params.m = m;
  params.p = Fraction{cfg.p_num, cfg.p_den};
  params.memory_cap = memory_cap;
  params.budget = EvalBudget{clamp_size(cfg.steps), kMaxNodes};
  const auto recursors = with_stored(c, fresh);
  return apply_recursors(c, recursors, params, rng, explore);
}

Population proliferate(const Code& c, std::size_t m, std::size_t memory_cap, Rng& rng, const DiagOptions& opts) {
  return proliferate(c, self_diagonalize(c, opts), m, memory_cap, rng, opts.gen);
}

Population select(const Population& pop, const Atom& demanded, std::size_t cap, Rng& rng) {
  const Code want = Code::leaf(demanded);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const Member& m = pop.members()[i];
    if (!m.dead_on_arrival && m.code.child(layout::kOut - 1) == want) keep.push_back(i);
  }
  if (keep.size() > cap) {
    for (std::size_t i = 0; i < cap; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(keep.size() - i));
      std::swap(keep[i], keep[j]);
    }
    keep.resize(cap);
    std::sort(keep.begin(), keep.end());
  }
  Population out = pop.successor();
  for (std::size_t i : keep) out.keep(pop.members()[i]);
  return out;
}

void warmup_seed(Population& pop, const Atom& demanded) {
  if (pop.empty()) return;
  const Code want = Code::leaf(demanded);
  auto members = pop.members();
  if (std::any_of(members.begin(), members.end(), [&](const Member& m) {
        return !m.dead_on_arrival && m.code.child(layout::kOut - 1) == want;
      }))
    return;
  auto lowest = std::min_element(members.begin(), members.end(),
                                 [](const Member& a, const Member& b) { return a.id < b.id; });
  lowest->code = replace_at(lowest->code, layout::out(), Code::leaf(demanded));
  lowest->dead_on_arrival = false;
}

BranchState init_population(const EvolutionConfig& config) {
  config.validate();
  BranchState s;
  const Code seed = make_layout_code(config.cfg);
  for (std::size_t i = 0; i < config.population; ++i) s.population.add(seed, std::nullopt, Origin::Seed);
  return s;
}

GenerationReport step(BranchState& state, const Environment& env, const EvolutionConfig& config) {
  const std::size_t g = state.generation;
  GenerationReport report;
  report.gen = g;
  report.demand = env.demand(g);
  const Code want = Code::leaf(report.demand);

  if (env.has_condition()) {
    bool flag = *env.condition(g);
    for (Member& m : state.population.members()) m.code = set_env_flag(m.code, flag);
  }

  DiagOptions opts;
  opts.rules = config.rules;
  std::unordered_map<std::string, std::vector<Recursor>> cache;
  std::set<std::string> seen;
  Population next = state.population.successor();
  for (const Member& parent : state.population.members()) {
    const std::string key = to_text(parent.code);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, self_diagonalize(parent.code, opts)).first;
    for (const Recursor& r : it->second) {
      RecursorRecord rr{to_text(r.target), to_text(r.program), r.found_at_index, r.mode};
      if (seen.insert(rr.addr + " " + rr.prog + " " + std::string(to_string(r.mode))).second)
        report.recursors.push_back(rr);
    }
    Rng rng = Rng::derive(config.seed, parent.id);
    Population kids = proliferate(parent.code, it->second, config.descendants, config.memory, rng, opts.gen);
    for (const Member& k : kids.members()) {
      next.add(k.code, parent.id, k.origin, k.dead_on_arrival);
      bool correct = !k.dead_on_arrival && k.code.child(layout::kOut - 1) == want;
      ++report.produced;
      if (correct) ++report.correct_frac;
      if (k.origin == Origin::Exploit) {
        ++report.exploit_produced;
        if (correct) ++report.exploit_correct;
      }
    }
  }
  if (report.produced > 0) report.correct_frac /= static_cast<double>(report.produced);

  if (g < config.warmup) warmup_seed(next, report.demand);
  Rng pick = Rng::derive(config.seed ^ 0x5e1ec7ULL, g);
  Population survivors = select(next, report.demand, config.population, pick);
  for (Member& m : survivors.members()) m.code = refresh_notices(m.code);

  std::set<std::string> notices;
  if (config.rules.notice_every > 0 && (g + 1) % config.rules.notice_every == 0) {
    RuleSearch search;
    search.s_min = config.rules.s_min;
    search.k_a = config.rules.k_a;
    search.k_b = config.rules.k_b;
    std::unordered_map<std::string, std::vector<Program>> found;
    for (Member& m : survivors.members()) {
      const std::string key = to_text(m.code);
      auto it = found.find(key);
      if (it == found.end())
        it = found.emplace(key, detect_noticeable(MemoryTrace::of(m.code), config.rules.notice_many, search)).first;
      for (const Program& a : it->second) {
        m.code = notify(m.code, a);
        notices.insert(to_text(a));
      }
    }
  }
  report.notices.assign(notices.begin(), notices.end());

  report.survivors = survivors.size();
  report.extinct = survivors.empty();
  state.population = std::move(survivors);
  state.extinct = report.extinct;
  ++state.generation;
  return report;
}

std::vector<GenerationReport> run(const EvolutionConfig& config, const Environment& env) {
  if (config.generations > env.length())
    throw Error(ErrorKind::ConfigError, "environment is shorter than the requested generations");
  BranchState state = init_population(config);
  std::vector<GenerationReport> out;
  while (state.generation < config.generations && !state.extinct) out.push_back(step(state, env, config));
  return out;
}

std::string to_json_line(const GenerationReport& r) {
  using nlohmann::json;
  auto str = [](const std::string& s) { return json(s).dump(); };
  std::string line = "{\"gen\":" + std::to_string(r.gen) + ",\"demand\":" + str(to_text(r.demand)) +
                     ",\"produced\":" + std::to_string(r.produced) + ",\"survivors\":" + std::to_string(r.survivors);
  char frac[32];
  std::snprintf(frac, sizeof frac, "%.6f", r.correct_frac);
  line += ",\"correct_frac\":" + std::string(frac) + ",\"recursors\":[";
  for (std::size_t i = 0; i < r.recursors.size(); ++i) {
    const RecursorRecord& rr = r.recursors[i];
    if (i) line += ",";
    line += "{\"addr\":" + str(rr.addr) + ",\"prog\":" + str(rr.prog) + ",\"index\":" + std::to_string(rr.index) +
            ",\"mode\":" + str(std::string(to_string(rr.mode))) + "}";
  }
  line += "],\"notices\":[";
  for (std::size_t i = 0; i < r.notices.size(); ++i) line += (i ? "," : "") + str(r.notices[i]);
  line += "],\"extinct\":";
  line += r.extinct ? "true" : "false";
  line += "}";
  return line;
}

}  // namespace selfedit
