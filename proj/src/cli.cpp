#include "selfedit/cli.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace selfedit {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) bad("unknown key '" + key + "' in " + where);
}

std::int64_t get_int(const json& j, const char* key, std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) bad(std::string(key) + " must be an integer");
  return v.get<std::int64_t>();
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback) {
  std::int64_t v = get_int(j, key, static_cast<std::int64_t>(fallback));
  if (v < 0) bad(std::string(key) + " must be non-negative");
  return static_cast<std::size_t>(v);
}

std::int64_t require_int(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) bad(where + " needs '" + key + "'");
  return get_int(j, key, 0);
}

Environment parse_environment(const json& e) {
  if (!e.is_object() || !e.contains("name") || !e.at("name").is_string()) bad("environment needs a name");
  const std::string name = e.at("name").get<std::string>();
  if (name == "arithmetic") {
    only_keys(e, "environment", {"name", "start", "step", "length"});
    return arithmetic_env(require_int(e, "start", name), require_int(e, "step", name),
                          get_count(e, "length", 20));
  }
  if (name == "nested") {
    only_keys(e, "environment", {"name", "subexperiments", "count", "terms"});
    const std::size_t terms = get_count(e, "terms", 3);
    NestedScript script;
    if (e.contains("subexperiments")) {
      if (e.contains("count")) bad("nested environment takes either subexperiments or count");
      const json& parts = e.at("subexperiments");
      if (!parts.is_array()) bad("subexperiments must be an array");
      script.terms = terms;
      for (const json& p : parts) {
        only_keys(p, "subexperiment", {"start", "step"});
        script.parts.push_back({require_int(p, "start", "subexperiment"), require_int(p, "step", "subexperiment")});
      }
    } else {
      script = NestedScript::canonical(get_count(e, "count", 4), terms);
    }
    return nested_env(script);
  }
  if (name == "guarded") {
    only_keys(e, "environment", {"name", "period", "action_step", "length", "start"});
    std::int64_t period = require_int(e, "period", name);
    if (period < 0) bad("period must be positive");
    return guarded_env(static_cast<std::size_t>(period), require_int(e, "action_step", name),
                       get_count(e, "length", 20), get_int(e, "start", 0));
  }
  if (name == "parameter") {
    only_keys(e, "environment", {"name", "schedule"});
    if (!e.contains("schedule") || !e.at("schedule").is_array()) bad("parameter environment needs a schedule array");
    std::vector<Fraction> schedule;
    for (const json& v : e.at("schedule")) {
      if (v.is_number_integer()) {
        schedule.push_back({v.get<std::int64_t>(), 1});
      } else if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
        schedule.push_back({v[0].get<std::int64_t>(), v[1].get<std::int64_t>()});
      } else {
        bad("schedule entries must be integers or [num, den] pairs");
      }
    }
    return parameter_env(schedule);
  }
  bad("unknown environment '" + name + "'");
}

std::vector<Code> parse_sequence(const std::string& text) {
  std::vector<Code> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (text[i] == ',' && depth == 0)) {
      out.push_back(parse_code(text.substr(start, i - start)));
      start = i + 1;
    } else if (text[i] == '[') {
      ++depth;
    } else if (text[i] == ']') {
      --depth;
    }
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
  only_keys(j, "config", {"environment", "population", "descendants", "warmup", "memory", "seed",
                          "generations", "cfg", "rules", "trace", "verbosity"});
  if (!j.contains("environment")) bad("config needs an environment");
  RunConfig rc{parse_environment(j.at("environment")), {}, "", 1};
  EvolutionConfig& ev = rc.evolution;
  ev.population = get_count(j, "population", ev.population);
  ev.descendants = get_count(j, "descendants", ev.descendants);
  ev.warmup = get_count(j, "warmup", ev.warmup);
  ev.memory = get_count(j, "memory", ev.memory);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) bad("seed must be an integer");
    if (j.at("seed").is_number_integer() && j.at("seed").get<std::int64_t>() < 0) bad("seed must be non-negative");
    ev.seed = j.at("seed").get<std::uint64_t>();
  }
  ev.generations = get_count(j, "generations", rc.environment.length());
  if (j.contains("cfg")) {
    const json& c = j.at("cfg");
    only_keys(c, "cfg", {"n", "p_num", "p_den", "k_max", "steps"});
    ev.cfg.n = get_int(c, "n", ev.cfg.n);
    ev.cfg.p_num = get_int(c, "p_num", ev.cfg.p_num);
    ev.cfg.p_den = get_int(c, "p_den", ev.cfg.p_den);
    ev.cfg.k_max = get_int(c, "k_max", ev.cfg.k_max);
    ev.cfg.steps = get_int(c, "steps", ev.cfg.steps);
  }
  if (j.contains("rules")) {
    const json& r = j.at("rules");
    only_keys(r, "rules", {"s_min", "k_a", "k_b", "max_rank", "notice_many", "notice_every"});
    ev.rules.s_min = get_count(r, "s_min", ev.rules.s_min);
    ev.rules.k_a = get_count(r, "k_a", ev.rules.k_a);
    ev.rules.k_b = get_count(r, "k_b", ev.rules.k_b);
    ev.rules.max_rank = get_count(r, "max_rank", ev.rules.max_rank);
    ev.rules.notice_many = get_count(r, "notice_many", ev.rules.notice_many);
    ev.rules.notice_every = get_count(r, "notice_every", ev.rules.notice_every);
  }
  if (j.contains("trace")) {
    if (!j.at("trace").is_string()) bad("trace must be a path string");
    rc.trace_path = j.at("trace").get<std::string>();
  }
  rc.verbosity = static_cast<int>(get_int(j, "verbosity", 1));
  ev.validate();
  if (ev.generations > rc.environment.length()) bad("generations exceed the environment length");
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed_override,
            std::optional<std::string> trace_override, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> loaded;
  try {
    loaded = load_run_config(config_path);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
  RunConfig& rc = *loaded;
  if (seed_override) rc.evolution.seed = *seed_override;
  if (trace_override) rc.trace_path = *trace_override;

  std::ofstream trace;
  if (!rc.trace_path.empty()) {
    trace.open(rc.trace_path, std::ios::trunc);
    if (!trace) {
      err << "config error: cannot write trace " << rc.trace_path << "\n";
      return 2;
    }
  }

  BranchState state = init_population(rc.evolution);
  std::vector<GenerationReport> reports;
  while (state.generation < rc.evolution.generations && !state.extinct) {
    reports.push_back(step(state, rc.environment, rc.evolution));
    if (trace) trace << to_json_line(reports.back()) << "\n" << std::flush;
    if (rc.verbosity >= 2) out << to_json_line(reports.back()) << "\n";
  }

  if (reports.empty()) {
    if (rc.verbosity >= 1) out << "environment: " << rc.environment.name() << "\ngenerations survived: 0 of 0\n";
    return 0;
  }
  const GenerationReport& last = reports.back();
  std::size_t survived = last.extinct ? last.gen : last.gen + 1;
  if (rc.verbosity >= 1) {
    out << "environment: " << rc.environment.name() << "\n";
    out << "generations survived: " << survived << " of " << rc.evolution.generations << "\n";
    char frac[32];
    std::snprintf(frac, sizeof frac, "%.6f", last.correct_frac);
    out << "final correct_fraction: " << frac << "\n";
    std::map<std::string, std::size_t> seen;
    for (const GenerationReport& r : reports)
      for (const RecursorRecord& rr : r.recursors) {
        std::string key = rr.addr + " " + rr.prog + " (" + std::string(to_string(rr.mode)) + ")";
        if (!seen.count(key)) {
          seen.emplace(key, rr.index);
          out << "recursor gen " << r.gen << ": " << key << " index " << rr.index << "\n";
        }
      }
    if (last.extinct) out << "extinct at generation " << last.gen << "\n";
  }
  return last.extinct ? 1 : 0;
}

int cmd_diag(const std::string& sequence_text, std::size_t max_candidates, std::size_t steps,
             std::ostream& out, std::ostream& err) {
  std::vector<Code> seq;
  try {
    seq = parse_sequence(sequence_text);
  } catch (const Error& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  }
  if (seq.size() < 2) {
    err << "parse error: need at least two codes\n";
    return 2;
  }
  EvalBudget budget{steps, kMaxNodes};
  auto fit = find_simplest_fit(seq, Generator{}, max_candidates, budget);
  if (!fit) {
    out << "no fit within " << max_candidates << " candidates\n";
    return 1;
  }
  out << to_text(fit->program) << "\n";
  out << "index: " << fit->index << "\n";
  out << "next:";
  Code cur = seq.back();
  for (int i = 0; i < 3; ++i) {
    EvalOutcome v = try_eval(fit->program, cur, budget);
    if (!v.ok()) break;
    cur = *v.value;
    out << (i ? "," : " ") << to_text(cur);
  }
  out << "\n";
  return 0;
}

int cmd_enum(std::size_t count, std::ostream& out) {
  Generator gen;
  for (std::size_t i = 0; i < count; ++i) {
    auto p = gen.advance();
    if (!p) break;
    out << i << ": " << to_text(*p) << "\n";
  }
  return 0;
}

}  // namespace selfedit
