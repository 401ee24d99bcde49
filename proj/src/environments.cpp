#include "selfedit/environments.hpp"

namespace selfedit {

Environment::Environment(std::string name, std::vector<Atom> demands, std::optional<std::vector<bool>> flags)
    : name_(std::move(name)), demands_(std::move(demands)), flags_(std::move(flags)) {
  if (demands_.empty()) throw Error(ErrorKind::ConfigError, "environment needs at least one demand");
  if (flags_ && flags_->size() != demands_.size())
    throw Error(ErrorKind::ConfigError, "condition flags must match the demand length");
}

Atom Environment::demand(std::size_t t) const {
  if (t >= demands_.size())
    throw Error(ErrorKind::ConfigError, name_ + ": no demand at step " + std::to_string(t));
  return demands_[t];
}

std::optional<bool> Environment::condition(std::size_t t) const {
  if (!flags_) return std::nullopt;
  if (t >= flags_->size()) throw Error(ErrorKind::ConfigError, name_ + ": no condition at step " + std::to_string(t));
  return (*flags_)[t];
}

NestedScript NestedScript::canonical(std::size_t count, std::size_t terms) {
  NestedScript s;
  s.terms = terms;
  for (std::size_t k = 1; k <= count; ++k) s.parts.push_back({1, static_cast<std::int64_t>(k)});
  return s;
}

void NestedScript::validate() const {
  if (parts.empty()) throw Error(ErrorKind::ConfigError, "nested script needs a sub-experiment");
  if (terms < 3) throw Error(ErrorKind::ConfigError, "sub-experiments need at least 3 terms");
}

Environment arithmetic_env(std::int64_t start, std::int64_t step, std::size_t length) {
  if (length < 1) throw Error(ErrorKind::ConfigError, "length must be >= 1");
  std::vector<Atom> d;
  for (std::size_t t = 0; t < length; ++t) d.push_back(Atom::integer(start + static_cast<std::int64_t>(t) * step));
  return Environment("arithmetic", std::move(d));
}

Environment nested_env(const NestedScript& script) {
  script.validate();
  std::vector<Atom> d;
  for (const SubExperiment& part : script.parts) {
    d.push_back(Atom::token(Tok::LP));
    for (std::size_t i = 0; i < script.terms; ++i)
      d.push_back(Atom::integer(part.start + static_cast<std::int64_t>(i) * part.step));
    d.push_back(Atom::token(Tok::RP));
  }
  return Environment("nested", std::move(d));
}

Environment guarded_env(std::size_t period, std::int64_t action_step, std::size_t length, std::int64_t start) {
  if (period < 2) throw Error(ErrorKind::ConfigError, "period must be >= 2");
  if (length < 1) throw Error(ErrorKind::ConfigError, "length must be >= 1");
  std::vector<Atom> d;
  std::vector<bool> flags;
  std::int64_t value = start;
  for (std::size_t t = 0; t < length; ++t) {
    bool flag = t % period == 0;
    if (flag && t > 0) value += action_step;
    d.push_back(Atom::integer(value));
    flags.push_back(flag);
  }
  return Environment("guarded", std::move(d), std::move(flags));
}

Environment parameter_env(const std::vector<Fraction>& schedule) {
  if (schedule.empty()) throw Error(ErrorKind::ConfigError, "schedule must be non-empty");
  std::vector<Atom> d;
  for (const Fraction& f : schedule) {
    if (f.den <= 0) throw Error(ErrorKind::ConfigError, "schedule denominators must be positive");
    std::int64_t q = f.num / f.den;
    if (f.num % f.den != 0 && f.num < 0) --q;
    d.push_back(Atom::integer(q));
  }
  return Environment("parameter", std::move(d));
}

}  // namespace selfedit
