#include "selfedit/generator.hpp"

#include <algorithm>

namespace selfedit {

namespace {

std::string key_of(const Program& p) { return to_text(p.code()); }

}  // namespace

std::vector<Atom> alphabet_atoms(std::int64_t literal_bound) {
  std::vector<Atom> atoms{Atom::integer(0)};
  for (std::int64_t v = 1; v <= literal_bound; ++v) {
    atoms.push_back(Atom::integer(v));
    atoms.push_back(Atom::integer(-v));
  }
  for (std::size_t t = 0; t < kTokCount; ++t) atoms.push_back(Atom::token(static_cast<Tok>(t)));
  return atoms;
}

std::vector<Address> addresses_of_length(std::size_t length, std::size_t max_entry) {
  std::vector<Address> out;
  std::vector<std::size_t> path(length, 1);
  for (;;) {
    out.emplace_back(path);
    std::size_t i = length;
    while (i > 0 && path[i - 1] == max_entry) path[--i] = 1;
    if (i == 0) break;
    ++path[i - 1];
  }
  return out;
}

ProgramCatalog::ProgramCatalog(EnumerationBounds bounds) : bounds_(bounds) {
  atoms_ = alphabet_atoms(bounds_.literal_bound);
  for (const Atom& a : atoms_)
    if (a.is_int()) ints_.push_back(a);
  by_size_.resize(bounds_.max_size + 1);
}

std::shared_ptr<ProgramCatalog> ProgramCatalog::shared_default() {
  static const auto catalog = std::make_shared<ProgramCatalog>();
  return catalog;
}

const std::vector<Program>& ProgramCatalog::of_size(std::size_t size) {
  if (size > bounds_.max_size) throw Error(ErrorKind::Exhausted, "size beyond enumeration bound");
  std::lock_guard lock(mutex_);
  for (std::size_t s = 0; s <= size; ++s)
    if (!by_size_[s]) build(s);
  return *by_size_[size];
}

// Constructors in rank order; within each, fields vary in the order the
// program order compares them, so the output is sorted by construction.
void ProgramCatalog::build(std::size_t s) {
  auto out = std::make_unique<std::vector<Program>>();
  auto lower = [&](std::size_t k) -> const std::vector<Program>& { return *by_size_[k]; };
  const std::size_t max_entry = static_cast<std::size_t>(bounds_.literal_bound);

  if (s == 2) out->push_back(prog::id());
  if (s == 3) {
    for (const Atom& a : atoms_) out->push_back(prog::constant(a));
    for (const Atom& a : ints_) out->push_back(prog::add(a.as_int()));
  }
  if (s >= 3)
    for (const Address& a : addresses_of_length(s - 3, max_entry)) out->push_back(prog::read(a));
  for (bool is_append : {false, true}) {
    // size = 2 + (1 + len) + body
    for (std::size_t len = 0; len + 5 <= s; ++len)
      for (const Address& a : addresses_of_length(len, max_entry))
        for (const Program& body : lower(s - 3 - len))
          out->push_back(is_append ? prog::append(a, body) : prog::put(a, body));
  }
  for (bool is_pair : {false, true}) {
    for (std::size_t left = 2; left + 4 <= s; ++left)
      for (const Program& l : lower(left))
        for (const Program& r : lower(s - 2 - left))
          out->push_back(is_pair ? prog::pair(l, r) : prog::seq(l, r));
  }
  // size = 3 + (1 + len) + then + else
  for (std::size_t len = 0; len + 8 <= s; ++len)
    for (const Address& a : addresses_of_length(len, max_entry))
      for (const Atom& v : atoms_)
        for (std::size_t t = 2; t + len + 6 <= s; ++t)
          for (const Program& then : lower(t))
            for (const Program& otherwise : lower(s - 4 - len - t))
              out->push_back(prog::if_eq(a, v, then, otherwise));
  // size = 2 + (1 + len1) + (1 + len2)
  for (std::size_t len1 = 0; len1 + 4 <= s; ++len1)
    for (const Address& a : addresses_of_length(len1, max_entry))
      for (const Address& b : addresses_of_length(s - 4 - len1, max_entry))
        out->push_back(prog::apply_at(a, b));

  by_size_[s] = std::move(out);
}

Generator::Generator() : Generator(ProgramCatalog::shared_default()) {}

Generator::Generator(std::shared_ptr<ProgramCatalog> catalog)
    : catalog_(std::move(catalog)),
      priority_keys_(std::make_shared<const std::unordered_set<std::string>>()) {}

bool Generator::in_priority(const Program& p) const {
  return !priority_.empty() && priority_keys_->contains(key_of(p));
}

std::optional<Program> Generator::advance() {
  if (priority_pos_ < priority_.size()) {
    ++yielded_;
    return priority_[priority_pos_++];
  }
  const std::size_t max_size = catalog_->bounds().max_size;
  while (size_ <= max_size) {
    const auto& bucket = catalog_->of_size(size_);
    while (index_ < bucket.size()) {
      const Program& p = bucket[index_++];
      if (in_priority(p)) continue;
      ++yielded_;
      return p;
    }
    ++size_;
    index_ = 0;
  }
  return std::nullopt;
}

std::pair<Program, Generator> Generator::next() const {
  Generator g = *this;
  auto p = g.advance();
  if (!p) throw Error(ErrorKind::Exhausted, "generator exhausted");
  return {*p, std::move(g)};
}

Generator Generator::promote(const Program& p) const {
  Generator g(catalog_);
  g.priority_.push_back(p);
  for (const Program& q : priority_)
    if (!(q == p)) g.priority_.push_back(q);
  std::unordered_set<std::string> keys;
  for (const Program& q : g.priority_) keys.insert(key_of(q));
  g.priority_keys_ = std::make_shared<const std::unordered_set<std::string>>(std::move(keys));
  return g;
}

std::vector<Program> take(Generator gen, std::size_t count) {
  std::vector<Program> out;
  out.reserve(count);
  while (out.size() < count) {
    auto p = gen.advance();
    if (!p) break;
    out.push_back(*p);
  }
  return out;
}

Program make_probe(const Address& a, const Atom& v) {
  return prog::if_eq(a, v, prog::constant(Atom::token(Tok::True)),
                     prog::constant(Atom::token(Tok::False)));
}

bool is_probe(const Program& p) {
  if (p.op() != Op::IfEq) return false;
  const Program t = p.first();
  const Program e = p.second();
  return t.op() == Op::K && e.op() == Op::K && t.literal() == Atom::token(Tok::True) &&
         e.literal() == Atom::token(Tok::False);
}

// Probes share their branches, so program order reduces to address (length,
// then lexicographic) followed by atom.
std::vector<Program> boolean_probes(std::size_t count, std::int64_t literal_bound) {
  std::vector<Program> out;
  const auto atoms = alphabet_atoms(literal_bound);
  for (std::size_t len = 0; out.size() < count && len + 1 <= kMaxDepth; ++len) {
    if (10 + len > kMaxProgramSize) break;
    for (const Address& a : addresses_of_length(len, static_cast<std::size_t>(literal_bound))) {
      for (const Atom& v : atoms) {
        if (out.size() == count) return out;
        out.push_back(make_probe(a, v));
      }
    }
  }
  return out;
}

std::size_t probe_count(std::size_t max_length, std::int64_t literal_bound) {
  std::size_t addresses = 0;
  std::size_t per_length = 1;
  for (std::size_t len = 0; len <= max_length; ++len) {
    addresses += per_length;
    per_length *= static_cast<std::size_t>(literal_bound);
  }
  return addresses * alphabet_atoms(literal_bound).size();
}

}  // namespace selfedit
