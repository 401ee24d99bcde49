#include "selfedit/code.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <functional>

namespace selfedit {

namespace {

constexpr std::array<std::string_view, kTokCount> kTokNames = {
    "TRUE", "FALSE", "LP",  "RP",     "NIL", "ID",   "K",      "ADD",
    "READ", "PUT",   "APPEND", "SEQ", "PAIR", "IFEQ", "APPLYAT",
};

void append_text(const Code& c, std::string& out) {
  if (c.is_leaf()) {
    out += to_text(c.atom());
    return;
  }
  out += '[';
  bool first = true;
  for (const Code& ch : c.children()) {
    if (!first) out += ',';
    first = false;
    append_text(ch, out);
  }
  out += ']';
}

class CodeParser {
 public:
  explicit CodeParser(std::string_view text) : text_(text) {}

  Code parse_all() {
    Code c = parse();
    if (pos_ != text_.size()) fail("trailing characters");
    return c;
  }

  Code parse() {
    if (depth_ > kMaxDepth) fail("nesting too deep");
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] == '[') {
      ++pos_;
      ++depth_;
      std::vector<Code> children;
      if (peek() == ']') {
        ++pos_;
      } else {
        for (;;) {
          children.push_back(parse());
          char ch = peek();
          ++pos_;
          if (ch == ']') break;
          if (ch != ',') fail("expected ',' or ']'");
        }
      }
      --depth_;
      return Code::node(std::move(children));
    }
    return Code::leaf(parse_atom());
  }

  Atom parse_atom() {
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || std::isdigit(static_cast<unsigned char>(text_[pos_])))) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
      if (ec != std::errc{}) fail("bad integer");
      pos_ = static_cast<std::size_t>(ptr - text_.data());
      if (v <= -kIntLimit || v >= kIntLimit) fail("integer out of range");
      return Atom::integer(v);
    }
    while (pos_ < text_.size() && std::isupper(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    auto tok = tok_from_name(text_.substr(start, pos_ - start));
    if (!tok) fail("unknown atom");
    return Atom::token(*tok);
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  [[noreturn]] void fail(const char* why) const {
    throw Error(ErrorKind::ParseError,
                std::string(why) + " at offset " + std::to_string(pos_) + " in '" +
                    std::string(text_) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
};

Code replace_rec(const Code& c, std::span<const std::size_t> path, const Code& s) {
  if (path.empty()) return s;
  std::size_t i = path.front();
  if (c.is_leaf() || i == 0 || i > c.arity()) throw Error(ErrorKind::AddressInvalid, "replace");
  std::vector<Code> children(c.children().begin(), c.children().end());
  children[i - 1] = replace_rec(children[i - 1], path.subspan(1), s);
  return Code::node(std::move(children));
}

std::int64_t cfg_int(const Code& cfg, std::size_t field) {
  if (cfg.is_leaf() || field > cfg.arity() || !cfg.child(field - 1).is_int())
    throw Error(ErrorKind::ConfigError, "CFG slot malformed");
  return cfg.child(field - 1).atom().as_int();
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::AddressInvalid: return "AddressInvalid";
    case ErrorKind::NotANode: return "NotANode";
    case ErrorKind::SizeExceeded: return "SizeExceeded";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::DecodeError: return "DecodeError";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ProjectionGap: return "ProjectionGap";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::Exhausted: return "Exhausted";
  }
  return "Unknown";
}

std::string_view tok_name(Tok t) { return kTokNames[static_cast<std::size_t>(t)]; }

std::optional<Tok> tok_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kTokNames.size(); ++i)
    if (kTokNames[i] == name) return static_cast<Tok>(i);
  return std::nullopt;
}

Atom Atom::integer(std::int64_t v) {
  if (v <= -kIntLimit || v >= kIntLimit)
    throw Error(ErrorKind::SizeExceeded, "integer magnitude must stay below 2^62");
  return Atom(v);
}

std::string to_text(const Atom& a) {
  return a.is_int() ? std::to_string(a.as_int()) : std::string(tok_name(a.as_tok()));
}

Code Code::leaf(Atom a) {
  auto rep = std::make_shared<Rep>();
  rep->leaf = a;
  return Code(std::move(rep));
}

Code Code::node(std::vector<Code> children) {
  auto rep = std::make_shared<Rep>();
  std::size_t size = 1;
  std::size_t depth = 0;
  for (const Code& ch : children) {
    size += ch.size();
    depth = std::max(depth, ch.depth() + 1);
  }
  if (size > kMaxNodes) throw Error(ErrorKind::SizeExceeded, "code exceeds node limit");
  if (depth > kMaxDepth) throw Error(ErrorKind::SizeExceeded, "code exceeds depth limit");
  rep->children = std::move(children);
  rep->size = size;
  rep->depth = depth;
  return Code(std::move(rep));
}

const Atom& Code::atom() const {
  if (!rep_->leaf) throw Error(ErrorKind::TypeError, "not a leaf");
  return *rep_->leaf;
}

bool structural_eq(const Code& a, const Code& b) {
  if (a.same_object(b)) return true;
  if (a.size() != b.size() || a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) return a.atom() == b.atom();
  if (a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!structural_eq(a.child(i), b.child(i))) return false;
  return true;
}

std::string to_text(const Code& c) {
  std::string out;
  append_text(c, out);
  return out;
}

Code parse_code(std::string_view text) { return CodeParser(text).parse_all(); }

std::size_t hash_code(const Code& c) {
  std::size_t h = c.is_leaf() ? 0x9e3779b97f4a7c15ULL : 0x51ed27ULL + c.arity();
  if (c.is_leaf()) {
    const Atom& a = c.atom();
    h ^= a.is_int() ? std::hash<std::int64_t>{}(a.as_int())
                    : 0xabcdefULL + static_cast<std::size_t>(a.as_tok());
    return h;
  }
  for (const Code& ch : c.children()) h = (h ^ hash_code(ch)) * 0x100000001b3ULL;
  return h;
}

Address::Address(std::initializer_list<std::size_t> path) : Address(std::vector<std::size_t>(path)) {}

Address::Address(std::vector<std::size_t> path) : path_(std::move(path)) {
  if (path_.size() > kMaxDepth) throw Error(ErrorKind::AddressInvalid, "address too long");
  for (std::size_t i : path_)
    if (i == 0) throw Error(ErrorKind::AddressInvalid, "address entries are 1-based");
}

Address Address::child(std::size_t index) const {
  auto p = path_;
  p.push_back(index);
  return Address(std::move(p));
}

Address Address::concat(const Address& suffix) const {
  auto p = path_;
  p.insert(p.end(), suffix.path_.begin(), suffix.path_.end());
  return Address(std::move(p));
}

bool Address::is_prefix_of(const Address& other) const {
  return path_.size() <= other.path_.size() &&
         std::equal(path_.begin(), path_.end(), other.path_.begin());
}

Code Address::to_code() const {
  std::vector<Code> leaves;
  leaves.reserve(path_.size());
  for (std::size_t i : path_) leaves.push_back(Code::integer(static_cast<std::int64_t>(i)));
  return Code::node(std::move(leaves));
}

Address Address::from_code(const Code& c) {
  if (c.is_leaf()) throw Error(ErrorKind::DecodeError, "address must be a node");
  std::vector<std::size_t> path;
  for (const Code& ch : c.children()) {
    if (!ch.is_int() || ch.atom().as_int() < 1)
      throw Error(ErrorKind::DecodeError, "address entries must be positive integers");
    path.push_back(static_cast<std::size_t>(ch.atom().as_int()));
  }
  return Address(std::move(path));
}

bool address_less(const Address& a, const Address& b) {
  if (a.length() != b.length()) return a.length() < b.length();
  return a.path() < b.path();
}

std::string to_text(const Address& a) { return to_text(a.to_code()); }

Address parse_address(std::string_view text) {
  Code c = parse_code(text);
  try {
    return Address::from_code(c);
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

const Code* find_at(const Code& c, const Address& theta) {
  const Code* cur = &c;
  for (std::size_t i : theta.path()) {
    if (cur->is_leaf() || i > cur->arity()) return nullptr;
    cur = &cur->child(i - 1);
  }
  return cur;
}

Code read_at(const Code& c, const Address& theta) {
  const Code* found = find_at(c, theta);
  if (!found) throw Error(ErrorKind::AddressInvalid, to_text(theta) + " in " + to_text(c));
  return *found;
}

Code replace_at(const Code& c, const Address& theta, const Code& s) {
  if (!find_at(c, theta)) throw Error(ErrorKind::AddressInvalid, to_text(theta));
  return replace_rec(c, theta.path(), s);
}

Appended append_at(const Code& c, const Address& theta, const Code& s) {
  const Code* target = find_at(c, theta);
  if (!target) throw Error(ErrorKind::AddressInvalid, to_text(theta));
  if (target->is_leaf()) throw Error(ErrorKind::NotANode, to_text(theta));
  std::vector<Code> children(target->children().begin(), target->children().end());
  children.push_back(s);
  std::size_t arity = children.size();
  Code grown = Code::node(std::move(children));
  return {replace_rec(c, theta.path(), grown), theta.child(arity)};
}

std::uint64_t Population::add(Code code, std::optional<std::uint64_t> parent, Origin origin,
                              bool dead_on_arrival) {
  std::uint64_t id = next_id_++;
  members_.push_back(Member{id, std::move(code), parent, dead_on_arrival, origin});
  return id;
}

void Population::keep(Member m) {
  if (m.id >= next_id_) throw std::logic_error("Population::keep: id was never assigned");
  members_.push_back(std::move(m));
}

Population duplicate(const Code& c) {
  Population pop;
  pop.add(c);
  pop.add(c);
  return pop;
}

void CfgParams::validate() const {
  if (n < 1) throw Error(ErrorKind::ConfigError, "n must be >= 1");
  if (p_num < 1 || p_num > p_den) throw Error(ErrorKind::ConfigError, "need 1 <= p_num <= p_den");
  if (k_max < 1) throw Error(ErrorKind::ConfigError, "K_max must be >= 1");
  if (steps < 1) throw Error(ErrorKind::ConfigError, "S_budget must be >= 1");
}

Code CfgParams::to_code() const {
  return Code::node({Code::integer(n), Code::integer(p_num), Code::integer(p_den),
                     Code::integer(k_max), Code::integer(steps)});
}

CfgParams CfgParams::from_code(const Code& c) {
  CfgParams p;
  p.n = cfg_int(c, layout::kCfgN);
  p.p_num = cfg_int(c, layout::kCfgPNum);
  p.p_den = cfg_int(c, layout::kCfgPDen);
  p.k_max = cfg_int(c, layout::kCfgKMax);
  p.steps = cfg_int(c, layout::kCfgSteps);
  return p;
}

Code make_layout_code(const CfgParams& cfg, const Code& out) {
  cfg.validate();
  return Code::node({out, Code::node({}), Code::node({}), cfg.to_code(), Code::node({})});
}

bool obeys_layout(const Code& c) {
  if (c.is_leaf() || c.arity() != layout::kSlots) return false;
  if (c.child(layout::kRec - 1).is_leaf() || c.child(layout::kMem - 1).is_leaf() ||
      c.child(layout::kNb - 1).is_leaf())
    return false;
  try {
    CfgParams::from_code(c.child(layout::kCfg - 1)).validate();
  } catch (const Error&) {
    return false;
  }
  return true;
}

CfgParams read_cfg(const Code& c) {
  if (!obeys_layout(c)) throw Error(ErrorKind::ConfigError, "code does not obey the slot layout");
  return CfgParams::from_code(c.child(layout::kCfg - 1));
}

Code snapshot_of(const Code& c) {
  if (c.is_leaf() || c.arity() < layout::kMem) throw Error(ErrorKind::AddressInvalid, "no MEM slot");
  if (c.child(layout::kMem - 1).is_node() && c.child(layout::kMem - 1).arity() == 0) return c;
  return replace_at(c, layout::mem(), Code::node({}));
}

Code store_memory(const Code& predecessor, const Code& successor, std::size_t max_entries) {
  if (max_entries == 0) throw Error(ErrorKind::ConfigError, "memory cap must be positive");
  if (!obeys_layout(predecessor) || !obeys_layout(successor))
    throw Error(ErrorKind::ConfigError, "store_memory needs layout-conforming codes");
  const Code& log = successor.child(layout::kMem - 1);
  std::vector<Code> entries(log.children().begin(), log.children().end());
  entries.push_back(snapshot_of(predecessor));
  if (entries.size() > max_entries)
    entries.erase(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(entries.size() - max_entries));
  return replace_at(successor, layout::mem(), Code::node(std::move(entries)));
}

}  // namespace selfedit
