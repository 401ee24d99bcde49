#pragma once

// Tree-structured codes: atoms, codes, addresses, populations and the basic
// editing operations (read, replace, append, duplicate, memory storing).

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace selfedit {

inline constexpr std::size_t kMaxDepth = 32;       // D_max
inline constexpr std::size_t kMaxNodes = 100000;   // C_max
inline constexpr std::int64_t kIntLimit = std::int64_t{1} << 62;

enum class ErrorKind {
  AddressInvalid,
  NotANode,
  SizeExceeded,
  TypeError,
  DecodeError,
  BudgetExceeded,
  ParseError,
  ProjectionGap,
  ConfigError,
  Exhausted,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the error kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// The fixed token alphabet. Declaration order is the alphabet order.
enum class Tok : std::uint8_t {
  True,
  False,
  LP,
  RP,
  Nil,
  Id,
  K,
  Add,
  Read,
  Put,
  Append,
  Seq,
  Pair,
  IfEq,
  ApplyAt,
};

inline constexpr std::size_t kTokCount = 15;

std::string_view tok_name(Tok t);
std::optional<Tok> tok_from_name(std::string_view name);

class Atom {
 public:
  static Atom integer(std::int64_t v);
  static Atom token(Tok t) { return Atom(t); }

  bool is_int() const noexcept { return std::holds_alternative<std::int64_t>(v_); }
  bool is_tok() const noexcept { return std::holds_alternative<Tok>(v_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  Tok as_tok() const { return std::get<Tok>(v_); }

  friend bool operator==(const Atom&, const Atom&) = default;

 private:
  explicit Atom(std::int64_t v) : v_(v) {}
  explicit Atom(Tok t) : v_(t) {}
  std::variant<std::int64_t, Tok> v_;
};

std::string to_text(const Atom& a);

/// Immutable ordered tree of atoms. Copies share structure.
class Code {
 public:
  static Code leaf(Atom a);
  static Code integer(std::int64_t v) { return leaf(Atom::integer(v)); }
  static Code token(Tok t) { return leaf(Atom::token(t)); }
  /// Throws SizeExceeded when the node would break the depth or node-count limits.
  static Code node(std::vector<Code> children);
  static Code node(std::initializer_list<Code> children) {
    return node(std::vector<Code>(children));
  }

  bool is_leaf() const noexcept { return rep_->leaf.has_value(); }
  bool is_node() const noexcept { return !is_leaf(); }
  const Atom& atom() const;
  std::span<const Code> children() const noexcept { return rep_->children; }
  std::size_t arity() const noexcept { return rep_->children.size(); }
  const Code& child(std::size_t i) const { return rep_->children.at(i); }

  /// Total vertex count (leaves plus internal nodes).
  std::size_t size() const noexcept { return rep_->size; }
  /// Longest root-to-vertex path in edges; leaves and empty nodes have depth 0.
  std::size_t depth() const noexcept { return rep_->depth; }

  bool is_int() const noexcept { return is_leaf() && rep_->leaf->is_int(); }
  bool is_tok(Tok t) const noexcept {
    return is_leaf() && rep_->leaf->is_tok() && rep_->leaf->as_tok() == t;
  }

  /// True when both handles point to the same shared tree.
  bool same_object(const Code& other) const noexcept { return rep_ == other.rep_; }

 private:
  struct Rep {
    std::optional<Atom> leaf;
    std::vector<Code> children;
    std::size_t size = 1;
    std::size_t depth = 0;
  };
  explicit Code(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

bool structural_eq(const Code& a, const Code& b);
inline bool operator==(const Code& a, const Code& b) { return structural_eq(a, b); }
inline std::size_t size(const Code& c) { return c.size(); }

/// Canonical text form: `3`, `-2`, `TRUE`, `[1,[2,3]]`.
std::string to_text(const Code& c);
Code parse_code(std::string_view text);
std::size_t hash_code(const Code& c);

/// Path of 1-based child indices; the empty path is the root.
class Address {
 public:
  Address() = default;
  Address(std::initializer_list<std::size_t> path);
  explicit Address(std::vector<std::size_t> path);

  const std::vector<std::size_t>& path() const noexcept { return path_; }
  std::size_t length() const noexcept { return path_.size(); }
  bool is_root() const noexcept { return path_.empty(); }
  Address child(std::size_t index) const;
  /// This address followed by `suffix`.
  Address concat(const Address& suffix) const;
  bool is_prefix_of(const Address& other) const;

  /// Node of Int leaves, the encoding used inside programs.
  Code to_code() const;
  static Address from_code(const Code& c);

  friend bool operator==(const Address&, const Address&) = default;

 private:
  std::vector<std::size_t> path_;
};

/// Length first, then lexicographic.
bool address_less(const Address& a, const Address& b);
std::string to_text(const Address& a);
Address parse_address(std::string_view text);

// Editing. All operations return new trees and never touch their inputs.

Code read_at(const Code& c, const Address& theta);
/// Non-throwing lookup; nullptr when the address is invalid.
const Code* find_at(const Code& c, const Address& theta);
Code replace_at(const Code& c, const Address& theta, const Code& s);

struct Appended {
  Code code;
  Address address;
};
Appended append_at(const Code& c, const Address& theta, const Code& s);

enum class Origin { Seed, Exploit, Explore, Variant, Copy };

struct Member {
  std::uint64_t id = 0;
  Code code;
  std::optional<std::uint64_t> parent_id;
  bool dead_on_arrival = false;
  Origin origin = Origin::Copy;
};

/// Ordered multiset of codes. Equal codes are distinct members.
class Population {
 public:
  Population() = default;
  explicit Population(std::uint64_t first_id) : next_id_(first_id) {}

  /// Assigns the next id.
  std::uint64_t add(Code code, std::optional<std::uint64_t> parent = std::nullopt,
                    Origin origin = Origin::Copy, bool dead_on_arrival = false);
  /// Re-inserts an existing member keeping its id; the id must be below next_id().
  void keep(Member m);

  std::span<const Member> members() const noexcept { return members_; }
  std::span<Member> members() noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  std::uint64_t next_id() const noexcept { return next_id_; }

  /// Empty population that continues this one's id sequence.
  Population successor() const { return Population(next_id_); }

 private:
  std::vector<Member> members_;
  std::uint64_t next_id_ = 0;
};

Population duplicate(const Code& c);

// Root-slot layout of evolved codes.
namespace layout {
inline constexpr std::size_t kOut = 1;
inline constexpr std::size_t kRec = 2;
inline constexpr std::size_t kMem = 3;
inline constexpr std::size_t kCfg = 4;
inline constexpr std::size_t kNb = 5;
inline constexpr std::size_t kSlots = 5;

// CFG children.
inline constexpr std::size_t kCfgN = 1;
inline constexpr std::size_t kCfgPNum = 2;
inline constexpr std::size_t kCfgPDen = 3;
inline constexpr std::size_t kCfgKMax = 4;
inline constexpr std::size_t kCfgSteps = 5;

inline const Address& out() {
  static const Address a{kOut};
  return a;
}
inline const Address& rec() {
  static const Address a{kRec};
  return a;
}
inline const Address& mem() {
  static const Address a{kMem};
  return a;
}
inline const Address& cfg() {
  static const Address a{kCfg};
  return a;
}
inline const Address& nb() {
  static const Address a{kNb};
  return a;
}
inline Address cfg_field(std::size_t field) { return Address{kCfg, field}; }
}  // namespace layout

struct CfgParams {
  std::int64_t n = 3;
  std::int64_t p_num = 3;
  std::int64_t p_den = 4;
  std::int64_t k_max = 5000;
  std::int64_t steps = 1000;

  /// Throws ConfigError outside n >= 1, 1 <= p_num <= p_den, k_max >= 1, steps >= 1.
  void validate() const;
  Code to_code() const;
  static CfgParams from_code(const Code& c);
};

/// A fresh layout-conforming code: OUT = NIL, empty REC/MEM/NB.
Code make_layout_code(const CfgParams& cfg, const Code& out = Code::token(Tok::Nil));
bool obeys_layout(const Code& c);
CfgParams read_cfg(const Code& c);

/// `c` with its MEM slot emptied.
Code snapshot_of(const Code& c);

/// Appends a flattened snapshot of `predecessor` to the MEM slot of
/// `successor`, dropping the oldest entry first when the log would exceed
/// `max_entries`.
Code store_memory(const Code& predecessor, const Code& successor, std::size_t max_entries);

}  // namespace selfedit
