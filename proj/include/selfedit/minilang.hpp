#pragma once

// The tree language programs are written in. A program is itself a Code; the
// head token of its root node selects the constructor:
//
//   ID                       [ID]
//   K(v)                     [K,v]            v an atom leaf
//   ADD(k)                   [ADD,k]
//   READ(a)                  [READ,a]         a an address node
//   PUT(a,P)                 [PUT,a,P]
//   APPEND(a,P)              [APPEND,a,P]
//   SEQ(P,Q)                 [SEQ,P,Q]
//   PAIR(P,Q)                [PAIR,P,Q]
//   IFEQ(a,v,P,Q)            [IFEQ,a,v,P,Q]
//   APPLYAT(a_src,a_prog)    [APPLYAT,a_src,a_prog]

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "selfedit/code.hpp"

namespace selfedit {

inline constexpr std::size_t kMaxProgramSize = 25;  // G_max

struct EvalBudget {
  std::size_t max_steps = 1000;
  std::size_t max_result_nodes = kMaxNodes;
};

enum class Op : std::uint8_t { Id, K, Add, Read, Put, Append, Seq, Pair, IfEq, ApplyAt };

/// A grammar-checked Code. Only `decode` and the factories below create one.
class Program {
 public:
  const Code& code() const noexcept { return code_; }
  Op op() const;
  std::size_t size() const noexcept { return code_.size(); }

  // Field accessors; each is valid only for the constructors that carry it.
  Address address() const;         // READ, PUT, APPEND, IFEQ, APPLYAT (source)
  Address second_address() const;  // APPLYAT (program location)
  Atom literal() const;            // K, ADD, IFEQ
  Program first() const;           // PUT, APPEND (body), SEQ, PAIR, IFEQ (then)
  Program second() const;          // SEQ, PAIR, IFEQ (else)

  friend bool operator==(const Program& a, const Program& b) { return a.code_ == b.code_; }

 private:
  friend Program decode(const Code& c);
  friend Program unchecked_program(Code c);
  explicit Program(Code c) : code_(std::move(c)) {}
  Code code_;
};

/// Returns `c` as a Program or throws DecodeError naming the offending address.
Program decode(const Code& c);
std::optional<Program> try_decode(const Code& c);

namespace prog {
Program id();
Program constant(const Atom& v);
Program add(std::int64_t k);
Program read(const Address& a);
Program put(const Address& a, const Program& body);
Program append(const Address& a, const Program& body);
Program seq(const Program& first, const Program& then);
Program pair(const Program& left, const Program& right);
Program if_eq(const Address& a, const Atom& v, const Program& then, const Program& otherwise);
Program apply_at(const Address& source, const Address& program);
}  // namespace prog

struct EvalOutcome {
  std::optional<Code> value;
  ErrorKind error = ErrorKind::TypeError;
  std::string detail;
  std::size_t steps = 0;

  bool ok() const noexcept { return value.has_value(); }
};

/// Evaluates without throwing; every constructor evaluation costs one step.
EvalOutcome try_eval(const Program& p, const Code& input, const EvalBudget& budget = {});
/// Throwing variant of try_eval.
Code eval(const Program& p, const Code& input, const EvalBudget& budget = {});

/// SEQ(e, READ(theta)): runs e and keeps the part at theta of its result.
Program theta_recursor(const Address& theta, const Program& e);

/// One member per editor, in order; failed evaluations give members flagged
/// dead-on-arrival that carry `c` unchanged.
Population variants_of(const Code& c, std::span<const Program> editors, const EvalBudget& budget = {});

/// Simplicity order: size first, then constructor rank, then fields left to
/// right (programs recursively, addresses by length then lexicographically,
/// atoms as 0,1,-1,2,-2,... followed by tokens in alphabet order).
std::strong_ordering program_order(const Program& a, const Program& b);
std::strong_ordering atom_order(const Atom& a, const Atom& b);

std::string to_text(const Program& p);
Program parse_program(std::string_view text);

}  // namespace selfedit
