#include "selfedit/minilang.hpp"

#include <cctype>
#include <charconv>
#include <vector>

namespace selfedit {

namespace {

std::optional<Op> op_of_tok(Tok t) {
  switch (t) {
    case Tok::Id: return Op::Id;
    case Tok::K: return Op::K;
    case Tok::Add: return Op::Add;
    case Tok::Read: return Op::Read;
    case Tok::Put: return Op::Put;
    case Tok::Append: return Op::Append;
    case Tok::Seq: return Op::Seq;
    case Tok::Pair: return Op::Pair;
    case Tok::IfEq: return Op::IfEq;
    case Tok::ApplyAt: return Op::ApplyAt;
    default: return std::nullopt;
  }
}

Tok tok_of_op(Op op) {
  constexpr Tok table[] = {Tok::Id,    Tok::K,   Tok::Add,  Tok::Read, Tok::Put,
                           Tok::Append, Tok::Seq, Tok::Pair, Tok::IfEq, Tok::ApplyAt};
  return table[static_cast<std::size_t>(op)];
}

constexpr std::size_t arity_of(Op op) {
  switch (op) {
    case Op::Id: return 1;
    case Op::K:
    case Op::Add:
    case Op::Read: return 2;
    case Op::Put:
    case Op::Append:
    case Op::Seq:
    case Op::Pair:
    case Op::ApplyAt: return 3;
    case Op::IfEq: return 5;
  }
  return 0;
}

// Grammar check; returns the failing address (relative to the root) on error.
std::optional<Address> check(const Code& c, const Address& at) {
  if (c.is_leaf() || c.arity() == 0 || !c.child(0).is_leaf() || !c.child(0).atom().is_tok())
    return at;
  auto op = op_of_tok(c.child(0).atom().as_tok());
  if (!op || c.arity() != arity_of(*op)) return at;
  auto is_addr = [](const Code& a) {
    if (a.is_leaf()) return false;
    for (const Code& e : a.children())
      if (!e.is_int() || e.atom().as_int() < 1) return false;
    return true;
  };
  auto sub = [&](std::size_t i) { return check(c.child(i), at.child(i + 1)); };
  switch (*op) {
    case Op::Id: return std::nullopt;
    case Op::K:
      if (!c.child(1).is_leaf()) return at.child(2);
      return std::nullopt;
    case Op::Add:
      if (!c.child(1).is_int()) return at.child(2);
      return std::nullopt;
    case Op::Read:
      if (!is_addr(c.child(1))) return at.child(2);
      return std::nullopt;
    case Op::Put:
    case Op::Append:
      if (!is_addr(c.child(1))) return at.child(2);
      return sub(2);
    case Op::Seq:
    case Op::Pair:
      if (auto bad = sub(1)) return bad;
      return sub(2);
    case Op::IfEq:
      if (!is_addr(c.child(1))) return at.child(2);
      if (!c.child(2).is_leaf()) return at.child(3);
      if (auto bad = sub(3)) return bad;
      return sub(4);
    case Op::ApplyAt:
      if (!is_addr(c.child(1))) return at.child(2);
      if (!is_addr(c.child(2))) return at.child(3);
      return std::nullopt;
  }
  return at;
}

Code head(Op op) { return Code::token(tok_of_op(op)); }

// Evaluator. Errors are recorded in the outcome instead of thrown so that
// enumeration-heavy callers do not pay for exceptions.
class Evaluator {
 public:
  Evaluator(const EvalBudget& budget, EvalOutcome& out) : budget_(budget), out_(out) {}

  std::optional<Code> run(const Code& p, const Code& input) {
    if (++out_.steps > budget_.max_steps) return fail(ErrorKind::BudgetExceeded, "step budget");
    Op op = *op_of_tok(p.child(0).atom().as_tok());
    switch (op) {
      case Op::Id: return input;
      case Op::K: return p.child(1);
      case Op::Add: {
        if (!input.is_int()) return fail(ErrorKind::TypeError, "ADD needs an integer leaf");
        std::int64_t a = input.atom().as_int();
        std::int64_t b = p.child(1).atom().as_int();
        if (b > 0 ? a >= kIntLimit - b : a <= -kIntLimit - b)
          return fail(ErrorKind::SizeExceeded, "integer overflow");
        return Code::integer(a + b);
      }
      case Op::Read: {
        const Code* found = find_at(input, Address::from_code(p.child(1)));
        if (!found) return fail(ErrorKind::AddressInvalid, "READ " + to_text(p.child(1)));
        return *found;
      }
      case Op::Put: {
        auto v = run(p.child(2), input);
        if (!v) return std::nullopt;
        Address a = Address::from_code(p.child(1));
        const Code* old = find_at(input, a);
        if (!old) return fail(ErrorKind::AddressInvalid, "PUT " + to_text(p.child(1)));
        if (input.size() - old->size() + v->size() > budget_.max_result_nodes)
          return fail(ErrorKind::SizeExceeded, "PUT result too large");
        return guarded([&] { return replace_at(input, a, *v); });
      }
      case Op::Append: {
        auto v = run(p.child(2), input);
        if (!v) return std::nullopt;
        Address a = Address::from_code(p.child(1));
        const Code* target = find_at(input, a);
        if (!target) return fail(ErrorKind::AddressInvalid, "APPEND " + to_text(p.child(1)));
        if (target->is_leaf()) return fail(ErrorKind::NotANode, "APPEND onto a leaf");
        if (input.size() + v->size() > budget_.max_result_nodes)
          return fail(ErrorKind::SizeExceeded, "APPEND result too large");
        return guarded([&] { return append_at(input, a, *v).code; });
      }
      case Op::Seq: {
        auto mid = run(p.child(1), input);
        if (!mid) return std::nullopt;
        return run(p.child(2), *mid);
      }
      case Op::Pair: {
        auto l = run(p.child(1), input);
        if (!l) return std::nullopt;
        auto r = run(p.child(2), input);
        if (!r) return std::nullopt;
        if (1 + l->size() + r->size() > budget_.max_result_nodes)
          return fail(ErrorKind::SizeExceeded, "PAIR result too large");
        return guarded([&] { return Code::node({*l, *r}); });
      }
      case Op::IfEq: {
        const Code* probe = find_at(input, Address::from_code(p.child(1)));
        bool hit = probe && probe->is_leaf() && probe->atom() == p.child(2).atom();
        return run(p.child(hit ? 3 : 4), input);
      }
      case Op::ApplyAt: {
        const Code* src = find_at(input, Address::from_code(p.child(1)));
        if (!src) return fail(ErrorKind::AddressInvalid, "APPLYAT source " + to_text(p.child(1)));
        const Code* fetched = find_at(input, Address::from_code(p.child(2)));
        if (!fetched) return fail(ErrorKind::AddressInvalid, "APPLYAT program " + to_text(p.child(2)));
        if (check(*fetched, Address{}) || fetched->size() > kMaxProgramSize)
          return fail(ErrorKind::DecodeError, "APPLYAT fetched a non-program");
        Code callee = *fetched;
        Code arg = *src;
        return run(callee, arg);
      }
    }
    return fail(ErrorKind::DecodeError, "unknown constructor");
  }

 private:
  std::optional<Code> fail(ErrorKind kind, std::string detail) {
    out_.error = kind;
    out_.detail = std::move(detail);
    return std::nullopt;
  }

  template <class F>
  std::optional<Code> guarded(F&& build) {
    try {
      return build();
    } catch (const Error& e) {
      return fail(e.kind(), e.what());
    }
  }

  const EvalBudget& budget_;
  EvalOutcome& out_;
};

std::strong_ordering address_order(const Address& a, const Address& b) {
  if (a.length() != b.length()) return a.length() <=> b.length();
  return a.path() <=> b.path();
}

std::uint64_t int_rank(std::int64_t v) {
  return v > 0 ? 2 * static_cast<std::uint64_t>(v) - 1 : 2 * static_cast<std::uint64_t>(-v);
}

std::strong_ordering code_program_order(const Code& a, const Code& b);

std::strong_ordering field_order(const Code& a, const Code& b, Op op, std::size_t i) {
  switch (op) {
    case Op::K:
    case Op::Add: return atom_order(a.atom(), b.atom());
    case Op::Read: return address_order(Address::from_code(a), Address::from_code(b));
    case Op::Put:
    case Op::Append:
      return i == 1 ? address_order(Address::from_code(a), Address::from_code(b))
                    : code_program_order(a, b);
    case Op::IfEq:
      if (i == 1) return address_order(Address::from_code(a), Address::from_code(b));
      if (i == 2) return atom_order(a.atom(), b.atom());
      return code_program_order(a, b);
    case Op::ApplyAt: return address_order(Address::from_code(a), Address::from_code(b));
    case Op::Seq:
    case Op::Pair: return code_program_order(a, b);
    case Op::Id: break;
  }
  return std::strong_ordering::equal;
}

std::strong_ordering code_program_order(const Code& a, const Code& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  Op oa = *op_of_tok(a.child(0).atom().as_tok());
  Op ob = *op_of_tok(b.child(0).atom().as_tok());
  if (auto c = oa <=> ob; c != 0) return c;
  for (std::size_t i = 1; i < a.arity(); ++i)
    if (auto c = field_order(a.child(i), b.child(i), oa, i); c != 0) return c;
  return std::strong_ordering::equal;
}

void print(const Code& p, std::string& out) {
  Op op = *op_of_tok(p.child(0).atom().as_tok());
  out += tok_name(tok_of_op(op));
  if (op == Op::Id) return;
  out += '(';
  for (std::size_t i = 1; i < p.arity(); ++i) {
    if (i > 1) out += ',';
    const Code& f = p.child(i);
    bool is_prog = (op == Op::Put || op == Op::Append) ? i == 2
                   : (op == Op::Seq || op == Op::Pair) ? true
                   : op == Op::IfEq                    ? i >= 3
                                                       : false;
    if (is_prog)
      print(f, out);
    else
      out += to_text(f);
  }
  out += ')';
}

class ProgramParser {
 public:
  explicit ProgramParser(std::string_view text) : text_(text) {}

  Program parse_all() {
    Program p = parse();
    if (pos_ != text_.size()) fail("trailing characters");
    return p;
  }

 private:
  Program parse() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isupper(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    auto tok = tok_from_name(text_.substr(start, pos_ - start));
    if (!tok) fail("unknown constructor");
    auto op = op_of_tok(*tok);
    if (!op) fail("not a constructor");
    if (*op == Op::Id) return prog::id();
    expect('(');
    Program result = [&] {
      switch (*op) {
        case Op::K: return prog::constant(atom());
        case Op::Add: {
          Atom a = atom();
          if (!a.is_int()) fail("ADD needs an integer");
          return prog::add(a.as_int());
        }
        case Op::Read: return prog::read(address());
        case Op::Put: {
          Address a = address();
          expect(',');
          return prog::put(a, parse());
        }
        case Op::Append: {
          Address a = address();
          expect(',');
          return prog::append(a, parse());
        }
        case Op::Seq:
        case Op::Pair: {
          Program l = parse();
          expect(',');
          Program r = parse();
          return *op == Op::Seq ? prog::seq(l, r) : prog::pair(l, r);
        }
        case Op::IfEq: {
          Address a = address();
          expect(',');
          Atom v = atom();
          expect(',');
          Program t = parse();
          expect(',');
          Program e = parse();
          return prog::if_eq(a, v, t, e);
        }
        case Op::ApplyAt: {
          Address s = address();
          expect(',');
          return prog::apply_at(s, address());
        }
        case Op::Id: break;
      }
      fail("unreachable");
    }();
    expect(')');
    return result;
  }

  // A balanced code literal up to the next top-level ',' or ')'.
  std::string_view code_span() {
    std::size_t start = pos_;
    int depth = 0;
    while (pos_ < text_.size()) {
      char ch = text_[pos_];
      if (ch == '[') ++depth;
      if (ch == ']') --depth;
      if (depth == 0 && (ch == ',' || ch == ')')) break;
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  Atom atom() {
    Code c = parse_code(code_span());
    if (!c.is_leaf()) fail("expected an atom");
    return c.atom();
  }

  Address address() { return parse_address(code_span()); }

  void expect(char ch) {
    if (pos_ >= text_.size() || text_[pos_] != ch) fail(std::string("expected '") + ch + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::ParseError,
                why + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Program unchecked_program(Code c) { return Program(std::move(c)); }

Op Program::op() const { return *op_of_tok(code_.child(0).atom().as_tok()); }

Address Program::address() const {
  switch (op()) {
    case Op::Read:
    case Op::Put:
    case Op::Append:
    case Op::IfEq:
    case Op::ApplyAt: return Address::from_code(code_.child(1));
    default: throw Error(ErrorKind::TypeError, "constructor has no address");
  }
}

Address Program::second_address() const {
  if (op() != Op::ApplyAt) throw Error(ErrorKind::TypeError, "only APPLYAT has two addresses");
  return Address::from_code(code_.child(2));
}

Atom Program::literal() const {
  switch (op()) {
    case Op::K:
    case Op::Add: return code_.child(1).atom();
    case Op::IfEq: return code_.child(2).atom();
    default: throw Error(ErrorKind::TypeError, "constructor has no literal");
  }
}

Program Program::first() const {
  switch (op()) {
    case Op::Put:
    case Op::Append: return Program(code_.child(2));
    case Op::Seq:
    case Op::Pair: return Program(code_.child(1));
    case Op::IfEq: return Program(code_.child(3));
    default: throw Error(ErrorKind::TypeError, "constructor has no sub-program");
  }
}

Program Program::second() const {
  switch (op()) {
    case Op::Seq:
    case Op::Pair: return Program(code_.child(2));
    case Op::IfEq: return Program(code_.child(4));
    default: throw Error(ErrorKind::TypeError, "constructor has no second sub-program");
  }
}

Program decode(const Code& c) {
  if (auto bad = check(c, Address{}))
    throw Error(ErrorKind::DecodeError, "not a program at " + to_text(*bad) + ": " + to_text(c));
  if (c.size() > kMaxProgramSize)
    throw Error(ErrorKind::DecodeError, "program larger than " + std::to_string(kMaxProgramSize));
  return Program(c);
}

std::optional<Program> try_decode(const Code& c) {
  if (check(c, Address{}) || c.size() > kMaxProgramSize) return std::nullopt;
  return unchecked_program(c);
}

namespace prog {
Program id() { return decode(Code::node({head(Op::Id)})); }
Program constant(const Atom& v) { return decode(Code::node({head(Op::K), Code::leaf(v)})); }
Program add(std::int64_t k) { return decode(Code::node({head(Op::Add), Code::integer(k)})); }
Program read(const Address& a) { return decode(Code::node({head(Op::Read), a.to_code()})); }
Program put(const Address& a, const Program& body) {
  return decode(Code::node({head(Op::Put), a.to_code(), body.code()}));
}
Program append(const Address& a, const Program& body) {
  return decode(Code::node({head(Op::Append), a.to_code(), body.code()}));
}
Program seq(const Program& first, const Program& then) {
  return decode(Code::node({head(Op::Seq), first.code(), then.code()}));
}
Program pair(const Program& left, const Program& right) {
  return decode(Code::node({head(Op::Pair), left.code(), right.code()}));
}
Program if_eq(const Address& a, const Atom& v, const Program& then, const Program& otherwise) {
  return decode(Code::node({head(Op::IfEq), a.to_code(), Code::leaf(v), then.code(), otherwise.code()}));
}
Program apply_at(const Address& source, const Address& program) {
  return decode(Code::node({head(Op::ApplyAt), source.to_code(), program.to_code()}));
}
}  // namespace prog

EvalOutcome try_eval(const Program& p, const Code& input, const EvalBudget& budget) {
  EvalOutcome out;
  Evaluator ev(budget, out);
  out.value = ev.run(p.code(), input);
  return out;
}

Code eval(const Program& p, const Code& input, const EvalBudget& budget) {
  EvalOutcome out = try_eval(p, input, budget);
  if (!out.ok()) throw Error(out.error, out.detail);
  return *out.value;
}

Program theta_recursor(const Address& theta, const Program& e) { return prog::seq(e, prog::read(theta)); }

Population variants_of(const Code& c, std::span<const Program> editors, const EvalBudget& budget) {
  Population out;
  for (const Program& e : editors) {
    EvalOutcome v = try_eval(e, c, budget);
    out.add(v.ok() ? *v.value : c, std::nullopt, Origin::Variant, !v.ok());
  }
  return out;
}

std::strong_ordering atom_order(const Atom& a, const Atom& b) {
  if (a.is_int() != b.is_int()) return a.is_int() ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.is_int()) return int_rank(a.as_int()) <=> int_rank(b.as_int());
  return a.as_tok() <=> b.as_tok();
}

std::strong_ordering program_order(const Program& a, const Program& b) {
  return code_program_order(a.code(), b.code());
}

std::string to_text(const Program& p) {
  std::string out;
  print(p.code(), out);
  return out;
}

Program parse_program(std::string_view text) { return ProgramParser(text).parse_all(); }

}  // namespace selfedit
