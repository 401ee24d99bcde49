#include <random>
#include <set>

#include "doctest.h"
#include "oracle.hpp"
#include "selfedit/generator.hpp"
#include "selfedit/minilang.hpp"

using namespace selfedit;

namespace {

Program P(const char* text) { return parse_program(text); }
Code C(const char* text) { return parse_code(text); }

ErrorKind eval_error(const Program& p, const Code& x, EvalBudget b = {}) {
  EvalOutcome o = try_eval(p, x, b);
  REQUIRE_FALSE(o.ok());
  return o.error;
}

Code random_input(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  if (depth == 0 || pick(rng) < 3) {
    if (pick(rng) < 7) return Code::integer(std::uniform_int_distribution<int>(-5, 5)(rng));
    return Code::token(static_cast<Tok>(rng() % kTokCount));
  }
  std::vector<Code> kids;
  int n = std::uniform_int_distribution<int>(0, 4)(rng);
  for (int i = 0; i < n; ++i) kids.push_back(random_input(rng, depth - 1));
  return Code::node(kids);
}

}  // namespace

TEST_CASE("eval examples") {
  CHECK(eval(P("ADD(1)"), Code::integer(3)) == Code::integer(4));
  Code c = C("[1,[2,TRUE]]");
  CHECK(eval(prog::id(), c) == c);
  CHECK(eval(P("SEQ(ADD(1),ADD(1))"), Code::integer(0)) == Code::integer(2));
  CHECK(eval(P("K(LP)"), c) == Code::token(Tok::LP));
  CHECK(eval(P("READ([2,1])"), c) == Code::integer(2));
  CHECK(eval(P("PUT([1],K(9))"), c) == C("[9,[2,TRUE]]"));
  CHECK(eval(P("APPEND([2],K(3))"), c) == C("[1,[2,TRUE,3]]"));
  CHECK(eval(P("PAIR(ADD(1),ADD(2))"), Code::integer(0)) == C("[1,2]"));
  CHECK(eval(P("IFEQ([2,2],TRUE,K(1),K(0))"), c) == Code::integer(1));
  CHECK(eval(P("IFEQ([2,2],FALSE,K(1),K(0))"), c) == Code::integer(0));
  // an invalid condition address counts as false
  CHECK(eval(P("IFEQ([4],TRUE,K(1),K(0))"), c) == Code::integer(0));

  CHECK(eval_error(P("ADD(1)"), c) == ErrorKind::TypeError);
  CHECK(eval_error(P("READ([3])"), c) == ErrorKind::AddressInvalid);
  CHECK(eval_error(P("APPLYAT([],[1])"), c) == ErrorKind::DecodeError);
  CHECK(eval_error(P("SEQ(ADD(1),ADD(1))"), Code::integer(0), EvalBudget{2, kMaxNodes}) == ErrorKind::BudgetExceeded);
}

TEST_CASE("APPLYAT runs the fetched program in two steps") {
  Code input = Code::node({Code::integer(3), prog::add(5).code()});
  EvalOutcome o = try_eval(P("APPLYAT([],[2])"), input, EvalBudget{2, kMaxNodes});
  CHECK_FALSE(o.ok());
  CHECK(o.error == ErrorKind::TypeError);
  CHECK(o.steps == 2);
  EvalOutcome ok = try_eval(P("APPLYAT([1],[2])"), input);
  REQUIRE(ok.ok());
  CHECK(*ok.value == Code::integer(8));
  // self-application never terminates and is stopped by the budget
  Code loop = Code::node({Code::integer(0), P("APPLYAT([],[2])").code()});
  CHECK(eval_error(P("APPLYAT([],[2])"), loop) == ErrorKind::BudgetExceeded);
}

TEST_CASE("result size limit") {
  Program grow = P("PAIR(ID,ID)");
  Code x = Code::integer(0);
  for (int i = 0; i < 5; ++i) x = eval(grow, x);
  CHECK(eval_error(grow, x, EvalBudget{1000, 40}) == ErrorKind::SizeExceeded);
}

TEST_CASE("decode") {
  CHECK(decode(C("[ID]")).op() == Op::Id);
  auto err = [](const Code& c) {
    try {
      decode(c);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ConfigError;
  };
  CHECK(err(Code::integer(1)) == ErrorKind::DecodeError);
  CHECK(err(C("[ADD,TRUE]")) == ErrorKind::DecodeError);
  CHECK(err(C("[READ,[0]]")) == ErrorKind::DecodeError);
  CHECK(err(C("[K,[1]]")) == ErrorKind::DecodeError);
  CHECK_FALSE(try_decode(C("[SEQ,[ID]]")).has_value());
}

TEST_CASE("theta recursor") {
  Program r = theta_recursor(Address{1}, prog::id());
  CHECK(r == P("SEQ(ID,READ([1]))"));
  CHECK(eval(r, C("[7,8]")) == Code::integer(7));
  CHECK(eval(theta_recursor(Address{2}, P("PAIR(ADD(1),ADD(2))")), Code::integer(0)) == Code::integer(2));
  Program e = P("PAIR(ADD(1),ID)");
  CHECK(eval(theta_recursor(Address{}, e), Code::integer(4)) == eval(e, Code::integer(4)));
}

TEST_CASE("theta recursor law on random programs") {
  auto progs = take(Generator{}, 3000);
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const Program& e = progs[rng() % progs.size()];
    Code x = random_input(rng, 3);
    Address theta = rng() % 3 == 0 ? Address{} : Address{1 + rng() % 2};
    EvalOutcome inner = try_eval(e, x);
    if (!inner.ok() || !find_at(*inner.value, theta)) continue;
    ++checked;
    EvalOutcome lhs = try_eval(theta_recursor(theta, e), x);
    REQUIRE(lhs.ok());
    CHECK(*lhs.value == read_at(*inner.value, theta));
  }
  CHECK(checked > 100);
}

TEST_CASE("totality and purity") {
  auto progs = take(Generator{}, 20000);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 5000; ++i) {
    const Program& p = progs[rng() % progs.size()];
    Code x = random_input(rng, 4);
    const std::string before = to_text(x);
    EvalOutcome o = try_eval(p, x, EvalBudget{50, kMaxNodes});
    CHECK(o.steps <= 51);
    CHECK(to_text(x) == before);
    if (o.ok()) CHECK(o.value->size() <= kMaxNodes);
  }
}

TEST_CASE("program order") {
  CHECK(program_order(prog::id(), prog::add(1)) < 0);
  CHECK(program_order(prog::add(0), prog::add(1)) < 0);
  CHECK(program_order(prog::add(1), prog::add(-1)) < 0);
  CHECK(program_order(P("READ([2])"), P("READ([1,1])")) < 0);
  CHECK(program_order(P("READ([2])"), P("READ([1])")) > 0);
  CHECK(program_order(P("K(5)"), P("K(TRUE)")) < 0);
  CHECK(program_order(P("K(TRUE)"), P("K(FALSE)")) < 0);
  CHECK(program_order(P("ADD(2)"), P("ADD(2)")) == 0);
}

TEST_CASE("pretty print round trip") {
  Generator g;
  for (int i = 0; i < 5000; ++i) {
    Program p = *g.advance();
    CHECK(parse_program(to_text(p)) == p);
  }
  CHECK(to_text(P("IFEQ([5,1,2],TRUE,SEQ(READ([1]),ADD(2)),READ([1]))")) ==
        "IFEQ([5,1,2],TRUE,SEQ(READ([1]),ADD(2)),READ([1]))");
  CHECK(to_text(P("APPLYAT([],[2])")) == "APPLYAT([],[2])");
  CHECK_THROWS_AS(parse_program("ADD(TRUE)"), Error);
  CHECK_THROWS_AS(parse_program("SEQ(ID)"), Error);
  CHECK_THROWS_AS(parse_program("ID extra"), Error);
}

TEST_CASE("generator basics") {
  auto [first, rest] = Generator{}.next();
  CHECK(first == prog::id());
  Generator pg = Generator{}.promote(prog::add(7));
  CHECK(pg.next().first == prog::add(7));
  CHECK(take(Generator{}, 50) == take(Generator{}, 50));
}

TEST_CASE("promote") {
  Program q = P("IFEQ([3],TRUE,ADD(2),ID)");
  Generator g = Generator{}.promote(q);
  auto firsts = take(g, 400);
  CHECK(firsts.front() == q);
  CHECK(take(g.promote(q), 400) == firsts);

  // canonical order is otherwise unchanged and q is not yielded again
  Program a = P("ADD(1)");
  auto canon = take(Generator{}, 399);
  std::vector<Program> rest(firsts.begin() + 1, firsts.end());
  CHECK(rest == canon);
  CHECK(std::count(firsts.begin(), firsts.end(), q) == 1);

  Generator h = Generator{}.promote(a);
  auto hs = take(h, 100);
  CHECK(hs[0] == a);
  CHECK(std::count(hs.begin(), hs.end(), a) == 1);
  auto plain = take(Generator{}, 100);
  auto it = std::find(plain.begin(), plain.end(), a);
  std::vector<Program> without(plain.begin(), plain.end());
  without.erase(without.begin() + (it - plain.begin()));
  CHECK(std::equal(without.begin(), without.begin() + 98, hs.begin() + 1));
}

TEST_CASE("exhaustion") {
  auto cat = std::make_shared<ProgramCatalog>(EnumerationBounds{1, 3});
  Generator g(cat);
  std::size_t n = 0;
  while (g.advance()) ++n;
  CHECK(n == cat->of_size(2).size() + cat->of_size(3).size());
  CHECK_THROWS_AS(g.next(), Error);
}

TEST_CASE("enumeration matches the brute-force oracle") {
  auto expected = oracle::all_programs(6);
  REQUIRE(expected.size() == 370);
  auto got = take(Generator{}, expected.size());
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK_MESSAGE(got[i].code() == expected[i], i);

  std::size_t counts[] = {1, 38, 6, 37, 288};
  std::size_t pos = 0;
  for (std::size_t s = 2; s <= 6; ++s) {
    CHECK(ProgramCatalog::shared_default()->of_size(s).size() == counts[s - 2]);
    pos += counts[s - 2];
  }
  CHECK(pos == 370);
}

TEST_CASE("enumeration completeness against unpruned generate-and-filter") {
  // Every tree of size <= 5 over the bounded leaves, kept iff it decodes.
  std::vector<Code> leaves;
  for (int v = -5; v <= 5; ++v) leaves.push_back(Code::integer(v));
  for (std::size_t t = 0; t < kTokCount; ++t) leaves.push_back(Code::token(static_cast<Tok>(t)));
  std::vector<std::vector<Code>> by_size(6);
  by_size[1] = leaves;
  by_size[1].push_back(Code::node({}));
  std::set<std::string> valid;
  for (std::size_t s = 2; s <= 5; ++s) {
    std::vector<Code> cur;
    auto rec = [&](auto&& self, std::size_t left) -> void {
      if (left == 0) {
        Code c = Code::node(cur);
        by_size[s].push_back(c);
        return;
      }
      for (std::size_t k = 1; k <= left; ++k)
        for (const Code& c : by_size[k]) {
          cur.push_back(c);
          self(self, left - k);
          cur.pop_back();
        }
    };
    rec(rec, s - 1);
  }
  for (std::size_t s = 2; s <= 5; ++s)
    for (const Code& c : by_size[s]) {
      bool in_bounds = true;
      auto check = [&](auto&& self, const Code& x) -> void {
        if (x.is_leaf()) return;
        if (oracle::is_addr(x) && !oracle::head(x))
          for (const Code& e : x.children()) in_bounds = in_bounds && e.atom().as_int() <= 5;
        for (const Code& k : x.children()) self(self, k);
      };
      check(check, c);
      if (in_bounds && try_decode(c)) valid.insert(to_text(c));
    }
  auto got = take(Generator{}, 82);
  std::set<std::string> yielded;
  for (const Program& p : got) yielded.insert(to_text(p.code()));
  CHECK(yielded.size() == 82);
  CHECK(valid == yielded);
}

TEST_CASE("enumeration uniqueness") {
  std::set<std::string> seen;
  Generator g;
  for (int i = 0; i < 10000; ++i) CHECK(seen.insert(to_text(*g.advance())).second);
}

TEST_CASE("variants_of") {
  Code c = C("[1,2]");
  std::vector<Program> id{prog::id()};
  Population v = variants_of(c, id);
  REQUIRE(v.size() == 1);
  CHECK(v.members()[0].code == c);
  std::vector<Program> adds{P("ADD(1)"), P("ADD(2)")};
  Population w = variants_of(Code::integer(3), adds);
  REQUIRE(w.size() == 2);
  CHECK(w.members()[0].code == Code::integer(4));
  CHECK(w.members()[1].code == Code::integer(5));
  std::vector<Program> bad{P("READ([1])")};
  Population d = variants_of(Code::integer(3), bad);
  REQUIRE(d.size() == 1);
  CHECK(d.members()[0].dead_on_arrival);
}
