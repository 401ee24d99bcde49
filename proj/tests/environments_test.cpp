#include "doctest.h"
#include "selfedit/environments.hpp"

using namespace selfedit;

namespace {

std::string demands(const Environment& e) {
  std::string s;
  for (std::size_t t = 0; t < e.length(); ++t) s += (t ? "," : "") + to_text(e.demand(t));
  return s;
}

}  // namespace

TEST_CASE("arithmetic environment") {
  CHECK(demands(arithmetic_env(1, 1, 5)) == "1,2,3,4,5");
  CHECK(demands(arithmetic_env(1, 2, 4)) == "1,3,5,7");
  CHECK(demands(arithmetic_env(5, 0, 3)) == "5,5,5");
  CHECK_FALSE(arithmetic_env(1, 1, 3).has_condition());
  CHECK_THROWS_AS(arithmetic_env(1, 1, 3).demand(3), Error);
  CHECK_THROWS_AS(arithmetic_env(1, 1, 0), Error);
}

TEST_CASE("nested environment") {
  Environment e = nested_env(NestedScript::canonical(3));
  CHECK(demands(e) == "LP,1,2,3,RP,LP,1,3,5,RP,LP,1,4,7,RP");
  Environment four = nested_env(NestedScript::canonical(4));
  NestedScript s = NestedScript::canonical(4);
  std::size_t k4 = s.first_term_index(4);
  CHECK(to_text(four.demand(k4)) == "1");
  CHECK(to_text(four.demand(k4 + 1)) == "5");
  CHECK(to_text(four.demand(k4 + 2)) == "9");

  // balanced, never nested, RP always followed by LP
  int depth = 0;
  for (std::size_t t = 0; t < four.length(); ++t) {
    Atom a = four.demand(t);
    if (a.is_tok() && a.as_tok() == Tok::LP) CHECK(++depth == 1);
    if (a.is_tok() && a.as_tok() == Tok::RP) {
      CHECK(--depth == 0);
      if (t + 1 < four.length()) CHECK(four.demand(t + 1).as_tok() == Tok::LP);
    }
  }
  CHECK(depth == 0);

  // steps of the canonical script grow by 1
  for (std::size_t k = 1; k < s.parts.size(); ++k) CHECK(s.parts[k].step - s.parts[k - 1].step == 1);

  CHECK_THROWS_AS(nested_env(NestedScript{}), Error);
  NestedScript short_terms = NestedScript::canonical(2, 2);
  CHECK_THROWS_AS(nested_env(short_terms), Error);
}

TEST_CASE("guarded environment") {
  Environment g = guarded_env(3, 2, 9);
  CHECK(demands(g) == "0,0,0,2,2,2,4,4,4");
  REQUIRE(g.has_condition());
  for (std::size_t t = 0; t < 9; ++t) CHECK(*g.condition(t) == (t % 3 == 0));
  CHECK(demands(guarded_env(3, 0, 5)) == "0,0,0,0,0");
  CHECK_THROWS_AS(guarded_env(1, 2, 5), Error);
}

TEST_CASE("parameter environment") {
  CHECK(demands(parameter_env({{9, 1}, {8, 1}, {7, 1}})) == "9,8,7");
  CHECK(demands(parameter_env({{7, 2}, {-7, 2}, {4, 2}})) == "3,-4,2");
  CHECK_THROWS_AS(parameter_env({}), Error);
}
