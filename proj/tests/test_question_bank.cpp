#include "activeva/error.hpp"
#include "activeva/question_bank.hpp"

#include <doctest.h>

using namespace activeva;

namespace {

Question q(std::string id, std::optional<Eigen::Index> parent = std::nullopt, std::optional<int> trigger = std::nullopt) {
  return Question{std::move(id), std::nullopt, parent, trigger, std::nullopt};
}

}  // namespace

TEST_CASE("all_roots names questions q1..qJ") {
  const auto bank = QuestionBank::all_roots(3);
  REQUIRE(bank.size() == 3);
  CHECK(bank[0].id == "q1");
  CHECK(bank[2].id == "q3");
  for (Eigen::Index j = 0; j < 3; ++j) CHECK(bank.is_root(j));
  CHECK(bank.index_of("q2") == 1);
  CHECK_FALSE(bank.index_of("q9").has_value());
}

TEST_CASE("children and triggers") {
  const QuestionBank bank({q("fever"), q("fever_days", 0, 1), q("cough"), q("cough_blood", 2, 1), q("any", 2)});
  CHECK(bank.children(0) == std::vector<Eigen::Index>{1});
  CHECK(bank.children(2) == std::vector<Eigen::Index>{3, 4});
  CHECK(bank.children(1).empty());
  CHECK(bank.unlocks(1, Response::yes));
  CHECK_FALSE(bank.unlocks(1, Response::no));
  CHECK_FALSE(bank.unlocks(1, Response::missing));
  CHECK(bank.unlocks(4, Response::no));
  CHECK(bank.unlocks(4, Response::missing));
}

TEST_CASE("bank validation") {
  CHECK_THROWS_AS(QuestionBank({q("a"), q("a")}), InvalidArgument);
  CHECK_THROWS_AS(QuestionBank({q("")}), InvalidArgument);
  CHECK_THROWS_AS(QuestionBank({q("a", 0)}), InvalidArgument);
  CHECK_THROWS_AS(QuestionBank({q("a", 5)}), InvalidArgument);
  CHECK_THROWS_AS(QuestionBank({q("a"), q("b", 0, 2)}), InvalidArgument);
  CHECK_THROWS_AS(QuestionBank({q("a", 1), q("b", 0)}), InvalidArgument);
  CHECK_THROWS_AS(QuestionBank({q("a", 2), q("b", 0), q("c", 1)}), InvalidArgument);
  CHECK_NOTHROW(QuestionBank({q("a", 1), q("b")}));
}
