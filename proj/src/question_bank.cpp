#include "activeva/question_bank.hpp"

#include "activeva/error.hpp"

namespace activeva {

QuestionBank::QuestionBank(std::vector<Question> questions) : questions_(std::move(questions)) {
  const auto n = size();
  children_.assign(questions_.size(), {});
  for (Eigen::Index j = 0; j < n; ++j) {
    const Question& q = (*this)[j];
    if (q.id.empty()) throw InvalidArgument("question " + std::to_string(j) + " has an empty id");
    if (!by_id_.emplace(q.id, j).second) throw InvalidArgument("duplicate question id '" + q.id + "'");
    if (q.parent) {
      if (*q.parent < 0 || *q.parent >= n || *q.parent == j) {
        throw InvalidArgument("question '" + q.id + "' has an invalid parent index");
      }
      children_[static_cast<std::size_t>(*q.parent)].push_back(j);
    }
    if (q.trigger && *q.trigger != 0 && *q.trigger != 1) {
      throw InvalidArgument("question '" + q.id + "' trigger must be 0 or 1");
    }
  }
  // a parent chain longer than J means a cycle
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index steps = 0;
    auto cur = (*this)[j].parent;
    while (cur) {
      if (++steps > n) throw InvalidArgument("cyclic parent references at question '" + (*this)[j].id + "'");
      cur = (*this)[*cur].parent;
    }
  }
}

QuestionBank QuestionBank::all_roots(Eigen::Index num_questions) {
  std::vector<Question> qs(static_cast<std::size_t>(num_questions));
  for (Eigen::Index j = 0; j < num_questions; ++j) qs[static_cast<std::size_t>(j)].id = "q" + std::to_string(j + 1);
  return QuestionBank(std::move(qs));
}

std::optional<Eigen::Index> QuestionBank::index_of(const std::string& id) const {
  if (auto it = by_id_.find(id); it != by_id_.end()) return it->second;
  return std::nullopt;
}

bool QuestionBank::unlocks(Eigen::Index child, Response value) const {
  const auto& trig = (*this)[child].trigger;
  if (!trig) return true;
  return value != Response::missing && static_cast<int>(value) == *trig;
}

}  // namespace activeva
