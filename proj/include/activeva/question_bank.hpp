#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace activeva {

/// Recorded answer to one question. `missing` covers both absent training
/// cells and "don't know" during an interview; it never enters a likelihood.
enum class Response : std::int8_t { no = 0, yes = 1, missing = -1 };

struct Question {
  std::string id;
  std::optional<std::string> group;
  /// Index of the root question that gates this one.
  std::optional<Eigen::Index> parent;
  /// Parent answer (0 or 1) that unlocks this question; absent = any answer.
  std::optional<int> trigger;
  std::optional<std::string> text;
};

/// Ordered question bank with root/sub-question gating metadata.
class QuestionBank {
 public:
  QuestionBank() = default;

  /// Validates unique ids, parent ranges, trigger values and acyclicity.
  explicit QuestionBank(std::vector<Question> questions);

  /// J root questions named q1..qJ with no groups.
  static QuestionBank all_roots(Eigen::Index num_questions);

  Eigen::Index size() const { return static_cast<Eigen::Index>(questions_.size()); }
  const Question& operator[](Eigen::Index j) const { return questions_[static_cast<std::size_t>(j)]; }
  const std::vector<Question>& questions() const { return questions_; }

  std::optional<Eigen::Index> index_of(const std::string& id) const;
  bool is_root(Eigen::Index j) const { return !(*this)[j].parent.has_value(); }

  /// Sub-questions gated directly by `j`, in index order.
  const std::vector<Eigen::Index>& children(Eigen::Index j) const {
    return children_[static_cast<std::size_t>(j)];
  }

  /// Whether an answer `value` to the parent unlocks sub-question `child`.
  bool unlocks(Eigen::Index child, Response value) const;

 private:
  std::vector<Question> questions_;
  std::vector<std::vector<Eigen::Index>> children_;
  std::unordered_map<std::string, Eigen::Index> by_id_;
};

}  // namespace activeva
