#include "markovdyn/state_space.hpp"

#include <stdexcept>
#include <unordered_set>

namespace markovdyn {

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) {
    throw std::invalid_argument("state space must contain at least one state");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) {
      throw std::invalid_argument("state space labels must be distinct: duplicate \"" + l + "\"");
    }
  }
}

StateSpace StateSpace::indexed(int n) {
  if (n < 1) throw std::invalid_argument("state space size must be >= 1");
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
  return StateSpace(std::move(labels));
}

int StateSpace::index_of(std::string_view label) const noexcept {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace markovdyn
