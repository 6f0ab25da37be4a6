#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace markovdyn {

// Tolerance used when validating externally supplied stochastic data
// (probability entries, row sums, measure weights). Internal constructions
// are tested against 1e-12.
inline constexpr double kStochasticTol = 1e-9;

// Finite state space: an ordered list of pairwise-distinct labels.
// Immutable after construction.
class StateSpace {
public:
  explicit StateSpace(std::vector<std::string> labels);

  // Convenience space with labels "s0", "s1", ...
  static StateSpace indexed(int n);

  int size() const noexcept { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(int i) const { return labels_.at(static_cast<std::size_t>(i)); }

  // Index of a label, -1 when absent.
  int index_of(std::string_view label) const noexcept;

  friend bool operator==(const StateSpace&, const StateSpace&) = default;

private:
  std::vector<std::string> labels_;
};

}  // namespace markovdyn
