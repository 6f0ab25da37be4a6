#pragma once

#include <optional>
#include <span>
#include <vector>

#include "markovdyn/state_space.hpp"

namespace markovdyn {

// Real-valued bounded function on a finite state space.
class Observable {
public:
  Observable(StateSpace space, std::vector<double> values);

  const StateSpace& space() const noexcept { return space_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](int i) const { return values_.at(static_cast<std::size_t>(i)); }
  int size() const noexcept { return space_.size(); }

  static Observable ones(StateSpace space);

private:
  StateSpace space_;
  std::vector<double> values_;
};

// Probability vector over a finite state space.
class FiniteMeasure {
public:
  FiniteMeasure(StateSpace space, std::vector<double> weights, double tol = kStochasticTol);

  static FiniteMeasure dirac(StateSpace space, int x);
  static FiniteMeasure uniform(StateSpace space);

  const StateSpace& space() const noexcept { return space_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double operator[](int i) const { return weights_.at(static_cast<std::size_t>(i)); }
  int size() const noexcept { return space_.size(); }

private:
  StateSpace space_;
  std::vector<double> weights_;
};

// Markov kernel on a finite state space, stored as a row-stochastic matrix:
// entry (i,j) is the probability of jumping from state i to state j.
// Also plays the role of the Markov operator L acting on observables and,
// dually, on measures.
class MarkovKernel {
public:
  // row_major has size n*n; each entry must lie in [0,1] and each row must
  // sum to 1, both within tol.
  MarkovKernel(StateSpace space, std::vector<double> row_major, double tol = kStochasticTol);

  static MarkovKernel identity(StateSpace space);
  static MarkovKernel from_rows(StateSpace space, const std::vector<std::vector<double>>& rows,
                                double tol = kStochasticTol);
  // Deterministic kernel with row i a Dirac mass at image[i].
  static MarkovKernel from_point_map(StateSpace space, const std::vector<int>& image);

  const StateSpace& space() const noexcept { return space_; }
  int size() const noexcept { return space_.size(); }
  double operator()(int i, int j) const {
    return entries_[static_cast<std::size_t>(i) * static_cast<std::size_t>(size()) +
                    static_cast<std::size_t>(j)];
  }
  std::span<const double> row(int i) const;
  std::span<const double> entries() const noexcept { return entries_; }

private:
  StateSpace space_;
  std::vector<double> entries_;
};

// (Lf)(i) = sum_j P(i,j) f(j).
Observable apply_to_observable(const MarkovKernel& k, const Observable& f);

// (pL)(j) = sum_i p(i) P(i,j).
FiniteMeasure apply_to_measure(const MarkovKernel& k, const FiniteMeasure& p);

// One step of `first` followed by one step of `then`: the matrix product.
MarkovKernel compose(const MarkovKernel& first, const MarkovKernel& then);

// m-fold composition; power(k, 0) is the identity kernel.
MarkovKernel power(const MarkovKernel& k, int m);

struct PointMapResult {
  bool deterministic = false;
  // Per-state image; present exactly when deterministic.
  std::optional<std::vector<int>> map;
};

// A kernel is deterministic when every row is a Dirac mass; detected as one
// entry per row within tol of 1.
PointMapResult is_deterministic(const MarkovKernel& k, double tol = 1e-9);

}  // namespace markovdyn
