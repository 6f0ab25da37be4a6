#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "markovdyn/markov_kernel.hpp"
#include "markovdyn/state_space.hpp"

namespace markovdyn {

inline constexpr std::size_t kDefaultEnvCap = 1'000'000;

// Finite environment (F, mu): weighted points, each with a distinct id.
// For dilation-built environments every point carries the underlying
// function y: E -> E as a vector of state indices.
class EnvironmentSpace {
public:
  EnvironmentSpace(std::vector<std::string> ids, std::vector<double> weights,
                   std::optional<std::vector<std::vector<int>>> functions = std::nullopt,
                   double tol = kStochasticTol);

  int size() const noexcept { return static_cast<int>(ids_.size()); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(int y) const { return weights_.at(static_cast<std::size_t>(y)); }
  const std::optional<std::vector<std::vector<int>>>& functions() const noexcept {
    return functions_;
  }

private:
  std::vector<std::string> ids_;
  std::vector<double> weights_;
  std::optional<std::vector<std::vector<int>>> functions_;
};

// Deterministic dynamical system T(x,y) = (X(x,y), Y(x,y)) on the finite
// product E x F, with the environment carrying a probability weight.
class ProductDynamicalSystem {
public:
  // x_map/y_map are row-major (state-major) tables of size |E| * |F|;
  // x_map values index E, y_map values index F.
  ProductDynamicalSystem(StateSpace system_space, EnvironmentSpace env, std::vector<int> x_map,
                         std::vector<int> y_map);

  const StateSpace& system_space() const noexcept { return system_space_; }
  const EnvironmentSpace& env() const noexcept { return env_; }
  int states() const noexcept { return system_space_.size(); }
  int env_points() const noexcept { return env_.size(); }

  int x_map(int x, int y) const {
    return x_map_[static_cast<std::size_t>(x) * static_cast<std::size_t>(env_points()) +
                  static_cast<std::size_t>(y)];
  }
  int y_map(int x, int y) const {
    return y_map_[static_cast<std::size_t>(x) * static_cast<std::size_t>(env_points()) +
                  static_cast<std::size_t>(y)];
  }
  std::pair<int, int> apply(int x, int y) const { return {x_map(x, y), y_map(x, y)}; }

  const std::vector<int>& x_table() const noexcept { return x_map_; }
  const std::vector<int>& y_table() const noexcept { return y_map_; }

private:
  StateSpace system_space_;
  EnvironmentSpace env_;
  std::vector<int> x_map_;
  std::vector<int> y_map_;
};

// Averages the environment out of a product system: the resulting kernel has
// P(i,j) = mu({y : X(i,y) = j}). Y never enters.
MarkovKernel reduce(const ProductDynamicalSystem& sys);

// Canonical dilation of a kernel: the environment is all n^n functions
// y: E -> E, weighted by mu(y) = prod_x P(x, y(x)), and T(x,y) = (y(x), y).
// Functions are enumerated in lexicographic order of (y(0),...,y(n-1)).
// Throws std::length_error when n^n exceeds env_cap.
ProductDynamicalSystem dilate(const MarkovKernel& k, std::size_t env_cap = kDefaultEnvCap);

// Invertible dilation: environment E x F with F the dilate() environment and
// measure delta_{x0} (x) mu. The map permutes E x (E x F); its reduction is
// again k. Throws std::length_error when n^(n+1) exceeds env_cap.
ProductDynamicalSystem dilate_invertible(const MarkovKernel& k, int x0,
                                         std::size_t env_cap = kDefaultEnvCap);

// m-fold composition of the product map, m >= 1, over the same spaces.
ProductDynamicalSystem iterate(const ProductDynamicalSystem& sys, int m);

}  // namespace markovdyn
