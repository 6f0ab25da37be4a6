#pragma once

// Shared generators and small oracles for the unit and acceptance suites.
// Everything here is test-only and independent of the library internals it
// is used to check.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "markovdyn/dilation.hpp"
#include "markovdyn/markov_kernel.hpp"
#include "markovdyn/rng.hpp"

namespace markovdyn::testing {

// Row-wise flat Dirichlet kernel: each row is uniform on the simplex
// (normalized unit exponentials).
inline MarkovKernel random_kernel(int n, rng::RandomStream& stream) {
  const StateSpace space = StateSpace::indexed(n);
  std::vector<double> entries(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      double u = stream.uniform();
      if (u <= 0.0) u = 0x1.0p-53;
      const double e = -std::log(u);
      entries[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
              static_cast<std::size_t>(j)] = e;
      sum += e;
    }
    for (int j = 0; j < n; ++j) {
      entries[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
              static_cast<std::size_t>(j)] /= sum;
    }
  }
  return MarkovKernel(space, std::move(entries));
}

inline std::vector<int> random_point_map(int n, rng::RandomStream& stream) {
  std::vector<int> map(static_cast<std::size_t>(n));
  for (auto& v : map) v = static_cast<int>(stream.uniform() * n) % n;
  return map;
}

inline MarkovKernel random_deterministic_kernel(int n, rng::RandomStream& stream) {
  return MarkovKernel::from_point_map(StateSpace::indexed(n), random_point_map(n, stream));
}

inline MarkovKernel random_permutation_kernel(int n, rng::RandomStream& stream) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(stream.uniform() * (i + 1)) % (i + 1);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return MarkovKernel::from_point_map(StateSpace::indexed(n), perm);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const MarkovKernel& a, const MarkovKernel& b) {
  return max_abs_diff(a.entries(), b.entries());
}

// The anticlockwise rotation on {1,2}x{1,2} with mu = (1/4, 3/4), as a
// product system (0-based): T(0,0)=(1,0), T(1,0)=(1,1), T(1,1)=(0,1),
// T(0,1)=(0,0).
inline ProductDynamicalSystem rotation_system() {
  const StateSpace space({"1", "2"});
  EnvironmentSpace env({"1", "2"}, {0.25, 0.75});
  // Tables are state-major: entry (x, y).
  const std::vector<int> x_map = {1, 0,   // X(0,0)=1, X(0,1)=0
                                  1, 0};  // X(1,0)=1, X(1,1)=0
  const std::vector<int> y_map = {0, 0,   // Y(0,0)=0, Y(0,1)=0
                                  1, 1};  // Y(1,0)=1, Y(1,1)=1
  return ProductDynamicalSystem(space, env, x_map, y_map);
}

// The kernel the rotation reduces to.
inline MarkovKernel rotation_kernel() {
  return MarkovKernel::from_rows(StateSpace({"1", "2"}), {{0.75, 0.25}, {0.75, 0.25}});
}

inline MarkovKernel swap_kernel() {
  return MarkovKernel::from_rows(StateSpace({"1", "2"}), {{0.0, 1.0}, {1.0, 0.0}});
}

}  // namespace markovdyn::testing
