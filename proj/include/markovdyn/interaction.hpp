#pragma once

#include <cstdint>
#include <vector>

#include "markovdyn/dilation.hpp"
#include "markovdyn/markov_kernel.hpp"

namespace markovdyn {

inline constexpr std::size_t kDefaultTupleCap = 10'000'000;

// Repeated-interaction chain: the system E meets a fresh copy of the base
// environment at every step, the used copy is shifted away. Only the first
// `horizon` copies are ever touched, so nothing beyond that is materialized.
class InteractionChain {
public:
  InteractionChain(ProductDynamicalSystem base, int horizon);

  const ProductDynamicalSystem& base() const noexcept { return base_; }
  int horizon() const noexcept { return horizon_; }

private:
  ProductDynamicalSystem base_;
  int horizon_;
};

// Chain whose one-step environment average is exactly k.
InteractionChain chain_of(const MarkovKernel& k, int horizon,
                          std::size_t env_cap = kDefaultEnvCap);

struct Trajectory {
  std::vector<int> states;     // x_0 .. x_n
  std::vector<int> env_draws;  // y_1 .. y_n (environment point indices)
};

// Exact distribution of the E-component after n steps, by full enumeration of
// the |F|^n environment tuples. Requires 1 <= n <= horizon and |F|^n within
// tuple_cap; beyond the cap use reduce_n_monte_carlo.
FiniteMeasure reduce_n_exact(const InteractionChain& chain, int x, int n,
                             std::size_t tuple_cap = kDefaultTupleCap);

struct MonteCarloDistribution {
  FiniteMeasure distribution;
  std::vector<double> std_error;  // sqrt(p(1-p)/samples) per state
  std::uint64_t samples = 0;
};

// Empirical distribution of x_n over independent environment draws.
// Reproducible for a fixed seed, independent of the thread count.
MonteCarloDistribution reduce_n_monte_carlo(const InteractionChain& chain, int x, int n,
                                            std::uint64_t samples, std::uint64_t seed,
                                            int threads = 1);

// One sampled path x_0..x_n with its environment draws, n <= horizon.
Trajectory sample_trajectory(const InteractionChain& chain, int x, int n, std::uint64_t seed);

}  // namespace markovdyn
