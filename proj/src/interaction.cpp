#include "markovdyn/interaction.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "markovdyn/rng.hpp"

namespace markovdyn {

namespace {

void check_state(const InteractionChain& chain, int x) {
  if (x < 0 || x >= chain.base().states()) {
    throw std::invalid_argument("chain state index out of range");
  }
}

void check_steps(const InteractionChain& chain, int n, int min_n) {
  if (n < min_n) {
    throw std::invalid_argument("step count must be >= " + std::to_string(min_n));
  }
  if (n > chain.horizon()) {
    throw std::invalid_argument("step count " + std::to_string(n) + " exceeds chain horizon " +
                                std::to_string(chain.horizon()));
  }
}

// Nonnegative-term accumulation with Kahan compensation, so the exact
// enumeration meets the 1e-12 agreement bound even over millions of tuples.
struct CompensatedVector {
  std::vector<double> sum;
  std::vector<double> comp;

  explicit CompensatedVector(std::size_t n) : sum(n, 0.0), comp(n, 0.0) {}

  void add(std::size_t i, double term) {
    const double y = term - comp[i];
    const double t = sum[i] + y;
    comp[i] = (t - sum[i]) - y;
    sum[i] = t;
  }
};

void enumerate_tuples(const ProductDynamicalSystem& base, int state, int depth, double prob,
                      CompensatedVector& dist) {
  if (depth == 0) {
    dist.add(static_cast<std::size_t>(state), prob);
    return;
  }
  const int m = base.env_points();
  for (int y = 0; y < m; ++y) {
    const double w = base.env().weight(y);
    if (w == 0.0) continue;
    enumerate_tuples(base, base.x_map(state, y), depth - 1, prob * w, dist);
  }
}

}  // namespace

InteractionChain::InteractionChain(ProductDynamicalSystem base, int horizon)
    : base_(std::move(base)), horizon_(horizon) {
  if (horizon_ < 1) throw std::invalid_argument("chain horizon must be >= 1");
}

InteractionChain chain_of(const MarkovKernel& k, int horizon, std::size_t env_cap) {
  return InteractionChain(dilate(k, env_cap), horizon);
}

FiniteMeasure reduce_n_exact(const InteractionChain& chain, int x, int n, std::size_t tuple_cap) {
  check_state(chain, x);
  check_steps(chain, n, 1);

  const auto m = static_cast<std::size_t>(chain.base().env_points());
  std::size_t tuples = 1;
  for (int k = 0; k < n; ++k) {
    if (tuples > tuple_cap / m) {
      throw std::length_error("reduce_n_exact: |F|^n = " + std::to_string(m) + "^" +
                              std::to_string(n) + " exceeds cap " + std::to_string(tuple_cap) +
                              "; use reduce_n_monte_carlo instead");
    }
    tuples *= m;
  }

  CompensatedVector dist(static_cast<std::size_t>(chain.base().states()));
  enumerate_tuples(chain.base(), x, n, 1.0, dist);
  return FiniteMeasure(chain.base().system_space(), std::move(dist.sum));
}

MonteCarloDistribution reduce_n_monte_carlo(const InteractionChain& chain, int x, int n,
                                            std::uint64_t samples, std::uint64_t seed,
                                            int threads) {
  check_state(chain, x);
  check_steps(chain, n, 1);
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (threads < 1) threads = 1;

  const auto& base = chain.base();
  const auto nstates = static_cast<std::size_t>(base.states());
  const std::vector<double> cdf = rng::cumulative_weights(base.env().weights());

  const auto worker_count =
      static_cast<std::uint64_t>(threads) < samples ? static_cast<std::uint64_t>(threads) : samples;
  std::vector<std::vector<std::uint64_t>> counts(worker_count,
                                                 std::vector<std::uint64_t>(nstates, 0));

  auto run_chunk = [&](std::uint64_t from, std::uint64_t to, std::vector<std::uint64_t>& out) {
    for (std::uint64_t s = from; s < to; ++s) {
      auto stream = rng::RandomStream::substream(seed, s);
      int state = x;
      for (int k = 0; k < n; ++k) {
        state = base.x_map(state, stream.categorical(cdf));
      }
      ++out[static_cast<std::size_t>(state)];
    }
  };

  if (worker_count <= 1) {
    run_chunk(0, samples, counts[0]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    const std::uint64_t chunk = samples / worker_count;
    const std::uint64_t rem = samples % worker_count;
    std::uint64_t begin = 0;
    for (std::uint64_t w = 0; w < worker_count; ++w) {
      const std::uint64_t end = begin + chunk + (w < rem ? 1 : 0);
      pool.emplace_back(run_chunk, begin, end, std::ref(counts[w]));
      begin = end;
    }
    for (auto& t : pool) t.join();
  }

  // Integer counts: aggregation order cannot affect the result.
  std::vector<std::uint64_t> total(nstates, 0);
  for (const auto& c : counts) {
    for (std::size_t i = 0; i < nstates; ++i) total[i] += c[i];
  }

  std::vector<double> p(nstates), se(nstates);
  for (std::size_t i = 0; i < nstates; ++i) {
    p[i] = static_cast<double>(total[i]) / static_cast<double>(samples);
    se[i] = std::sqrt(p[i] * (1.0 - p[i]) / static_cast<double>(samples));
  }
  return {FiniteMeasure(base.system_space(), std::move(p)), std::move(se), samples};
}

Trajectory sample_trajectory(const InteractionChain& chain, int x, int n, std::uint64_t seed) {
  check_state(chain, x);
  check_steps(chain, n, 0);

  const auto& base = chain.base();
  const std::vector<double> cdf = rng::cumulative_weights(base.env().weights());
  auto stream = rng::RandomStream::substream(seed, 0);

  Trajectory traj;
  traj.states.reserve(static_cast<std::size_t>(n) + 1);
  traj.env_draws.reserve(static_cast<std::size_t>(n));
  traj.states.push_back(x);
  int state = x;
  for (int k = 0; k < n; ++k) {
    const int y = stream.categorical(cdf);
    state = base.x_map(state, y);
    traj.env_draws.push_back(y);
    traj.states.push_back(state);
  }
  return traj;
}

}  // namespace markovdyn
