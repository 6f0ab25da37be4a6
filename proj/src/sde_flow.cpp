#include "markovdyn/sde.hpp"

#include <cmath>
#include <cstring>

#include "markovdyn/rng.hpp"

namespace markovdyn {

NoisePath::NoisePath(double dt, int dim, std::vector<double> increments, std::uint64_t seed,
                     int shift_offset)
    : dt_(dt), dim_(dim), increments_(std::move(increments)), seed_(seed),
      shift_offset_(shift_offset) {
  if (dt_ <= 0.0) throw std::invalid_argument("noise path dt must be > 0");
  if (dim_ < 1) throw std::invalid_argument("noise path dimension must be >= 1");
  if (increments_.empty() || increments_.size() % static_cast<std::size_t>(dim_) != 0) {
    throw std::invalid_argument("noise path increments must be a nonempty m x d table");
  }
}

std::vector<double> NoisePath::value(int k) const {
  if (k < 0 || k > steps()) throw std::invalid_argument("noise path value index out of range");
  std::vector<double> w(static_cast<std::size_t>(dim_), 0.0);
  for (int i = 0; i < k; ++i) {
    const auto inc = increment(i);
    for (int j = 0; j < dim_; ++j) w[static_cast<std::size_t>(j)] += inc[j];
  }
  return w;
}

NoisePath sample_path(int dim, double dt, int steps, std::uint64_t seed) {
  if (dt <= 0.0) throw std::invalid_argument("sample_path: dt must be > 0");
  if (steps < 1) throw std::invalid_argument("sample_path: steps must be >= 1");
  if (dim < 1) throw std::invalid_argument("sample_path: dim must be >= 1");
  auto stream = rng::RandomStream(seed);
  const double scale = std::sqrt(dt);
  std::vector<double> inc(static_cast<std::size_t>(steps) * static_cast<std::size_t>(dim));
  for (auto& v : inc) v = scale * stream.gaussian();
  return NoisePath(dt, dim, std::move(inc), seed);
}

NoisePath shift_path(const NoisePath& w, int k) {
  if (k < 0 || k > w.steps()) {
    throw std::invalid_argument("shift_path: shift " + std::to_string(k) +
                                " outside [0, " + std::to_string(w.steps()) + "]");
  }
  if (k == 0) return w;
  if (k == w.steps()) {
    throw std::invalid_argument("shift_path: shifting away the entire path");
  }
  const auto offset = static_cast<std::size_t>(k) * static_cast<std::size_t>(w.dim());
  std::vector<double> inc(w.increments().begin() + static_cast<std::ptrdiff_t>(offset),
                          w.increments().end());
  return NoisePath(w.dt(), w.dim(), std::move(inc), w.seed(), w.shift_offset() + k);
}

void euler_step(const SdeSpec& spec, std::span<const double> x, std::span<const double> dw,
                double dt, std::span<double> out, std::span<double> drift_buf,
                std::span<double> diffusion_buf) {
  const int n = spec.dim_state;
  const int d = spec.dim_noise;
  spec.drift(x, drift_buf);
  spec.diffusion(x, diffusion_buf);
  for (int i = 0; i < n; ++i) {
    double noise = 0.0;
    for (int j = 0; j < d; ++j) {
      noise += diffusion_buf[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) +
                             static_cast<std::size_t>(j)] *
               dw[j];
    }
    out[i] = x[i] + drift_buf[i] * dt + noise;
  }
}

FlowResult euler_flow(const SdeSpec& spec, std::span<const double> x0, const NoisePath& w,
                      int steps) {
  const int n = spec.dim_state;
  if (static_cast<int>(x0.size()) != n) {
    throw std::invalid_argument("euler_flow: initial state has wrong dimension");
  }
  if (w.dim() != spec.dim_noise) {
    throw std::invalid_argument("euler_flow: noise dimension mismatch");
  }
  if (steps < 0 || steps > w.steps()) {
    throw std::invalid_argument("euler_flow: steps outside the sampled path");
  }

  FlowResult res;
  res.dim = n;
  res.times.resize(static_cast<std::size_t>(steps) + 1);
  res.states.resize((static_cast<std::size_t>(steps) + 1) * static_cast<std::size_t>(n));
  for (int k = 0; k <= steps; ++k) res.times[static_cast<std::size_t>(k)] = k * w.dt();
  std::copy(x0.begin(), x0.end(), res.states.begin());

  std::vector<double> fbuf(static_cast<std::size_t>(n));
  std::vector<double> gbuf(static_cast<std::size_t>(n) * static_cast<std::size_t>(spec.dim_noise));
  for (int k = 0; k < steps; ++k) {
    const auto cur = std::span<const double>(res.states).subspan(
        static_cast<std::size_t>(k) * static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    const auto next = std::span<double>(res.states).subspan(
        (static_cast<std::size_t>(k) + 1) * static_cast<std::size_t>(n),
        static_cast<std::size_t>(n));
    euler_step(spec, cur, w.increment(k), w.dt(), next, fbuf, gbuf);
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(next[i])) throw ExplosionError(k + 1);
    }
  }
  return res;
}

CocycleReport cocycle_check(const SdeSpec& spec, std::span<const double> x, const NoisePath& w,
                            int k_s, int k_t) {
  if (k_s < 0 || k_t < 0 || k_s + k_t > w.steps()) {
    throw std::invalid_argument("cocycle_check: split outside the sampled path");
  }

  CocycleReport rep;
  rep.split_step = k_s;
  rep.total_steps = k_s + k_t;

  const FlowResult full = euler_flow(spec, x, w, k_s + k_t);
  rep.unsplit_terminal = full.terminal();

  const FlowResult first_leg = euler_flow(spec, x, w, k_s);
  const std::vector<double> mid = first_leg.terminal();
  // k_s == steps would leave an empty path; the second leg is empty then too.
  if (k_t == 0) {
    rep.split_terminal = mid;
  } else {
    const NoisePath shifted = shift_path(w, k_s);
    rep.split_terminal = euler_flow(spec, mid, shifted, k_t).terminal();
  }

  rep.bitwise_equal = true;
  rep.max_abs_diff = 0.0;
  for (std::size_t i = 0; i < rep.unsplit_terminal.size(); ++i) {
    if (std::memcmp(&rep.unsplit_terminal[i], &rep.split_terminal[i], sizeof(double)) != 0) {
      rep.bitwise_equal = false;
    }
    rep.max_abs_diff =
        std::max(rep.max_abs_diff, std::abs(rep.unsplit_terminal[i] - rep.split_terminal[i]));
  }

  // Shift semigroup on the same grid: dropping k_s then k_t rows is dropping
  // k_s + k_t rows.
  rep.shift_composition_ok = true;
  if (k_s + k_t < w.steps() && k_s > 0 && k_t > 0) {
    const NoisePath two_step = shift_path(shift_path(w, k_s), k_t);
    const NoisePath one_step = shift_path(w, k_s + k_t);
    rep.shift_composition_ok =
        two_step.steps() == one_step.steps() &&
        std::memcmp(two_step.increments().data(), one_step.increments().data(),
                    two_step.increments().size() * sizeof(double)) == 0;
  }
  return rep;
}

Integrand constant_integrand(int dim) {
  return {"const-1", [dim](const NoisePath&, int) {
            return std::vector<double>(static_cast<std::size_t>(dim), 1.0);
          }};
}

Integrand brownian_integrand(int dim) {
  return {"brownian", [dim](const NoisePath& w, int k) {
            auto v = w.value(k);
            v.resize(static_cast<std::size_t>(dim), 0.0);
            return v;
          }};
}

Integrand elementary_integrand(int dim, int steps, std::uint64_t seed) {
  // Deterministic step process: levels change at seeded breakpoints.
  // Deterministic-in-omega processes are predictable, so the shifted-integral
  // identity applies verbatim.
  auto stream = rng::RandomStream(seed);
  const int pieces = 1 + static_cast<int>(stream.uniform() * 7.0);
  std::vector<int> breaks;
  breaks.push_back(0);
  for (int p = 1; p < pieces; ++p) {
    breaks.push_back(static_cast<int>(stream.uniform() * steps));
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<std::vector<double>> levels;
  for (int p = 0; p < pieces; ++p) {
    std::vector<double> level(static_cast<std::size_t>(dim));
    for (auto& v : level) v = 2.0 * stream.uniform() - 1.0;
    levels.push_back(std::move(level));
  }
  return {"elementary[" + std::to_string(seed) + "]",
          [breaks, levels](const NoisePath&, int k) {
            std::size_t piece = 0;
            for (std::size_t p = 0; p < breaks.size(); ++p) {
              if (breaks[p] <= k) piece = p;
            }
            return levels[piece];
          }};
}

ShiftedIntegralReport shifted_integral_check(const Integrand& h, const NoisePath& w, int k_s,
                                             int k_t) {
  if (k_t < 0) k_t = w.steps() - k_s;
  if (k_s < 0 || k_t < 0 || k_s + k_t > w.steps()) {
    throw std::invalid_argument("shifted_integral_check: window outside the sampled path");
  }

  ShiftedIntegralReport rep;
  rep.k_s = k_s;
  rep.k_t = k_t;
  if (k_t == 0) {
    rep.bitwise_equal = true;
    return rep;
  }

  const NoisePath shifted = k_s > 0 ? shift_path(w, k_s) : w;

  // Theta_s ( int_0^t H dW ): evaluate H on the shifted path, integrate
  // against the shifted increments.
  double lhs = 0.0;
  for (int k = 0; k < k_t; ++k) {
    const auto hv = h.at(shifted, k);
    const auto inc = shifted.increment(k);
    for (int j = 0; j < w.dim(); ++j) lhs += hv[static_cast<std::size_t>(j)] * inc[j];
  }

  // int_s^{s+t} Theta_s(H_{u-s}) dW: the same integrand values against the
  // original increments, reindexed.
  double rhs = 0.0;
  for (int k = 0; k < k_t; ++k) {
    const auto hv = h.at(shifted, k);
    const auto inc = w.increment(k_s + k);
    for (int j = 0; j < w.dim(); ++j) rhs += hv[static_cast<std::size_t>(j)] * inc[j];
  }

  rep.shifted_side = lhs;
  rep.reindexed_side = rhs;
  rep.bitwise_equal = std::memcmp(&lhs, &rhs, sizeof(double)) == 0;
  return rep;
}

}  // namespace markovdyn
