#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace markovdyn {

// Drift/diffusion pair f: R^n -> R^n, g: R^n -> R^{n x d} (row-major).
// Registry models: "ou", "linear", "gbm-1d", "double-well-1d". Custom
// callables can be supplied directly through this struct.
struct SdeSpec {
  int dim_state = 0;
  int dim_noise = 0;
  std::string model = "custom";
  nlohmann::json params;  // echoed in reports; empty for custom specs
  std::function<void(std::span<const double>, std::span<double>)> drift;
  std::function<void(std::span<const double>, std::span<double>)> diffusion;
};

// Builds a registry model; validates parameter shapes.
//   ou:            {"lambda": [l1..ln], "sigma": [[..]] (n x d)}
//   linear:        {"A": [[..]] (n x n), "b": [..], "C": [[..]] (n x d)}
//   gbm-1d:        {"a": drift rate, "b": noise rate}
//   double-well-1d:{"sigma": noise level}
// Scalars are accepted where a 1-entry vector/matrix is meant.
SdeSpec make_sde(const std::string& model, const nlohmann::json& params);
std::vector<std::string> sde_registry_models();

// Discretized d-dimensional Brownian path: i.i.d. N(0, dt) increments on a
// uniform grid, W_0 = 0. shift_offset records how many grid steps of shifting
// produced this path (provenance only).
class NoisePath {
public:
  NoisePath(double dt, int dim, std::vector<double> increments, std::uint64_t seed,
            int shift_offset = 0);

  double dt() const noexcept { return dt_; }
  int dim() const noexcept { return dim_; }
  int steps() const noexcept { return static_cast<int>(increments_.size()) / dim_; }
  std::uint64_t seed() const noexcept { return seed_; }
  int shift_offset() const noexcept { return shift_offset_; }

  std::span<const double> increment(int k) const {
    return std::span<const double>(increments_)
        .subspan(static_cast<std::size_t>(k) * static_cast<std::size_t>(dim_),
                 static_cast<std::size_t>(dim_));
  }
  std::span<const double> increments() const noexcept { return increments_; }

  // Path value W_{k dt} (sum of the first k increments).
  std::vector<double> value(int k) const;

private:
  double dt_;
  int dim_;
  std::vector<double> increments_;
  std::uint64_t seed_;
  int shift_offset_;
};

NoisePath sample_path(int dim, double dt, int steps, std::uint64_t seed);

// theta_s on the grid, s = k dt: drop the first k increment rows.
NoisePath shift_path(const NoisePath& w, int k);

class ExplosionError : public std::runtime_error {
public:
  explicit ExplosionError(int step)
      : std::runtime_error("flow exploded to a non-finite state at step " + std::to_string(step)),
        step_(step) {}
  int step() const noexcept { return step_; }

private:
  int step_;
};

struct FlowResult {
  int dim = 0;
  std::vector<double> times;   // steps+1 grid points
  std::vector<double> states;  // (steps+1) x dim, row-major

  std::span<const double> state(int k) const {
    return std::span<const double>(states).subspan(
        static_cast<std::size_t>(k) * static_cast<std::size_t>(dim),
        static_cast<std::size_t>(dim));
  }
  std::vector<double> terminal() const {
    const auto s = state(static_cast<int>(times.size()) - 1);
    return {s.begin(), s.end()};
  }
};

// The single canonical Euler-Maruyama step:
//   out = x + f(x) dt + g(x) dW     (noise components summed in index order)
// Every flow and estimator in this library must advance through this
// function; the grid cocycle identity is bitwise only for that reason.
void euler_step(const SdeSpec& spec, std::span<const double> x, std::span<const double> dw,
                double dt, std::span<double> out, std::span<double> drift_buf,
                std::span<double> diffusion_buf);

// Explicit Euler-Maruyama flow along a sampled path. Throws ExplosionError
// when a state stops being finite.
FlowResult euler_flow(const SdeSpec& spec, std::span<const double> x0, const NoisePath& w,
                      int steps);

struct CocycleReport {
  int split_step = 0;
  int total_steps = 0;
  std::vector<double> unsplit_terminal;
  std::vector<double> split_terminal;
  bool bitwise_equal = false;
  double max_abs_diff = 0.0;
  // theta_{k_t}(theta_{k_s} w) == theta_{k_s + k_t} w, checked bitwise.
  bool shift_composition_ok = false;
};

// Restart-from-the-middle check: running k_s + k_t steps from x must equal
// running k_s steps, then k_t more from the reached state with the shifted
// path. Exact on the grid, so equality is asserted bitwise.
CocycleReport cocycle_check(const SdeSpec& spec, std::span<const double> x, const NoisePath& w,
                            int k_s, int k_t);

// Adapted integrand H for the discrete stochastic integral: at(w, k) returns
// the value used on [k dt, (k+1) dt) and may read only increments 0..k-1.
struct Integrand {
  std::string name;
  std::function<std::vector<double>(const NoisePath&, int)> at;
};

Integrand constant_integrand(int dim);
Integrand brownian_integrand(int dim);
// Piecewise-constant process with deterministic (seeded) levels and
// breakpoints; `steps` bounds the time index it will be evaluated at.
Integrand elementary_integrand(int dim, int steps, std::uint64_t seed);

struct ShiftedIntegralReport {
  int k_s = 0;
  int k_t = 0;
  double shifted_side = 0.0;    // integral of H over [0,t] against theta_s w
  double reindexed_side = 0.0;  // integral of the shifted integrand over [s, s+t] against w
  bool bitwise_equal = false;
};

// Discrete shifted-integral identity; holds with zero tolerance because both
// sides reindex the same finite sum. k_t < 0 means "up to the end of w".
ShiftedIntegralReport shifted_integral_check(const Integrand& h, const NoisePath& w, int k_s,
                                             int k_t = -1);

}  // namespace markovdyn
