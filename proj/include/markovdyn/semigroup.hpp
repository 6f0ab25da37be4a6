#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "markovdyn/sde.hpp"

namespace markovdyn {

// Named test function with (optionally) registered exact derivatives.
// gradient/hessian are empty std::functions when unavailable.
struct TestObservable {
  std::string name;
  nlohmann::json params;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;  // size n
  std::function<void(std::span<const double>, std::span<double>)> hessian;   // n x n row-major
};

// Registry:
//   x       {"index": i}           coordinate x_i (default i = 0)
//   x2      {"index": i}           squared coordinate x_i^2
//   exp-re  {"theta": [..]}        cos(theta . x)
//   exp-im  {"theta": [..]}        sin(theta . x)
//   box     {"lo": [..], "hi": [..]}  indicator of the box (no derivatives)
TestObservable make_observable(const std::string& name, const nlohmann::json& params, int dim);
std::vector<std::string> observable_registry();

struct EstimatorOptions {
  int threads = 1;
  // When false (the default) any exploding path aborts the estimator; when
  // true exploded paths are counted and excluded.
  bool allow_explosions = false;
};

struct SemigroupEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t explosions = 0;
};

// Monte-Carlo estimate of P_t h(x) = E[h(X_t^x)] over independent Euler
// paths. t/dt must be integral; identical results for a fixed seed whatever
// the thread count.
SemigroupEstimate estimate_semigroup(const SdeSpec& spec, const TestObservable& h,
                                     std::span<const double> x, double t, double dt,
                                     std::uint64_t samples, std::uint64_t seed,
                                     const EstimatorOptions& opts = {});

// A h(x) = sum_i f_i(x) dh/dx_i + (1/2) sum_{i,j} (g g^T)_{ij} d2h/dx_i dx_j,
// evaluated from the registered exact derivatives.
double apply_generator(const SdeSpec& spec, const TestObservable& h, std::span<const double> x);

enum class CheckStatus { kPass, kFail, kInconclusive };
std::string_view to_string(CheckStatus s);

struct ChapmanKolmogorovReport {
  SemigroupEstimate nested;  // P_t(P_s h)(x): outer to t, fresh inner legs to s
  SemigroupEstimate direct;  // P_{s+t} h(x)
  double difference = 0.0;
  double tolerance_band = 0.0;  // 4 * combined standard error
  CheckStatus status = CheckStatus::kFail;
};

// Nested estimator: outer paths to time t; from each endpoint, inner paths
// with fresh independent noise to time s. direct_samples = 0 means
// outer * inner.
ChapmanKolmogorovReport chapman_kolmogorov_check(const SdeSpec& spec, const TestObservable& h,
                                                 std::span<const double> x, double s, double t,
                                                 double dt, std::uint64_t outer_samples,
                                                 std::uint64_t inner_samples,
                                                 std::uint64_t direct_samples, std::uint64_t seed,
                                                 const EstimatorOptions& opts = {});

struct GeneratorConsistencyReport {
  std::vector<double> horizons;
  std::vector<double> quotients;    // D(t) = (P_t h(x) - h(x)) / t
  std::vector<double> std_errors;   // SE of each quotient
  double generator_value = 0.0;     // apply_generator(spec, h, x)
  double fitted_slope = 0.0;        // least-squares slope of D(t) over t
  double final_gap = 0.0;           // |D(t_min) - generator_value|
  double tolerance_band = 0.0;      // 4 SE(t_min) + 2 |slope| t_min
  CheckStatus status = CheckStatus::kFail;
  std::string note;
};

// Difference quotients of the estimated semigroup must trend to the
// generator value. Horizons must be positive, strictly decreasing, and
// divisible by dt. When the Monte-Carlo error swamps the measured change the
// status is inconclusive rather than failed.
GeneratorConsistencyReport generator_consistency_check(const SdeSpec& spec,
                                                       const TestObservable& h,
                                                       std::span<const double> x, double dt,
                                                       std::uint64_t samples, std::uint64_t seed,
                                                       std::span<const double> horizons,
                                                       const EstimatorOptions& opts = {});

}  // namespace markovdyn
