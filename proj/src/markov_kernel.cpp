#include "markovdyn/markov_kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace markovdyn {

namespace {

void require_same_space(const StateSpace& a, const StateSpace& b, const char* what) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(what) + ": state spaces differ");
  }
}

}  // namespace

Observable::Observable(StateSpace space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(space_.size())) {
    throw std::invalid_argument("observable has " + std::to_string(values_.size()) +
                                " values for " + std::to_string(space_.size()) + " states");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("observable value " + std::to_string(i) + " is not finite");
    }
  }
}

Observable Observable::ones(StateSpace space) {
  std::vector<double> v(static_cast<std::size_t>(space.size()), 1.0);
  return Observable(std::move(space), std::move(v));
}

FiniteMeasure::FiniteMeasure(StateSpace space, std::vector<double> weights, double tol)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (weights_.size() != static_cast<std::size_t>(space_.size())) {
    throw std::invalid_argument("measure has " + std::to_string(weights_.size()) +
                                " weights for " + std::to_string(space_.size()) + " states");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= -tol)) {
      throw std::invalid_argument("measure weight " + std::to_string(i) + " = " +
                                  std::to_string(weights_[i]) + " is negative");
    }
    sum += weights_[i];
  }
  if (std::abs(sum - 1.0) > tol) {
    throw std::invalid_argument("measure weights sum to " + std::to_string(sum) +
                                ", expected 1 within " + std::to_string(tol));
  }
}

FiniteMeasure FiniteMeasure::dirac(StateSpace space, int x) {
  if (x < 0 || x >= space.size()) throw std::invalid_argument("dirac: state index out of range");
  std::vector<double> w(static_cast<std::size_t>(space.size()), 0.0);
  w[static_cast<std::size_t>(x)] = 1.0;
  return FiniteMeasure(std::move(space), std::move(w));
}

FiniteMeasure FiniteMeasure::uniform(StateSpace space) {
  const int n = space.size();
  std::vector<double> w(static_cast<std::size_t>(n), 1.0 / n);
  return FiniteMeasure(std::move(space), std::move(w));
}

MarkovKernel::MarkovKernel(StateSpace space, std::vector<double> row_major, double tol)
    : space_(std::move(space)), entries_(std::move(row_major)) {
  const auto n = static_cast<std::size_t>(space_.size());
  if (entries_.size() != n * n) {
    throw std::invalid_argument("kernel matrix has " + std::to_string(entries_.size()) +
                                " entries, expected " + std::to_string(n * n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = entries_[i * n + j];
      if (!(p >= -tol && p <= 1.0 + tol)) {
        throw std::invalid_argument("kernel entry (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") = " + std::to_string(p) +
                                    " outside [0,1]");
      }
      row_sum += p;
    }
    if (std::abs(row_sum - 1.0) > tol) {
      throw std::invalid_argument("kernel row " + std::to_string(i) + " sums to " +
                                  std::to_string(row_sum) + ", expected 1 within " +
                                  std::to_string(tol));
    }
  }
}

MarkovKernel MarkovKernel::identity(StateSpace space) {
  const auto n = static_cast<std::size_t>(space.size());
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
  return MarkovKernel(std::move(space), std::move(e));
}

MarkovKernel MarkovKernel::from_rows(StateSpace space, const std::vector<std::vector<double>>& rows,
                                     double tol) {
  const auto n = static_cast<std::size_t>(space.size());
  if (rows.size() != n) {
    throw std::invalid_argument("kernel has " + std::to_string(rows.size()) + " rows, expected " +
                                std::to_string(n));
  }
  std::vector<double> e;
  e.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw std::invalid_argument("kernel row " + std::to_string(i) + " has " +
                                  std::to_string(rows[i].size()) + " entries, expected " +
                                  std::to_string(n));
    }
    e.insert(e.end(), rows[i].begin(), rows[i].end());
  }
  return MarkovKernel(std::move(space), std::move(e), tol);
}

MarkovKernel MarkovKernel::from_point_map(StateSpace space, const std::vector<int>& image) {
  const auto n = static_cast<std::size_t>(space.size());
  if (image.size() != n) {
    throw std::invalid_argument("point map has " + std::to_string(image.size()) +
                                " entries, expected " + std::to_string(n));
  }
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int j = image[i];
    if (j < 0 || j >= static_cast<int>(n)) {
      throw std::invalid_argument("point map image " + std::to_string(i) + " -> " +
                                  std::to_string(j) + " out of range");
    }
    e[i * n + static_cast<std::size_t>(j)] = 1.0;
  }
  return MarkovKernel(std::move(space), std::move(e));
}

std::span<const double> MarkovKernel::row(int i) const {
  const auto n = static_cast<std::size_t>(size());
  if (i < 0 || i >= size()) throw std::invalid_argument("kernel row index out of range");
  return std::span<const double>(entries_).subspan(static_cast<std::size_t>(i) * n, n);
}

Observable apply_to_observable(const MarkovKernel& k, const Observable& f) {
  require_same_space(k.space(), f.space(), "apply_to_observable");
  const int n = k.size();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += k(i, j) * f[j];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return Observable(k.space(), std::move(out));
}

FiniteMeasure apply_to_measure(const MarkovKernel& k, const FiniteMeasure& p) {
  require_same_space(k.space(), p.space(), "apply_to_measure");
  const int n = k.size();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const double w = p[i];
    if (w == 0.0) continue;
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] += w * k(i, j);
  }
  return FiniteMeasure(k.space(), std::move(out));
}

MarkovKernel compose(const MarkovKernel& first, const MarkovKernel& then) {
  require_same_space(first.space(), then.space(), "compose");
  const int n = first.size();
  std::vector<double> out(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      const double p = first(i, l);
      if (p == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        out[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
            static_cast<std::size_t>(j)] += p * then(l, j);
      }
    }
  }
  return MarkovKernel(first.space(), std::move(out));
}

MarkovKernel power(const MarkovKernel& k, int m) {
  if (m < 0) throw std::invalid_argument("power: exponent must be >= 0");
  MarkovKernel result = MarkovKernel::identity(k.space());
  for (int i = 0; i < m; ++i) result = compose(result, k);
  return result;
}

PointMapResult is_deterministic(const MarkovKernel& k, double tol) {
  if (tol < 0) throw std::invalid_argument("is_deterministic: tol must be >= 0");
  const int n = k.size();
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    int hit = -1;
    for (int j = 0; j < n; ++j) {
      if (std::abs(k(i, j) - 1.0) <= tol) {
        hit = j;
        break;
      }
    }
    if (hit < 0) return {};
    map[static_cast<std::size_t>(i)] = hit;
  }
  return {true, std::move(map)};
}

}  // namespace markovdyn
