#include "markovdyn/dilation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace markovdyn {

namespace {

// n^n (or n^(n+1)) with an early bail-out against the cap.
std::size_t checked_env_size(int n, int exponent, std::size_t cap, const char* what) {
  std::size_t size = 1;
  for (int i = 0; i < exponent; ++i) {
    if (size > cap / static_cast<std::size_t>(n)) {
      throw std::length_error(std::string(what) + ": environment too large (" +
                              std::to_string(n) + "^" + std::to_string(exponent) + " > cap " +
                              std::to_string(cap) + ")");
    }
    size *= static_cast<std::size_t>(n);
  }
  if (size > cap) {
    throw std::length_error(std::string(what) + ": environment too large");
  }
  return size;
}

std::string function_id(const std::vector<int>& images) {
  std::string id = "y(";
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (i) id += ",";
    id += std::to_string(images[i]);
  }
  id += ")";
  return id;
}

}  // namespace

EnvironmentSpace::EnvironmentSpace(std::vector<std::string> ids, std::vector<double> weights,
                                   std::optional<std::vector<std::vector<int>>> functions,
                                   double tol)
    : ids_(std::move(ids)), weights_(std::move(weights)), functions_(std::move(functions)) {
  if (ids_.empty()) throw std::invalid_argument("environment must contain at least one point");
  if (weights_.size() != ids_.size()) {
    throw std::invalid_argument("environment has " + std::to_string(weights_.size()) +
                                " weights for " + std::to_string(ids_.size()) + " points");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) {
      throw std::invalid_argument("environment ids must be distinct: duplicate \"" + id + "\"");
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= -tol)) {
      throw std::invalid_argument("environment weight " + std::to_string(i) + " = " +
                                  std::to_string(weights_[i]) + " is negative");
    }
    sum += weights_[i];
  }
  if (std::abs(sum - 1.0) > tol) {
    throw std::invalid_argument("environment weights sum to " + std::to_string(sum) +
                                ", expected 1 within " + std::to_string(tol));
  }
  if (functions_ && functions_->size() != ids_.size()) {
    throw std::invalid_argument("environment function table size mismatch");
  }
}

ProductDynamicalSystem::ProductDynamicalSystem(StateSpace system_space, EnvironmentSpace env,
                                               std::vector<int> x_map, std::vector<int> y_map)
    : system_space_(std::move(system_space)),
      env_(std::move(env)),
      x_map_(std::move(x_map)),
      y_map_(std::move(y_map)) {
  const auto n = static_cast<std::size_t>(system_space_.size());
  const auto m = static_cast<std::size_t>(env_.size());
  if (x_map_.size() != n * m || y_map_.size() != n * m) {
    throw std::invalid_argument("product system maps must be total on E x F (" +
                                std::to_string(n * m) + " entries)");
  }
  for (std::size_t i = 0; i < n * m; ++i) {
    if (x_map_[i] < 0 || x_map_[i] >= static_cast<int>(n)) {
      throw std::invalid_argument("x_map entry " + std::to_string(i) + " = " +
                                  std::to_string(x_map_[i]) + " does not index the state space");
    }
    if (y_map_[i] < 0 || y_map_[i] >= static_cast<int>(m)) {
      throw std::invalid_argument("y_map entry " + std::to_string(i) + " = " +
                                  std::to_string(y_map_[i]) + " does not index the environment");
    }
  }
  if (env_.functions()) {
    for (std::size_t y = 0; y < env_.functions()->size(); ++y) {
      const auto& f = (*env_.functions())[y];
      if (f.size() != n) {
        throw std::invalid_argument("environment function " + std::to_string(y) +
                                    " is not total on the state space");
      }
      for (const int v : f) {
        if (v < 0 || v >= static_cast<int>(n)) {
          throw std::invalid_argument("environment function " + std::to_string(y) +
                                      " maps outside the state space");
        }
      }
    }
  }
}

MarkovKernel reduce(const ProductDynamicalSystem& sys) {
  const int n = sys.states();
  const int m = sys.env_points();
  std::vector<double> entries(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  std::vector<double> comp(entries.size(), 0.0);  // Kahan compensation
  for (int i = 0; i < n; ++i) {
    for (int y = 0; y < m; ++y) {
      const int j = sys.x_map(i, y);
      const auto idx =
          static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j);
      const double term = sys.env().weight(y) - comp[idx];
      const double acc = entries[idx] + term;
      comp[idx] = (acc - entries[idx]) - term;
      entries[idx] = acc;
    }
  }
  return MarkovKernel(sys.system_space(), std::move(entries));
}

ProductDynamicalSystem dilate(const MarkovKernel& k, std::size_t env_cap) {
  const int n = k.size();
  const std::size_t m = checked_env_size(n, n, env_cap, "dilate");

  std::vector<std::string> ids;
  std::vector<double> weights;
  std::vector<std::vector<int>> functions;
  ids.reserve(m);
  weights.reserve(m);
  functions.reserve(m);

  std::vector<int> images(static_cast<std::size_t>(n), 0);
  for (std::size_t e = 0; e < m; ++e) {
    // Decode e into (y(0),...,y(n-1)), most significant digit first.
    std::size_t rest = e;
    for (int x = n - 1; x >= 0; --x) {
      images[static_cast<std::size_t>(x)] = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
    }
    double mu = 1.0;
    for (int x = 0; x < n; ++x) mu *= k(x, images[static_cast<std::size_t>(x)]);
    ids.push_back(function_id(images));
    weights.push_back(mu);
    functions.push_back(images);
  }

  std::vector<int> x_map(static_cast<std::size_t>(n) * m);
  std::vector<int> y_map(static_cast<std::size_t>(n) * m);
  for (int x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      x_map[static_cast<std::size_t>(x) * m + y] = functions[y][static_cast<std::size_t>(x)];
      y_map[static_cast<std::size_t>(x) * m + y] = static_cast<int>(y);
    }
  }
  return ProductDynamicalSystem(k.space(),
                                EnvironmentSpace(std::move(ids), std::move(weights),
                                                 std::move(functions)),
                                std::move(x_map), std::move(y_map));
}

ProductDynamicalSystem dilate_invertible(const MarkovKernel& k, int x0, std::size_t env_cap) {
  const int n = k.size();
  if (x0 < 0 || x0 >= n) throw std::invalid_argument("dilate_invertible: x0 out of range");
  checked_env_size(n, n + 1, env_cap, "dilate_invertible");

  const ProductDynamicalSystem base = dilate(k, env_cap);
  const auto& base_env = base.env();
  const auto& funcs = *base_env.functions();
  const std::size_t mf = static_cast<std::size_t>(base_env.size());
  const std::size_t mp = static_cast<std::size_t>(n) * mf;  // |F'| = |E x F|

  // Environment point z*|F| + y is the pair (z, y); measure delta_{x0} x mu.
  std::vector<std::string> ids;
  std::vector<double> weights;
  ids.reserve(mp);
  weights.reserve(mp);
  for (int z = 0; z < n; ++z) {
    for (std::size_t y = 0; y < mf; ++y) {
      ids.push_back(k.space().label(z) + "|" + base_env.ids()[y]);
      weights.push_back(z == x0 ? base_env.weight(static_cast<int>(y)) : 0.0);
    }
  }

  // T'(x,(z,y)) swaps x0 <-> y(x) in the z slot and records x in the y' slot:
  //   z == x0   -> (y(x), (x,y))
  //   z == y(x) -> (x0,   (x,y))
  //   otherwise -> (z,    (x,y))
  // When y(x) == x0 the two first cases coincide; case 1 is taken.
  std::vector<int> x_map(static_cast<std::size_t>(n) * mp);
  std::vector<int> y_map(static_cast<std::size_t>(n) * mp);
  for (int x = 0; x < n; ++x) {
    for (int z = 0; z < n; ++z) {
      for (std::size_t y = 0; y < mf; ++y) {
        const std::size_t col = static_cast<std::size_t>(z) * mf + y;
        const std::size_t idx = static_cast<std::size_t>(x) * mp + col;
        const int yx = funcs[y][static_cast<std::size_t>(x)];
        int image;
        if (z == x0) {
          image = yx;
        } else if (z == yx) {
          image = x0;
        } else {
          image = z;
        }
        x_map[idx] = image;
        y_map[idx] = static_cast<int>(static_cast<std::size_t>(x) * mf + y);
      }
    }
  }
  return ProductDynamicalSystem(k.space(),
                                EnvironmentSpace(std::move(ids), std::move(weights)),
                                std::move(x_map), std::move(y_map));
}

ProductDynamicalSystem iterate(const ProductDynamicalSystem& sys, int m) {
  if (m < 1) throw std::invalid_argument("iterate: m must be >= 1");
  std::vector<int> x_acc = sys.x_table();
  std::vector<int> y_acc = sys.y_table();
  for (int step = 1; step < m; ++step) {
    for (std::size_t i = 0; i < x_acc.size(); ++i) {
      const auto [a, b] = sys.apply(x_acc[i], y_acc[i]);
      x_acc[i] = a;
      y_acc[i] = b;
    }
  }
  return ProductDynamicalSystem(sys.system_space(), sys.env(), std::move(x_acc), std::move(y_acc));
}

}  // namespace markovdyn
