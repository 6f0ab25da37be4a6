#include "markovdyn/randomness.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace markovdyn {

namespace {

// Sign vector for code b: bit (n-1-j) of b flips coordinate j to -1, so
// b = 0 is all +1 and increasing b walks the vectors in lexicographic order
// with +1 before -1.
std::vector<double> sign_vector(std::uint64_t b, int n) {
  std::vector<double> f(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    f[static_cast<std::size_t>(j)] = ((b >> (n - 1 - j)) & 1u) ? -1.0 : 1.0;
  }
  return f;
}

// L(f^2)(x) - (Lf)(x)^2 for a sign vector f, computed literally.
double defect_at(const MarkovKernel& k, int x, const std::vector<double>& f) {
  const int n = k.size();
  double lf = 0.0;
  double lf2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double fj = f[static_cast<std::size_t>(j)];
    lf += k(x, j) * fj;
    lf2 += k(x, j) * (fj * fj);
  }
  return lf2 - lf * lf;
}

bool injective(const std::vector<int>& map) {
  std::unordered_set<int> seen;
  for (int v : map) {
    if (!seen.insert(v).second) return false;
  }
  return true;
}

}  // namespace

DefectReport homomorphism_defect(const MarkovKernel& k, int max_states) {
  const int n = k.size();
  if (n > max_states) {
    throw std::length_error("homomorphism_defect: exhaustive mode refuses " + std::to_string(n) +
                            " states (cap " + std::to_string(max_states) + ")");
  }
  const std::uint64_t vectors = std::uint64_t{1} << n;

  double best = -1.0;
  for (std::uint64_t b = 0; b < vectors; ++b) {
    const std::vector<double> f = sign_vector(b, n);
    for (int x = 0; x < n; ++x) {
      const double v = defect_at(k, x, f);
      if (v > best) best = v;
    }
  }

  // Second pass picks the lexicographically smallest (x, f) witness.
  for (int x = 0; x < n; ++x) {
    for (std::uint64_t b = 0; b < vectors; ++b) {
      const std::vector<double> f = sign_vector(b, n);
      if (defect_at(k, x, f) == best) {
        return {best, Observable(k.space(), f), x};
      }
    }
  }
  throw std::logic_error("homomorphism_defect: witness scan failed");  // unreachable
}

bool is_deterministic_via_homomorphism(const MarkovKernel& k, double tol) {
  if (tol < 0) throw std::invalid_argument("tol must be >= 0");
  return homomorphism_defect(k).defect <= tol;
}

MarkovInvertibility is_markov_invertible(const MarkovKernel& k, double tol) {
  const int n = k.size();
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      k.entries().data(), n, n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);

  MarkovInvertibility result;
  if (!lu.isInvertible()) return result;

  result.matrix_invertible = true;
  const Eigen::MatrixXd inv = lu.inverse();
  result.matrix_inverse.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      result.matrix_inverse[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                            static_cast<std::size_t>(j)] = inv(i, j);
    }
  }

  bool stochastic = true;
  for (int i = 0; i < n && stochastic; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p = inv(i, j);
      if (!(p >= -tol && p <= 1.0 + tol)) stochastic = false;
      row_sum += p;
    }
    if (std::abs(row_sum - 1.0) > tol) stochastic = false;
  }
  if (!stochastic) return result;

  result.invertible = true;
  result.inverse = MarkovKernel(k.space(), result.matrix_inverse, std::max(tol, kStochasticTol));

  // Finite-size cross-check: both inverses stochastic forces a permutation.
  const PointMapResult det = is_deterministic(k, std::max(tol, kStochasticTol));
  if (!det.deterministic || !injective(*det.map)) {
    throw std::logic_error("is_markov_invertible: stochastic inverse without permutation input");
  }
  return result;
}

std::string_view to_string(KernelClass c) {
  switch (c) {
    case KernelClass::kDeterministicInvertible:
      return "deterministic-invertible";
    case KernelClass::kDeterministicNoninvertible:
      return "deterministic-noninvertible";
    case KernelClass::kRandom:
      return "random";
  }
  return "unknown";
}

KernelClass classify(const MarkovKernel& k, double tol) {
  const PointMapResult det = is_deterministic(k, tol);
  if (!det.deterministic) return KernelClass::kRandom;
  return injective(*det.map) ? KernelClass::kDeterministicInvertible
                             : KernelClass::kDeterministicNoninvertible;
}

}  // namespace markovdyn
