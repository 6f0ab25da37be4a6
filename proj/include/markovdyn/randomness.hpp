#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "markovdyn/markov_kernel.hpp"

namespace markovdyn {

// Witnessed homomorphism defect: the largest one-step conditional variance
// L(f^2)(x) - (Lf)(x)^2 over states x and +-1 observables f. Zero exactly for
// deterministic kernels.
struct DefectReport {
  double defect = 0.0;
  Observable witness_f;
  int witness_x = 0;
};

// Exhaustive maximization over the 2^n sign vectors. The sup over the full
// sup-norm unit ball reduces to sign vectors: for fixed x the objective is a
// convex quadratic in f, so the box maximum sits at a vertex. Refuses n
// beyond max_states. The witness is the lexicographically smallest (x, f)
// attaining the maximum, with +1 ordered before -1 coordinate-wise.
DefectReport homomorphism_defect(const MarkovKernel& k, int max_states = 20);

// Determinism test through the *-homomorphism characterization; agrees with
// the direct Dirac-row check on every kernel.
bool is_deterministic_via_homomorphism(const MarkovKernel& k, double tol = 1e-9);

struct MarkovInvertibility {
  // Invertible within the category of Markov operators: the matrix inverse
  // exists and is itself row-stochastic (within tol).
  bool invertible = false;
  bool matrix_invertible = false;
  // Row-major matrix inverse when it exists (also when not stochastic, so
  // rejections can report it); empty for singular kernels.
  std::vector<double> matrix_inverse;
  // The inverse kernel, present exactly when invertible.
  std::optional<MarkovKernel> inverse;
};

// At finite size Markov-invertibility holds iff the kernel is a permutation
// matrix; the implementation cross-checks that equivalence.
MarkovInvertibility is_markov_invertible(const MarkovKernel& k, double tol = 1e-9);

enum class KernelClass {
  kDeterministicInvertible,     // permutation: a reversible dynamical system
  kDeterministicNoninvertible,  // Dirac rows with a non-injective point map
  kRandom,                      // positive homomorphism defect
};

std::string_view to_string(KernelClass c);

KernelClass classify(const MarkovKernel& k, double tol = 1e-9);

}  // namespace markovdyn
