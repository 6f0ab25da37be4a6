#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "markovdyn/dilation.hpp"
#include "markovdyn/rng.hpp"
#include "test_support.hpp"

using namespace markovdyn;
using markovdyn::testing::random_kernel;
using markovdyn::testing::rotation_kernel;
using markovdyn::testing::rotation_system;
using markovdyn::testing::swap_kernel;

TEST_CASE("reduce of the anticlockwise rotation") {
  const ProductDynamicalSystem sys = rotation_system();
  const MarkovKernel L = reduce(sys);
  CHECK(markovdyn::testing::max_abs_diff(L, rotation_kernel()) <= 1e-12);

  SUBCASE("the square of the rotation reduces to the swap matrix") {
    const MarkovKernel L2 = reduce(iterate(sys, 2));
    CHECK(markovdyn::testing::max_abs_diff(L2, swap_kernel()) <= 1e-12);
  }
  SUBCASE("X(x,y) = x reduces to the identity") {
    const StateSpace s = StateSpace::indexed(2);
    EnvironmentSpace env({"e0", "e1"}, {0.25, 0.75});
    const ProductDynamicalSystem trivial(s, env, {0, 0, 1, 1}, {0, 1, 0, 1});
    CHECK(markovdyn::testing::max_abs_diff(reduce(trivial), MarkovKernel::identity(s)) == 0.0);
  }
}

TEST_CASE("iterate") {
  const ProductDynamicalSystem sys = rotation_system();

  SUBCASE("the squared rotation X-map, hand-enumerated (0-based)") {
    const ProductDynamicalSystem sq = iterate(sys, 2);
    CHECK(sq.x_map(0, 0) == 1);  // X2(1,1) = 2
    CHECK(sq.x_map(1, 0) == 0);  // X2(2,1) = 1
    CHECK(sq.x_map(1, 1) == 0);  // X2(2,2) = 1
    CHECK(sq.x_map(0, 1) == 1);  // X2(1,2) = 2
  }
  SUBCASE("iterate(sys, 1) is sys") {
    const ProductDynamicalSystem one = iterate(sys, 1);
    CHECK(one.x_table() == sys.x_table());
    CHECK(one.y_table() == sys.y_table());
  }
  SUBCASE("iterating the system does not dilate the semigroup") {
    const MarkovKernel l2_system = reduce(iterate(sys, 2));
    const MarkovKernel l2_kernel = power(reduce(sys), 2);
    CHECK(markovdyn::testing::max_abs_diff(l2_system, l2_kernel) > 0.4);
  }
  SUBCASE("m must be positive") { CHECK_THROWS_AS(iterate(sys, 0), std::invalid_argument); }
}

TEST_CASE("dilate on hand-enumerable kernels") {
  SUBCASE("identity on 2 states: the identity function carries all the mass") {
    const ProductDynamicalSystem sys = dilate(MarkovKernel::identity(StateSpace::indexed(2)));
    REQUIRE(sys.env_points() == 4);
    // Lexicographic function order: (0,0), (0,1), (1,0), (1,1).
    CHECK(sys.env().weight(0) == 0.0);
    CHECK(sys.env().weight(1) == 1.0);  // identity map y(0)=0, y(1)=1
    CHECK(sys.env().weight(2) == 0.0);
    CHECK(sys.env().weight(3) == 0.0);
  }
  SUBCASE("uniform 2-state kernel: all four functions weigh 1/4") {
    const MarkovKernel u =
        MarkovKernel::from_rows(StateSpace::indexed(2), {{0.5, 0.5}, {0.5, 0.5}});
    const ProductDynamicalSystem sys = dilate(u);
    for (int y = 0; y < 4; ++y) CHECK(sys.env().weight(y) == 0.25);
    CHECK(markovdyn::testing::max_abs_diff(reduce(sys), u) <= 1e-12);
  }
  SUBCASE("rotation kernel: product weights (9/16, 3/16, 3/16, 1/16)") {
    const MarkovKernel L = rotation_kernel();
    const ProductDynamicalSystem sys = dilate(L);
    CHECK(sys.env().weight(0) == doctest::Approx(9.0 / 16).epsilon(1e-14));
    CHECK(sys.env().weight(1) == doctest::Approx(3.0 / 16).epsilon(1e-14));
    CHECK(sys.env().weight(2) == doctest::Approx(3.0 / 16).epsilon(1e-14));
    CHECK(sys.env().weight(3) == doctest::Approx(1.0 / 16).epsilon(1e-14));
    CHECK(markovdyn::testing::max_abs_diff(reduce(sys), L) <= 1e-12);
    // T(x,y) = (y(x), y): the environment never moves.
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 4; ++y) CHECK(sys.y_map(x, y) == y);
    }
  }
  SUBCASE("size cap refuses huge environments") {
    auto stream = rng::RandomStream(1);
    const MarkovKernel big = markovdyn::testing::random_permutation_kernel(9, stream);
    CHECK_THROWS_AS(dilate(big), std::length_error);  // 9^9 functions
    CHECK_THROWS_AS(dilate(rotation_kernel(), 3), std::length_error);
  }
}

TEST_CASE("dilation round trip on random kernels") {
  auto stream = rng::RandomStream(77);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 3;  // 2..4
    const MarkovKernel k = random_kernel(n, stream);
    const ProductDynamicalSystem sys = dilate(k);

    CHECK(markovdyn::testing::max_abs_diff(reduce(sys), k) <= 1e-12);

    // mu is a probability measure: sum of the product weights is 1.
    double mass = 0.0;
    for (int y = 0; y < sys.env_points(); ++y) mass += sys.env().weight(y);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("iterating a dilation dilates the semigroup only in trivial cases") {
  auto stream = rng::RandomStream(31415);

  SUBCASE("one application always returns the kernel") {
    for (int trial = 0; trial < 10; ++trial) {
      const MarkovKernel k = random_kernel(2 + trial % 3, stream);
      CHECK(markovdyn::testing::max_abs_diff(reduce(iterate(dilate(k), 1)), k) <= 1e-12);
    }
  }
  SUBCASE("deterministic kernels: iterates reduce to kernel powers") {
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 2 + trial % 3;
      const MarkovKernel k = markovdyn::testing::random_deterministic_kernel(n, stream);
      const ProductDynamicalSystem sys = dilate(k);
      for (int m = 2; m <= 3; ++m) {
        CHECK(markovdyn::testing::max_abs_diff(reduce(iterate(sys, m)), power(k, m)) <= 1e-12);
      }
    }
  }
  SUBCASE("the rotation dilation breaks at m = 2") {
    const MarkovKernel L = rotation_kernel();
    const ProductDynamicalSystem sys = dilate(L);
    CHECK(markovdyn::testing::max_abs_diff(reduce(iterate(sys, 2)), power(L, 2)) > 0.01);
  }
}

TEST_CASE("reduce ignores the Y component") {
  auto stream = rng::RandomStream(1234);
  const MarkovKernel k = random_kernel(3, stream);
  const ProductDynamicalSystem sys = dilate(k);

  // Scramble y_map arbitrarily; the reduction cannot change.
  std::vector<int> scrambled = sys.y_table();
  for (auto& v : scrambled) {
    v = static_cast<int>(stream.uniform() * sys.env_points()) % sys.env_points();
  }
  const ProductDynamicalSystem scrambled_sys(sys.system_space(), sys.env(), sys.x_table(),
                                             scrambled);
  CHECK(markovdyn::testing::max_abs_diff(reduce(scrambled_sys), reduce(sys)) == 0.0);
}

namespace {

// Exhaustive bijectivity check of the full map (x, y') -> T'(x, y') on
// E x F'.
bool is_bijection(const ProductDynamicalSystem& sys) {
  const int n = sys.states();
  const int m = sys.env_points();
  std::set<std::pair<int, int>> image;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < m; ++y) image.insert(sys.apply(x, y));
  }
  return static_cast<int>(image.size()) == n * m;
}

}  // namespace

TEST_CASE("invertible dilation") {
  SUBCASE("reduces to the original kernel (rotation matrix, x0 = 0)") {
    const MarkovKernel L = rotation_kernel();
    const ProductDynamicalSystem sys = dilate_invertible(L, 0);
    CHECK(markovdyn::testing::max_abs_diff(reduce(sys), L) <= 1e-12);
    CHECK(is_bijection(sys));
  }
  SUBCASE("bijective for random kernels and every anchor state") {
    auto stream = rng::RandomStream(4242);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + trial % 2;
      const MarkovKernel k = random_kernel(n, stream);
      for (int x0 = 0; x0 < n; ++x0) {
        const ProductDynamicalSystem sys = dilate_invertible(k, x0);
        CHECK(is_bijection(sys));
        CHECK(markovdyn::testing::max_abs_diff(reduce(sys), k) <= 1e-12);
      }
    }
  }
  SUBCASE("the overlapping case z = y(x) = x0 keeps the map bijective") {
    // Deterministic kernels hit y(x) = x0 constantly.
    const StateSpace s = StateSpace::indexed(2);
    const MarkovKernel constant = MarkovKernel::from_point_map(s, {0, 0});
    for (int x0 = 0; x0 < 2; ++x0) {
      const ProductDynamicalSystem sys = dilate_invertible(constant, x0);
      CHECK(is_bijection(sys));
      CHECK(markovdyn::testing::max_abs_diff(reduce(sys), constant) <= 1e-12);
    }
  }
  SUBCASE("x0 must be a state") {
    CHECK_THROWS_AS(dilate_invertible(rotation_kernel(), 5), std::invalid_argument);
  }
}
