#include <doctest.h>

#include "hfa/errors.hpp"
#include "hfa/interaction.hpp"

using namespace hfa;

TEST_SUITE("core_model") {
  TEST_CASE("next-nearest kernel tables") {
    CHECK(InteractionKernel::next_nearest(2.0).table() == std::vector<double>{2.0, 1.0, 0.5, 0.5});
    CHECK(InteractionKernel::next_nearest(4.0).table() == std::vector<double>{4.0, 2.0, 1.0, 1.0});
    const auto zero = InteractionKernel::next_nearest(0.0);
    CHECK(zero.is_zero());
    CHECK(zero.l1_norm() == 0.0);
  }

  TEST_CASE("l1 norm in one dimension is 2 + 2(1 + 0.5 + 0.5) for q = 2") {
    CHECK(InteractionKernel::next_nearest(2.0).l1_norm(1) == doctest::Approx(6.0));
  }

  TEST_CASE("l1 norm in higher dimensions weights each radius by its shell") {
    // shells in d=2: 1, 4, 8, 12
    CHECK(InteractionKernel::next_nearest(2.0).l1_norm(2) ==
          doctest::Approx(2.0 + 4 * 1.0 + 8 * 0.5 + 12 * 0.5));
  }

  TEST_CASE("evaluation beyond the table is zero and symmetric in sign") {
    const auto w = InteractionKernel::next_nearest(2.0);
    CHECK(w(0) == 2.0);
    CHECK(w(3) == 0.5);
    CHECK(w(-3) == 0.5);
    CHECK(w(4) == 0.0);
    CHECK(w(100) == 0.0);
    CHECK(w.range() == 3);
  }

  TEST_CASE("pair matrix uses the l1 distance") {
    const LatticeBox box({2, 3});
    const auto w = InteractionKernel::next_nearest(2.0);
    const auto pairs = pair_matrix(w, box);
    for (Index i = 0; i < box.size(); ++i) {
      for (Index j = 0; j < box.size(); ++j) CHECK(pairs(i, j) == w(box.l1_distance(i, j)));
    }
  }

  TEST_CASE("empty tables are rejected") {
    CHECK_THROWS(InteractionKernel(std::vector<double>{}));
  }
}

TEST_SUITE("core_model") {
  TEST_CASE("a declared decay bound is enforced on the table") {
    CHECK_NOTHROW(InteractionKernel({1.0, 0.3}, DecayConstants{1.0, 1.0}));
    CHECK_THROWS_AS(InteractionKernel({1.0, 0.5}, DecayConstants{1.0, 1.0}), InvalidArgument);
  }
}
