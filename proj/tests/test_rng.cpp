#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <vector>

#include "mmpo/rng.hpp"

using mmpo::RngStream;

TEST_CASE("streams are reproducible") {
  RngStream a = RngStream::root(42).child("rollout", 3);
  RngStream b = RngStream::root(42).child("rollout", 3);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("child streams differ by tag and index") {
  const RngStream root = RngStream::root(7);
  std::set<std::uint64_t> keys;
  keys.insert(root.child("task-gen", 0).key());
  keys.insert(root.child("task-gen", 1).key());
  keys.insert(root.child("rollout", 0).key());
  keys.insert(root.child("rollout", 1).key());
  keys.insert(root.child("optimizer", 0).key());
  CHECK(keys.size() == 5);
}

TEST_CASE("next_double stays in [0,1)") {
  RngStream s = RngStream::root(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("next_below respects the bound and covers small ranges") {
  RngStream s = RngStream::root(2);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const auto v = s.next_below(5);
    REQUIRE(v < 5);
    counts[v]++;
  }
  for (int c : counts) CHECK(c > 800);  // roughly uniform
}

TEST_CASE("sample_categorical matches the cumulative rule") {
  RngStream s = RngStream::root(3);
  const std::vector<double> probs{0.0, 0.5, 0.5, 0.0};
  for (int i = 0; i < 1000; ++i) {
    const int v = s.sample_categorical(probs);
    CHECK((v == 1 || v == 2));
  }
}

TEST_CASE("sample_categorical skips zero-probability tails") {
  RngStream s = RngStream::root(4);
  const std::vector<double> probs{1.0, 0.0};
  for (int i = 0; i < 100; ++i) {
    CHECK(s.sample_categorical(probs) == 0);
  }
}
