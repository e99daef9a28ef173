#include <catch_amalgamated.hpp>

#include <cmath>

#include "gradest/rng.hpp"

using gradest::Stream;

TEST_CASE("streams are reproducible from their key") {
  Stream a(99);
  Stream b(99);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.normal() == b.normal());
  }
  Stream c = Stream(99).child(3).child(7);
  Stream d = Stream(99).child(3).child(7);
  CHECK(c.key() == d.key());
  CHECK(c.uniform() == d.uniform());
}

TEST_CASE("children and seeds give distinct sequences") {
  Stream root(1);
  CHECK(root.child(0).uniform() != root.child(1).uniform());
  CHECK(Stream(1).uniform() != Stream(2).uniform());
  CHECK(root.child(0).uniform() != Stream(1).uniform());
}

TEST_CASE("child does not advance the parent") {
  Stream a(5);
  Stream b(5);
  (void)a.child(0);
  CHECK(a.uniform() == b.uniform());
}

TEST_CASE("bernoulli with p = 1 consumes nothing") {
  Stream a(8);
  Stream b(8);
  CHECK(a.bernoulli(1.0));
  CHECK(a.uniform() == b.uniform());
}

TEST_CASE("draws have the right first two moments") {
  Stream s(2024);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, se = 0, sb = 0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = s.normal();
    sn += z;
    sn2 += z * z;
    se += s.exponential();
    sb += s.bernoulli(0.25) ? 1.0 : 0.0;
  }
  CHECK(std::abs(su / n - 0.5) < 0.005);
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(std::abs(sn2 / n - 1.0) < 0.015);
  CHECK(std::abs(se / n - 1.0) < 0.01);
  CHECK(std::abs(sb / n - 0.25) < 0.005);
}
