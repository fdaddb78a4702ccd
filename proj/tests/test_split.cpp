#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "fractalgroups/angle.hpp"
#include "fractalgroups/cyclic_order.hpp"
#include "fractalgroups/split.hpp"

using namespace fractalgroups;

TEST_CASE("split without doubled points is the plain configuration",
          "[split]") {
  auto out = split({Angle(0, 1), Angle(1, 2)}, {});
  REQUIRE(out.size() == 2);
  CHECK(out[0] == SplitPoint{Angle(0, 1), SplitSide::plain});
  CHECK(out[1] == SplitPoint{Angle(1, 2), SplitSide::plain});
}

TEST_CASE("split doubles each marked point into an adjacent pair", "[split]") {
  auto out = split({Angle(0, 1), Angle(1, 2)}, {Angle(0, 1)});
  REQUIRE(out.size() == 3);
  CHECK(out[0] == SplitPoint{Angle(0, 1), SplitSide::minus});
  CHECK(out[1] == SplitPoint{Angle(0, 1), SplitSide::plus});
  CHECK(out[2] == SplitPoint{Angle(1, 2), SplitSide::plain});
  // 0+ is the cyclic successor of 0-: nothing lies strictly between them.
  for (auto const& p : out) {
    if (p == out[0] || p == out[1]) {
      continue;
    }
    CHECK(split_orient(out[0], out[1], p) == Orientation::positive);
  }
}

TEST_CASE("split of a three-point configuration", "[split]") {
  auto out =
      split({Angle(0, 1), Angle(1, 3), Angle(2, 3)}, {Angle(1, 3), Angle(2, 3)});
  REQUIRE(out.size() == 5);
  SplitPoint plain0{Angle(0, 1), SplitSide::plain};
  SplitPoint third_minus{Angle(1, 3), SplitSide::minus};
  SplitPoint two_thirds_plus{Angle(2, 3), SplitSide::plus};
  CHECK(split_orient(plain0, third_minus, two_thirds_plus) ==
        Orientation::positive);
  CHECK_THROWS_AS(split({Angle(0, 1)}, {Angle(1, 2)}), NotSubset);
}

TEST_CASE("split output satisfies the cyclic order axioms and projects",
          "[split]") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Angle> points;
    int n = 3 + int(rng() % 5);
    for (int k = 0; k < 24 && int(points.size()) < n; ++k) {
      Angle candidate(long(rng() % 24), 24);
      if (std::find(points.begin(), points.end(), candidate) == points.end()) {
        points.push_back(candidate);
      }
    }
    std::vector<Angle> marked;
    for (auto const& p : points) {
      if (rng() % 2 == 0) {
        marked.push_back(p);
      }
    }
    auto out = split(points, marked);
    REQUIRE(out.size() == points.size() + marked.size());

    // Cyclic order axioms on all triples of the split configuration.
    for (auto const& a : out) {
      for (auto const& b : out) {
        for (auto const& c : out) {
          if (a == b || b == c || a == c) {
            continue;
          }
          auto o = split_orient(a, b, c);
          CHECK(split_orient(b, c, a) == o);
          CHECK(split_orient(c, b, a) == opposite(o));
          if (o == Orientation::positive) {
            for (auto const& d : out) {
              if (d == a || d == b || d == c) {
                continue;
              }
              if (split_orient(a, c, d) == Orientation::positive) {
                CHECK(split_orient(a, b, d) == Orientation::positive);
              }
            }
          }
        }
      }
    }

    // The forgetful map to bases weakly preserves the cyclic order.
    for (auto const& a : out) {
      for (auto const& b : out) {
        for (auto const& c : out) {
          if (a == b || b == c || a == c) {
            continue;
          }
          Angle ba = split_base(a), bb = split_base(b), bc = split_base(c);
          if (ba == bb || bb == bc || ba == bc) {
            continue;
          }
          CHECK(split_orient(a, b, c) == orient(ba, bb, bc));
        }
      }
    }

    // Doubled pairs are adjacent: nothing lies strictly between a- and a+.
    for (auto const& a : marked) {
      SplitPoint lo{a, SplitSide::minus};
      SplitPoint hi{a, SplitSide::plus};
      for (auto const& p : out) {
        if (p == lo || p == hi) {
          continue;
        }
        CHECK(split_orient(lo, hi, p) == Orientation::positive);
      }
    }
  }
}
