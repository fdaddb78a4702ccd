#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "fractalgroups/angle.hpp"
#include "fractalgroups/cyclic_order.hpp"

using namespace fractalgroups;

namespace {

// Independent oracle: [a,b,c] holds iff the linear comparisons a<b, b<c,
// c<a contain exactly two ascents. No modular lifting involved.
Orientation oracle_orient(Angle const& a, Angle const& b, Angle const& c) {
  int ascents = int(a < b) + int(b < c) + int(c < a);
  return ascents == 2 ? Orientation::positive : Orientation::negative;
}

// Independent oracle for the separation relation: b and d lie in different
// arcs of the circle cut at {a, c}.
bool oracle_separates(Angle const& a, Angle const& b, Angle const& c,
                      Angle const& d) {
  return in_open_arc(b, a, c) != in_open_arc(d, a, c);
}

std::vector<Angle> grid(int q) {
  std::vector<Angle> out;
  for (int k = 0; k < q; ++k) {
    out.emplace_back(k, q);
  }
  return out;
}

FinitePartialMap map_of(std::vector<std::pair<Angle, Angle>> pairs) {
  return FinitePartialMap(std::move(pairs));
}

}  // namespace

TEST_CASE("orient matches the stated examples", "[cyclic_order]") {
  CHECK(orient(Angle(0, 1), Angle(1, 4), Angle(1, 2)) ==
        Orientation::positive);
  CHECK(orient(Angle(1, 2), Angle(1, 4), Angle(0, 1)) ==
        Orientation::negative);
  // Derived: all three rotations of (3/7, 4/7, 1/7) agree with the oracle.
  Angle a(3, 7), b(4, 7), c(1, 7);
  CHECK(orient(a, b, c) == Orientation::positive);
  CHECK(orient(a, b, c) == oracle_orient(a, b, c));
  CHECK(orient(b, c, a) == oracle_orient(b, c, a));
  CHECK(orient(c, a, b) == oracle_orient(c, a, b));
  CHECK_THROWS_AS(orient(a, a, b), DegenerateTriple);
}

TEST_CASE("orient satisfies the cyclic order axioms exhaustively",
          "[cyclic_order]") {
  auto points = grid(8);
  for (auto const& a : points) {
    for (auto const& b : points) {
      for (auto const& c : points) {
        if (a == b || b == c || a == c) {
          continue;
        }
        auto o = orient(a, b, c);
        CHECK(o == oracle_orient(a, b, c));
        // Cyclicity and asymmetry.
        CHECK(orient(b, c, a) == o);
        CHECK(orient(c, b, a) == opposite(o));
        // Transitivity.
        if (o == Orientation::positive) {
          for (auto const& d : points) {
            if (d == a || d == b || d == c) {
              continue;
            }
            if (orient(a, c, d) == Orientation::positive) {
              CHECK(orient(a, b, d) == Orientation::positive);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("separates agrees with arc membership and is symmetric",
          "[cyclic_order]") {
  CHECK(separates(Angle(0, 1), Angle(1, 4), Angle(1, 2), Angle(3, 4)));
  CHECK_FALSE(separates(Angle(0, 1), Angle(1, 8), Angle(1, 2), Angle(1, 4)));
  CHECK(separates(Angle(0, 1), Angle(1, 8), Angle(1, 4), Angle(1, 2)));

  auto points = grid(7);
  for (auto const& a : points) {
    for (auto const& b : points) {
      for (auto const& c : points) {
        for (auto const& d : points) {
          if (a == b || a == c || a == d || b == c || b == d || c == d) {
            continue;
          }
          bool s = separates(a, b, c, d);
          CHECK(s == oracle_separates(a, b, c, d));
          CHECK(s == separates(c, b, a, d));
          CHECK(s == separates(a, d, c, b));
          CHECK(s == separates(b, a, d, c));
        }
      }
    }
  }
  CHECK_THROWS_AS(separates(Angle(0, 1), Angle(0, 1), Angle(1, 2), Angle(1, 4)),
                  DegenerateQuadruple);
}

TEST_CASE("classify recognizes preserving, reversing and neither",
          "[cyclic_order]") {
  auto identity = map_of({{Angle(0, 1), Angle(0, 1)},
                          {Angle(1, 4), Angle(1, 4)},
                          {Angle(1, 2), Angle(1, 2)}});
  CHECK(classify(identity) == MapKind::preserving);

  // x -> 1 - x fixes 0 and swaps the rest of the circle.
  auto mirror = map_of({{Angle(0, 1), Angle(0, 1)},
                        {Angle(1, 4), Angle(3, 4)},
                        {Angle(1, 2), Angle(1, 2)},
                        {Angle(3, 4), Angle(1, 4)}});
  CHECK(classify(mirror) == MapKind::reversing);

  auto swap = map_of({{Angle(0, 1), Angle(0, 1)},
                      {Angle(1, 4), Angle(1, 2)},
                      {Angle(1, 2), Angle(1, 4)},
                      {Angle(3, 4), Angle(3, 4)}});
  CHECK(classify(swap) == MapKind::neither);

  CHECK_THROWS_AS(classify(map_of({{Angle(0, 1), Angle(1, 2)}})),
                  TooFewPoints);
}

TEST_CASE("monotone maps preserve the separation relation", "[cyclic_order]") {
  std::mt19937_64 rng(271828);
  auto points = grid(16);
  for (int trial = 0; trial < 50; ++trial) {
    // A random rotation of a random subset is order-preserving.
    std::vector<Angle> subset;
    std::sample(points.begin(), points.end(), std::back_inserter(subset), 6,
                rng);
    Angle delta(long(rng() % 16), 16);
    std::vector<std::pair<Angle, Angle>> pairs;
    for (auto const& s : subset) {
      pairs.emplace_back(s, s + delta);
    }
    auto m = map_of(pairs);
    REQUIRE(classify(m) == MapKind::preserving);
    auto const& ps = m.pairs();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      for (std::size_t j = 0; j < ps.size(); ++j) {
        for (std::size_t k = 0; k < ps.size(); ++k) {
          for (std::size_t l = 0; l < ps.size(); ++l) {
            if (i == j || i == k || i == l || j == k || j == l || k == l) {
              continue;
            }
            CHECK(separates(ps[i].first, ps[j].first, ps[k].first,
                            ps[l].first) ==
                  separates(ps[i].second, ps[j].second, ps[k].second,
                            ps[l].second));
          }
        }
      }
    }
  }
}

TEST_CASE("non-monotone injections break separation somewhere",
          "[cyclic_order]") {
  // Exhaustive over all injections of 4-subsets of a small grid: whenever
  // classify says neither, some quadruple witnesses the failure.
  auto points = grid(6);
  std::vector<int> idx = {0, 1, 2, 3};
  std::vector<int> perm;
  int neither_count = 0;
  for (int a = 0; a < 6; ++a) {
    for (int b = a + 1; b < 6; ++b) {
      for (int c = b + 1; c < 6; ++c) {
        for (int d = c + 1; d < 6; ++d) {
          std::vector<Angle> src = {points[a], points[b], points[c],
                                    points[d]};
          perm = idx;
          do {
            std::vector<std::pair<Angle, Angle>> pairs;
            for (int i = 0; i < 4; ++i) {
              pairs.emplace_back(src[i], src[perm[i]]);
            }
            auto m = map_of(pairs);
            if (classify(m) != MapKind::neither) {
              continue;
            }
            ++neither_count;
            bool violated = false;
            auto const& ps = m.pairs();
            for (int i = 0; i < 4 && !violated; ++i) {
              for (int j = 0; j < 4 && !violated; ++j) {
                for (int k = 0; k < 4 && !violated; ++k) {
                  for (int l = 0; l < 4 && !violated; ++l) {
                    if (i == j || i == k || i == l || j == k || j == l ||
                        k == l) {
                      continue;
                    }
                    if (separates(ps[i].first, ps[j].first, ps[k].first,
                                  ps[l].first) !=
                        separates(ps[i].second, ps[j].second, ps[k].second,
                                  ps[l].second)) {
                      violated = true;
                    }
                  }
                }
              }
            }
            CHECK(violated);
          } while (std::next_permutation(perm.begin(), perm.end()));
        }
      }
    }
  }
  CHECK(neither_count > 0);
}

TEST_CASE("two_transitive_witness reproduces the two-piece affine rule",
          "[cyclic_order]") {
  auto id = two_transitive_witness(Angle(0, 1), Angle(1, 2), Angle(0, 1),
                                   Angle(1, 2));
  CHECK(id.is_identity());

  auto w = two_transitive_witness(Angle(0, 1), Angle(1, 4), Angle(0, 1),
                                  Angle(1, 2));
  CHECK(w.apply(Angle(0, 1)) == Angle(0, 1));
  CHECK(w.apply(Angle(1, 4)) == Angle(1, 2));
  CHECK(w.apply(Angle(1, 8)) == Angle(1, 4));

  auto t = two_transitive_witness(Angle(1, 3), Angle(2, 3), Angle(0, 1),
                                  Angle(1, 2));
  CHECK(t.apply(Angle(1, 3)) == Angle(0, 1));
  CHECK(t.apply(Angle(2, 3)) == Angle(1, 2));

  CHECK_THROWS_AS(two_transitive_witness(Angle(0, 1), Angle(0, 1), Angle(0, 1),
                                         Angle(1, 2)),
                  DegeneratePair);

  // The graph of a witness always classifies preserving.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    auto pick = [&rng]() { return Angle(long(rng() % 12), 12); };
    Angle a = pick(), b = pick(), a2 = pick(), b2 = pick();
    if (a == b || a2 == b2) {
      continue;
    }
    auto witness = two_transitive_witness(a, b, a2, b2);
    std::vector<std::pair<Angle, Angle>> graph;
    for (int k = 0; k < 10; ++k) {
      Angle x(k, 10);
      graph.emplace_back(x, witness.apply(x));
    }
    CHECK(classify(map_of(graph)) == MapKind::preserving);
  }
}

TEST_CASE("extend_point picks the canonical interpolated image",
          "[cyclic_order]") {
  auto base = map_of({{Angle(0, 1), Angle(0, 1)}, {Angle(1, 2), Angle(1, 2)}});
  auto extended = extend_point(base, Angle(1, 4));
  CHECK(extended.at(Angle(1, 4)) == Angle(1, 4));

  auto squeezed =
      map_of({{Angle(0, 1), Angle(0, 1)}, {Angle(1, 2), Angle(1, 4)}});
  CHECK(extend_point(squeezed, Angle(1, 4)).at(Angle(1, 4)) == Angle(1, 8));

  auto from_empty = extend_point(FinitePartialMap(), Angle(0, 1));
  CHECK(from_empty.at(Angle(0, 1)) == Angle(0, 1));

  auto bad = map_of({{Angle(0, 1), Angle(0, 1)},
                     {Angle(1, 4), Angle(1, 2)},
                     {Angle(1, 2), Angle(1, 4)},
                     {Angle(3, 4), Angle(3, 4)}});
  CHECK_THROWS_AS(extend_point(bad, Angle(1, 8)), NotMonotone);
}

TEST_CASE("extend_point is canonical across insertion orders",
          "[cyclic_order]") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    auto base =
        map_of({{Angle(0, 1), Angle(1, 6)}, {Angle(1, 2), Angle(5, 6)}});
    std::vector<Angle> xs = {Angle(1, 3), Angle(2, 3), Angle(1, 5),
                             Angle(4, 5)};
    auto forward = base;
    for (auto const& x : xs) {
      forward = extend_point(forward, x);
    }
    std::shuffle(xs.begin(), xs.end(), rng);
    auto shuffled = base;
    for (auto const& x : xs) {
      shuffled = extend_point(shuffled, x);
    }
    CHECK(forward == shuffled);
  }
}

TEST_CASE("cyclic_successor walks the circle", "[cyclic_order]") {
  std::vector<Angle> f = {Angle(0, 1), Angle(1, 4), Angle(1, 2)};
  CHECK(cyclic_successor(f, Angle(0, 1)) == Angle(1, 4));
  CHECK(cyclic_successor(f, Angle(1, 2)) == Angle(0, 1));
  std::vector<Angle> sevenths = {Angle(1, 7), Angle(2, 7), Angle(4, 7)};
  CHECK(cyclic_successor(sevenths, Angle(4, 7)) == Angle(1, 7));
  CHECK_THROWS_AS(cyclic_successor(f, Angle(1, 3)), NotMember);
  CHECK_THROWS_AS(cyclic_successor({Angle(0, 1)}, Angle(0, 1)), Singleton);
}

TEST_CASE("OrderMap composes and inverts exactly", "[cyclic_order]") {
  auto rot = OrderMap::rotation(Angle(1, 3));
  auto pl = OrderMap::preserving(
      {{Angle(0, 1), Angle(0, 1)}, {Angle(1, 4), Angle(1, 2)}});
  auto composite = rot.after(pl);
  for (int k = 0; k < 12; ++k) {
    Angle x(k, 12);
    CHECK(composite.apply(x) == rot.apply(pl.apply(x)));
  }
  CHECK(pl.after(pl.inverse()).is_identity());
  CHECK(pl.inverse().after(pl).is_identity());

  auto refl = OrderMap::reflection();
  CHECK(refl.after(refl).is_identity());
  CHECK(refl.apply(Angle(1, 4)) == Angle(3, 4));

  // Associativity probe.
  auto lhs = rot.after(pl).after(refl);
  auto rhs = rot.after(pl.after(refl));
  CHECK(lhs == rhs);
}
