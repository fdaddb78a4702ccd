#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fractalgroups/dendrite.hpp"
#include "fractalgroups/dendrite_element.hpp"
#include "fractalgroups/embedding.hpp"
#include "fractalgroups/tree_random.hpp"

using namespace fractalgroups;

namespace {

// Independent oracle: the unique node lying on all three pairwise paths.
int center_oracle(DendriteApprox const& d, int x, int y, int z) {
  auto xy = d.path(x, y);
  auto yz = d.path(y, z);
  auto xz = d.path(x, z);
  int found = -1;
  for (int p = 0; p < int(d.size()); ++p) {
    bool on_all = std::count(xy.begin(), xy.end(), p) &&
                  std::count(yz.begin(), yz.end(), p) &&
                  std::count(xz.begin(), xz.end(), p);
    if (on_all) {
      REQUIRE(found == -1);
      found = p;
    }
  }
  REQUIRE(found != -1);
  return found;
}

// Random refinements and sprouts to grow a test approximation.
void grow(DendriteApprox& d, std::mt19937_64& rng, int steps) {
  for (int i = 0; i < steps; ++i) {
    int b = int(rng() % d.size());
    if (d.segment_count() > 0 && rng() % 2 == 0) {
      int other = int(rng() % d.size());
      if (other != b) {
        Angle i1 = d.fresh_chart_color(b);
        d.refine_between(b, other, i1, i1 + Angle(1, 7));
        continue;
      }
    }
    d.sprout(b, d.fresh_chart_color(b), Angle(0, 1), Rational(1));
  }
}

}  // namespace

TEST_CASE("center: tripod and random configurations", "[dendrites]") {
  DendriteApprox d;
  int hub = 0;
  int l1 = d.sprout(hub, Angle(0, 1), Angle(0, 1), Rational(1));
  int l2 = d.sprout(hub, Angle(1, 3), Angle(0, 1), Rational(1));
  int l3 = d.sprout(hub, Angle(2, 3), Angle(0, 1), Rational(1));
  CHECK(d.center(l1, l2, l3) == hub);
  // A point on the arc [y,z] is its own center with y and z.
  CHECK(d.center(hub, l2, l3) == hub);

  std::mt19937_64 rng(42);
  grow(d, rng, 30);
  for (int trial = 0; trial < 50; ++trial) {
    int x = int(rng() % d.size());
    int y = int(rng() % d.size());
    int z = int(rng() % d.size());
    if (x == y || y == z || x == z) {
      continue;
    }
    CHECK(d.center(x, y, z) == center_oracle(d, x, y, z));
  }
}

TEST_CASE("close_up adds exactly the missing hubs", "[dendrites]") {
  DendriteApprox d;
  int hub = 0;
  int l1 = d.sprout(hub, Angle(0, 1), Angle(0, 1), Rational(1));
  int l2 = d.sprout(hub, Angle(1, 3), Angle(0, 1), Rational(1));
  int l3 = d.sprout(hub, Angle(2, 3), Angle(0, 1), Rational(1));
  CHECK(d.is_center_closed({l1, l2}));
  CHECK_FALSE(d.is_center_closed({l1, l2, l3}));
  auto closed = d.close_up({l1, l2, l3});
  CHECK(closed.size() == 4);
  CHECK(d.is_center_closed(closed));

  std::mt19937_64 rng(4242);
  grow(d, rng, 25);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> f;
    for (int i = 0; i < 4; ++i) {
      f.push_back(int(rng() % d.size()));
    }
    auto once = d.close_up(f);
    CHECK(d.is_center_closed(once));
    auto twice = d.close_up(once);
    CHECK(twice.size() == once.size());
  }
}

TEST_CASE("refine_between inserts separators with the requested charts",
          "[dendrites]") {
  DendriteApprox d;
  int b1 = 0;
  int b2 = d.sprout(b1, Angle(1, 2), Angle(1, 2), Rational(1));
  int m = d.refine_between(b1, b2, Angle(0, 1), Angle(1, 2));
  CHECK(d.between(b1, m, b2));
  CHECK(d.chart_towards(m, d.path(m, b1)[1]) == Angle(0, 1));
  CHECK(d.chart_towards(m, d.path(m, b2)[1]) == Angle(1, 2));
  // Prior charts unchanged.
  CHECK(d.chart_towards(b1, d.path(b1, m)[1]) == Angle(1, 2));

  CHECK_THROWS_AS(d.refine_between(b1, b1, Angle(0, 1), Angle(1, 2)),
                  SamePoint);
  CHECK_THROWS_AS(d.refine_between(b1, b2, Angle(0, 1), Angle(0, 1)),
                  SameColor);
}

TEST_CASE("refinement with all color pairs stays on the arc", "[dendrites]") {
  DendriteApprox d;
  int b1 = 0;
  int b2 = d.sprout(b1, Angle(1, 2), Angle(1, 2), Rational(1));
  std::vector<Angle> colors = {Angle(0, 1), Angle(1, 4), Angle(1, 2),
                               Angle(3, 4)};
  std::vector<int> created;
  for (auto const& i : colors) {
    for (auto const& j : colors) {
      if (i == j) {
        continue;
      }
      created.push_back(d.refine_between(b1, b2, i, j));
    }
  }
  CHECK(created.size() == 12);
  for (int m : created) {
    CHECK(d.between(b1, m, b2));
  }
}

TEST_CASE("refinement preserves centers of existing points", "[dendrites]") {
  DendriteApprox d;
  std::mt19937_64 rng(7);
  grow(d, rng, 20);
  std::vector<std::array<int, 4>> samples;
  for (int trial = 0; trial < 20; ++trial) {
    int x = int(rng() % d.size());
    int y = int(rng() % d.size());
    int z = int(rng() % d.size());
    if (x == y || y == z || x == z) {
      continue;
    }
    samples.push_back({x, y, z, d.center(x, y, z)});
  }
  grow(d, rng, 15);
  for (auto const& [x, y, z, c] : samples) {
    CHECK(d.center(x, y, z) == c);
  }
}

TEST_CASE("patchwork identity and the branch-exchanging involution",
          "[dendrites]") {
  DendriteApprox d;
  auto id = DendriteElement::patchwork(d, {0}, {0}, {{0, 0}});
  std::mt19937_64 rng(77);
  grow(d, rng, 20);
  for (int v = 0; v < int(d.size()); ++v) {
    CHECK(id.evaluate(d, v) == v);
  }

  // Involution exchanging the branches colored 1/3 and 2/3 at the base.
  std::map<int, OrderMap> rule = {{0, OrderMap::reflection()}};
  auto h = DendriteElement::patchwork(d, {0}, {0}, {{0, 0}}, rule);
  CHECK(h.action_at(0).reversing());
  CHECK(h.kaleidoscopic_membership(DenseGroup::aut_separation));
  CHECK_FALSE(h.kaleidoscopic_membership(DenseGroup::aut_orientation));

  std::size_t materialized = d.size();
  for (std::size_t v = 0; v < materialized; ++v) {
    int w = h.evaluate(d, int(v));
    CHECK(h.evaluate(d, w) == int(v));
  }
  CHECK(materialized >= 20);
}

TEST_CASE("patchwork composes with its inverse pointwise", "[dendrites]") {
  DendriteApprox d;
  std::mt19937_64 rng(123);
  grow(d, rng, 15);
  // A two-point swap: the arc between the points reverses affinely.
  int a = 0;
  int b = int(d.size() - 1);
  if (b == a) {
    b = d.sprout(a, d.fresh_chart_color(a), Angle(0, 1), Rational(1));
  }
  auto h = DendriteElement::patchwork(d, {a, b}, {a, b}, {{a, b}, {b, a}});
  auto hinv = h.inverse();
  std::size_t materialized = d.size();
  for (std::size_t v = 0; v < materialized; ++v) {
    CHECK(hinv.evaluate(d, h.evaluate(d, int(v))) == int(v));
  }

  // Composition with the inverse is the identity element on the domain.
  auto comp = h.after(d, hinv);
  for (int v : comp.domain()) {
    CHECK(comp.image_of(v) == v);
  }
}

TEST_CASE("patchwork rejects arity mismatches", "[dendrites]") {
  DendriteApprox d;
  int hub = 0;
  int l1 = d.sprout(hub, Angle(0, 1), Angle(0, 1), Rational(1));
  int l2 = d.sprout(hub, Angle(1, 3), Angle(0, 1), Rational(1));
  int l3 = d.sprout(hub, Angle(2, 3), Angle(0, 1), Rational(1));
  // A chain to host the faulty image.
  int c1 = d.sprout(l1, Angle(1, 7), Angle(2, 7), Rational(1));
  // hub has three branches towards l1,l2,l3; map it onto c1 which splits
  // its domain neighbours across only two branches.
  CHECK_THROWS_AS(
      DendriteElement::patchwork(d, {hub, l1, l2, l3}, {c1, hub, l1, l2},
                                 {{hub, c1}, {l1, hub}, {l2, l1}, {l3, l2}}),
      NotPartialHomomorphism);
}

TEST_CASE("embedding: sizes, betweenness and colors", "[dendrites][embed]") {
  DendriteApprox d0;
  auto phi0 = EmbeddingRecord::embed_tree(3, 0, d0);
  CHECK(phi0.images().size() == 1);

  DendriteApprox d;
  auto phi = EmbeddingRecord::embed_tree(3, 2, d);
  CHECK(phi.images().size() == 1 + 3 + 6);
  CHECK(phi.betweenness_holds(d));
  CHECK(phi.colors_hold(d));

  CHECK_THROWS_AS(EmbeddingRecord::embed_tree(2, 2, d), BadArity);
}

TEST_CASE("lift: identity, local actions and multiplicativity",
          "[dendrites][lift]") {
  DendriteApprox d;
  auto phi = EmbeddingRecord::embed_tree(3, 3, d);
  auto shape = phi.tree_shape();

  auto lifted_id = lift(d, TreeElement::identity(shape), phi);
  for (auto const& [v, b] : phi.images()) {
    CHECK(lifted_id.image_of(b) == b);
  }

  std::mt19937_64 rng(2025);
  for (int trial = 0; trial < 6; ++trial) {
    TreeElement g = random_element(shape, 2, 3, EarGroup::cyclic,
                                   DenseGroup::aut_orientation, rng);
    TreeElement h = random_element(shape, 2, 3, EarGroup::cyclic,
                                   DenseGroup::aut_orientation, rng);
    auto lg = lift(d, g, phi);
    auto lh = lift(d, h, phi);
    auto lgh = lift(d, g.after(h), phi);

    // The local action at an image point matches the tree local action.
    for (auto const& [v, b] : phi.images()) {
      CHECK(lg.action_at(b) == phi.recode_action(g.local_action(v).ear_perm()));
    }

    // phi(g) phi(h) = phi(gh) pointwise on materialized branch points.
    auto composed = lg.after(d, lh);
    std::size_t materialized = d.size();
    for (std::size_t v = 0; v < materialized && v < 120; ++v) {
      CHECK(composed.evaluate(d, int(v)) == lgh.evaluate(d, int(v)));
    }

    // Functoriality of inversion.
    auto lginv = lift(d, g.inverse(), phi);
    auto inv = lg.inverse();
    for (std::size_t v = 0; v < materialized && v < 120; ++v) {
      CHECK(inv.evaluate(d, int(v)) == lginv.evaluate(d, int(v)));
    }

    // Lifts of orientation-preserving elements are kaleidoscopic members.
    CHECK(lg.kaleidoscopic_membership(DenseGroup::aut_orientation));
  }
}

TEST_CASE("lift rejects supports beyond the embedded depth",
          "[dendrites][lift]") {
  DendriteApprox d;
  auto phi = EmbeddingRecord::embed_tree(3, 2, d);
  auto shape = phi.tree_shape();
  std::mt19937_64 rng(5);
  TreeElement deep = random_element(shape, 4, 3, EarGroup::cyclic,
                                    DenseGroup::aut_orientation, rng);
  CHECK_THROWS_AS(lift(d, deep, phi), SupportExceedsDepth);
}

TEST_CASE("dendrite elements preserve betweenness on materialized points",
          "[dendrites]") {
  DendriteApprox d;
  auto phi = EmbeddingRecord::embed_tree(3, 2, d);
  auto shape = phi.tree_shape();
  std::mt19937_64 rng(31);
  TreeElement g = random_element(shape, 2, 3, EarGroup::cyclic,
                                 DenseGroup::aut_orientation, rng);
  auto lg = lift(d, g, phi);
  std::size_t materialized = d.size();
  std::vector<int> images;
  for (std::size_t v = 0; v < materialized; ++v) {
    images.push_back(lg.evaluate(d, int(v)));
  }
  for (int x = 0; x < int(materialized); ++x) {
    for (int p = 0; p < int(materialized); ++p) {
      for (int y = 0; y < int(materialized); ++y) {
        if (x == p || p == y || x == y) {
          continue;
        }
        CHECK(d.between(x, p, y) == d.between(images[x], images[p], images[y]));
      }
    }
  }
}
