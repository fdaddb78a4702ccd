#pragma once

#include <memory>
#include <random>
#include <vector>

#include "fractalgroups/tree.hpp"
#include "fractalgroups/tree_element.hpp"

namespace fractalgroups {

namespace detail {

inline Angle random_angle(std::mt19937_64& rng) {
  long den = 2 + long(rng() % 23);
  long num = long(rng() % den);
  return Angle(num, den);
}

inline EarPerm random_ear_through(int n, int from, int to, EarGroup group,
                                  std::mt19937_64& rng) {
  switch (group) {
    case EarGroup::trivial:
      return EarPerm::identity(n);
    case EarGroup::cyclic:
      return EarPerm::rotation(n, to - from);
    default: {
      std::vector<int> img(n);
      std::iota(img.begin(), img.end(), 1);
      std::shuffle(img.begin(), img.end(), rng);
      // Force from -> to by swapping the current preimage of `to`.
      int at = 0;
      for (int i = 0; i < n; ++i) {
        if (img[i] == to) {
          at = i;
        }
      }
      std::swap(img[at], img[from - 1]);
      return EarPerm::from_images(std::move(img));
    }
  }
}

// A random orientation-preserving map fixing `fixed`, pinned at a few
// further sample points.
inline OrderMap random_preserving_fixing(Angle const& fixed,
                                         std::mt19937_64& rng) {
  std::vector<std::pair<Angle, Angle>> pins = {{fixed, fixed}};
  int extra = int(rng() % 3);
  std::vector<Angle> sources, targets;
  for (int i = 0; i < extra; ++i) {
    sources.push_back(random_angle(rng));
    targets.push_back(random_angle(rng));
  }
  auto arc_pos = [&fixed](Angle const& a) {
    return frac_mod_one(a.value() - fixed.value());
  };
  auto by_arc = [&](Angle const& l, Angle const& r) {
    return arc_pos(l) < arc_pos(r);
  };
  std::sort(sources.begin(), sources.end(), by_arc);
  std::sort(targets.begin(), targets.end(), by_arc);
  for (int i = 0; i < extra; ++i) {
    if (sources[i] == fixed || targets[i] == fixed) {
      return OrderMap::identity();
    }
  }
  for (int i = 0; i + 1 < extra; ++i) {
    if (sources[i] == sources[i + 1] || targets[i] == targets[i + 1]) {
      return OrderMap::identity();
    }
  }
  for (int i = 0; i < extra; ++i) {
    pins.emplace_back(sources[i], targets[i]);
  }
  return OrderMap::preserving(std::move(pins));
}

inline OrderMap random_dense_through(Angle const& from, Angle const& to,
                                     DenseGroup group, std::mt19937_64& rng) {
  if (group == DenseGroup::trivial) {
    return OrderMap::identity();
  }
  OrderMap base = OrderMap::rotation(to - from).after(
      random_preserving_fixing(from, rng));
  if (group == DenseGroup::aut_separation && rng() % 3 == 0) {
    // Reverse through the same pair.
    return OrderMap::reversing({{from, to}})
        .after(random_preserving_fixing(from, rng));
  }
  return base;
}

inline LocalAction random_action_through(Palette const& palette,
                                         Color const& from, Color const& to,
                                         EarGroup n_group, DenseGroup m_group,
                                         std::mt19937_64& rng) {
  if (palette.kind == PaletteKind::ears) {
    return LocalAction::ears(random_ear_through(
        palette.arity, from.ear_index(), to.ear_index(), n_group, rng));
  }
  return LocalAction::dense(
      random_dense_through(from.angle(), to.angle(), m_group, rng));
}

}  // namespace detail

// A random element of the universal group with the prescribed local
// actions, supported on the ball of the given radius. Consistency is kept
// by choosing, at each vertex, a random group element through the forced
// inbound-color pair.
inline TreeElement random_element(std::shared_ptr<TreeShape const> const& shape,
                                  int radius, int cap, EarGroup n_group,
                                  DenseGroup m_group, std::mt19937_64& rng) {
  TruncatedTree ball(shape, radius, cap);
  TreeElement::ActionMap actions;
  std::vector<VertexAddress> images(ball.size());

  // Root: any group element of the root palette.
  Palette const& root_palette = shape->root_palette;
  Color seed = root_palette.kind == PaletteKind::ears
                   ? Color::ear(1 + int(rng() % root_palette.arity))
                   : Color::dense(detail::random_angle(rng));
  Color seed_from = root_palette.kind == PaletteKind::ears
                        ? Color::ear(1)
                        : Color::dense(Angle());
  actions.emplace(VertexAddress(),
                  detail::random_action_through(root_palette, seed_from, seed,
                                                n_group, m_group, rng));
  images[0] = VertexAddress();

  for (std::size_t i = 1; i < ball.size(); ++i) {
    auto const& node = ball.node(int(i));
    VertexAddress const& v = node.addr;
    VertexAddress const& parent = ball.node(node.parent).addr;
    VertexAddress const& parent_image = images[node.parent];
    LocalAction const& parent_action = actions.at(parent);
    Color image_color = parent_action.apply(v.last_letter());
    images[i] = step(*shape, parent_image, image_color);
    Color from = in_color(*shape, parent);
    Color to = in_color(*shape, parent_image);
    actions.emplace(v, detail::random_action_through(
                           shape->palette_at_depth(v.depth()), from, to,
                           n_group, m_group, rng));
  }
  return TreeElement::make(shape, images[0], std::move(actions));
}

// A hyperbolic translation along the ray from the root through a random
// grandchild, built by patchwork from a two-point partial map.
inline TreeElement random_translation(
    std::shared_ptr<TreeShape const> const& shape, std::mt19937_64& rng) {
  auto pick_child_letter = [&](VertexAddress const& v) {
    auto letters = child_letters(*shape, v, 4);
    return letters[rng() % letters.size()];
  };
  VertexAddress root;
  VertexAddress mid = root.child(pick_child_letter(root));
  VertexAddress w = mid.child(pick_child_letter(mid));
  VertexAddress w_mid = w.child(pick_child_letter(w));
  VertexAddress w2 = w_mid.child(pick_child_letter(w_mid));
  return TreeElement::patchwork(shape, {root, w}, {w, w2},
                                {{root, w}, {w, w2}});
}

}  // namespace fractalgroups
