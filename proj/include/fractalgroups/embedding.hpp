#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "fractalgroups/dendrite.hpp"
#include "fractalgroups/dendrite_element.hpp"
#include "fractalgroups/tree.hpp"
#include "fractalgroups/tree_element.hpp"

namespace fractalgroups {

struct SupportExceedsDepth : std::invalid_argument {
  SupportExceedsDepth()
      : std::invalid_argument("element support exceeds the embedded depth") {}
};

// A color-preserving embedding of the radius-`depth` ball of the
// n-regular tree into a dendrite approximation: half-trees land inside
// branches of the matching chart color, with ear colors recoded as the n
// angles 0, 1/n, ..., (n-1)/n.
class EmbeddingRecord {
 public:
  static EmbeddingRecord embed_tree(int n, int depth, DendriteApprox& d) {
    if (n < 3) {
      throw BadArity();
    }
    EmbeddingRecord rec;
    rec.n_ = n;
    rec.depth_ = depth;
    rec.shape_ = TreeShape::regular(n);
    TruncatedTree ball(rec.shape_, depth, 0);
    rec.phi_[VertexAddress()] = 0;
    for (std::size_t i = 1; i < ball.size(); ++i) {
      auto const& v = ball.node(int(i)).addr;
      auto const& w = ball.node(ball.node(int(i)).parent).addr;
      Angle down = rec.recode(v.last_letter());
      Angle up = rec.recode(in_color(*rec.shape_, w));
      int at = rec.phi_.at(w);
      int image;
      if (auto seg = d.segment_with_color(at, down)) {
        // A branch of that color exists; place the image inside it, next
        // to phi(w), by the kaleidoscopic refinement.
        bool from_u = d.segment(*seg).u == at;
        Rational offset = d.segment(*seg).length / Rational(2);
        Angle far = rec.free_color(d, *seg, up);
        image = d.subdivide(*seg,
                            from_u ? offset : d.segment(*seg).length - offset,
                            from_u ? up : far, from_u ? far : up);
      } else {
        image = d.sprout(at, down, up, Rational(1));
      }
      rec.phi_[v] = image;
    }
    return rec;
  }

  int n() const { return n_; }
  int depth() const { return depth_; }
  std::shared_ptr<TreeShape const> const& tree_shape() const { return shape_; }
  std::map<VertexAddress, int> const& images() const { return phi_; }

  int image_of(VertexAddress const& v) const {
    auto it = phi_.find(v);
    if (it == phi_.end()) {
      throw SupportExceedsDepth();
    }
    return it->second;
  }

  Angle recode(Color const& ear) const {
    return Angle(ear.ear_index() - 1, n_);
  }

  OrderMap recode_action(EarPerm const& p) const {
    std::vector<std::pair<Angle, Angle>> pins;
    for (int i = 1; i <= n_; ++i) {
      pins.emplace_back(Angle(i - 1, n_), Angle(p.apply(i) - 1, n_));
    }
    return OrderMap::from_partial(FinitePartialMap(pins));
  }

  // Condition (1): betweenness agrees between the ball and its image.
  bool betweenness_holds(DendriteApprox const& d) const {
    std::vector<VertexAddress> verts;
    for (auto const& [v, b] : phi_) {
      verts.push_back(v);
    }
    for (auto const& u : verts) {
      for (auto const& v : verts) {
        for (auto const& w : verts) {
          if (u == v || v == w || u == w) {
            continue;
          }
          bool in_tree =
              tree_distance(u, v) + tree_distance(v, w) == tree_distance(u, w);
          bool in_dendrite = d.between(phi_.at(u), phi_.at(v), phi_.at(w));
          if (in_tree != in_dendrite) {
            return false;
          }
        }
      }
    }
    return true;
  }

  // Condition (2): adjacent images sit in branches of the recoded colors.
  bool colors_hold(DendriteApprox const& d) const {
    for (auto const& [v, b] : phi_) {
      for (auto const& [w, c] : phi_) {
        if (tree_distance(v, w) != 1) {
          continue;
        }
        Angle expected = recode(half_edge_color(*shape_, v, w));
        Angle actual = d.chart_towards(b, d.path(b, c)[1]);
        if (!(expected == actual)) {
          return false;
        }
      }
    }
    return true;
  }

 private:
  EmbeddingRecord() = default;

  Angle free_color(DendriteApprox const& d, int segment_id,
                   Angle const& taken) const {
    std::vector<Angle> used = {taken};
    for (int i = 0; i < n_; ++i) {
      used.emplace_back(i, n_);
    }
    auto const& s = d.segment(segment_id);
    for (auto const& [seg, color] : d.node(s.u).arc_colors) {
      used.push_back(color);
    }
    for (auto const& [seg, color] : d.node(s.v).arc_colors) {
      used.push_back(color);
    }
    return fresh_angle(used);
  }

  int n_ = 0;
  int depth_ = 0;
  std::shared_ptr<TreeShape const> shape_;
  std::map<VertexAddress, int> phi_;
};

// The induced element of the kaleidoscopic group: conjugation of g by the
// embedding, extended canonically between consecutive images.
inline DendriteElement lift(DendriteApprox& d, TreeElement const& g,
                            EmbeddingRecord const& phi) {
  for (auto const& [v, a] : g.actions()) {
    if (int(v.depth()) > phi.depth()) {
      throw SupportExceedsDepth();
    }
  }
  std::vector<int> domain, codomain;
  std::vector<std::pair<int, int>> f;
  std::map<int, OrderMap> rules;
  for (auto const& [v, b] : phi.images()) {
    VertexAddress image = g.evaluate(v);
    if (int(image.depth()) > phi.depth()) {
      throw SupportExceedsDepth();
    }
    int bi = phi.image_of(image);
    domain.push_back(b);
    codomain.push_back(bi);
    f.emplace_back(b, bi);
    rules.emplace(b, phi.recode_action(g.local_action(v).ear_perm()));
  }
  return DendriteElement::patchwork(d, domain, codomain, f, rules);
}

}  // namespace fractalgroups
