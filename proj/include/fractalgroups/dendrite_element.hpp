#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "fractalgroups/cyclic_order.hpp"
#include "fractalgroups/dendrite.hpp"
#include "fractalgroups/tree_element.hpp"  // shared error types and groups

namespace fractalgroups {

// A homeomorphism of the dendrite given by a partial map on a finite
// center-closed set of branch points together with local actions there.
// Beyond the domain it extends canonically: components hanging off one
// boundary point are copied isometrically with charts carried over,
// components between two boundary points are rescaled affinely. Both
// rules are symmetric in the data, so inversion and composition act
// pointwise exactly.
class DendriteElement {
 public:
  std::vector<int> const& domain() const { return domain_; }

  int image_of(int v) const { return images_.at(v); }

  OrderMap const& action_at(int v) const { return actions_.at(v); }

  static DendriteElement patchwork(
      DendriteApprox const& d, std::vector<int> const& domain,
      std::vector<int> const& codomain,
      std::vector<std::pair<int, int>> const& f,
      std::map<int, OrderMap> const& branch_rule = {}) {
    DendriteElement h;
    if (!d.is_center_closed(domain) || !d.is_center_closed(codomain)) {
      throw NotCenterClosed();
    }
    if (f.size() != domain.size() || codomain.size() != domain.size()) {
      throw NotPartialHomomorphism("map does not match the two sets");
    }
    for (auto const& [v, w] : f) {
      if (std::find(domain.begin(), domain.end(), v) == domain.end() ||
          std::find(codomain.begin(), codomain.end(), w) == codomain.end()) {
        throw NotPartialHomomorphism("pair outside the given sets");
      }
      if (h.images_.count(v)) {
        throw NotPartialHomomorphism("duplicate source");
      }
      h.images_[v] = w;
    }
    h.domain_ = domain;
    std::sort(h.domain_.begin(), h.domain_.end());

    // Betweenness must be preserved on the domain.
    for (int x : domain) {
      for (int p : domain) {
        for (int y : domain) {
          if (x == p || p == y || x == y) {
            continue;
          }
          if (d.between(x, p, y) !=
              d.between(h.images_[x], h.images_[p], h.images_[y])) {
            throw NotPartialHomomorphism("betweenness not preserved");
          }
        }
      }
    }

    // Forced chart pins: the branch at v towards w corresponds to the
    // branch at f(v) towards f(w).
    for (int v : domain) {
      std::vector<std::pair<Angle, Angle>> pins;
      for (int w : domain) {
        if (w == v) {
          continue;
        }
        Angle c = d.chart_towards(v, d.path(v, w)[1]);
        Angle ci = d.chart_towards(h.images_[v],
                                   d.path(h.images_[v], h.images_[w])[1]);
        bool conflict = false;
        for (auto const& [pc, pci] : pins) {
          if ((pc == c) != (pci == ci)) {
            conflict = true;
          }
        }
        if (conflict) {
          throw NotPartialHomomorphism("branch structure mismatch");
        }
        if (!std::count(pins.begin(), pins.end(), std::make_pair(c, ci))) {
          pins.emplace_back(c, ci);
        }
      }
      if (auto it = branch_rule.find(v); it != branch_rule.end()) {
        for (auto const& [c, ci] : pins) {
          if (!(it->second.apply(c) == ci)) {
            throw BoundaryMismatch();
          }
        }
        h.actions_.emplace(v, it->second);
      } else {
        try {
          h.actions_.emplace(v, OrderMap::from_partial(FinitePartialMap(pins)));
        } catch (NotMonotone const&) {
          throw NotPartialHomomorphism("branch charts are not monotone");
        } catch (std::invalid_argument const&) {
          throw NotPartialHomomorphism("branch charts collide");
        }
      }
    }
    return h;
  }

  static DendriteElement identity_at(int base) {
    DendriteElement h;
    h.domain_ = {base};
    h.images_[base] = base;
    h.actions_.emplace(base, OrderMap::identity());
    return h;
  }

  DendriteElement inverse() const {
    DendriteElement h;
    for (int v : domain_) {
      int w = images_.at(v);
      h.domain_.push_back(w);
      h.images_[w] = v;
      h.actions_.emplace(w, actions_.at(v).inverse());
    }
    std::sort(h.domain_.begin(), h.domain_.end());
    return h;
  }

  int evaluate(DendriteApprox& d, int v) const {
    if (auto it = images_.find(v); it != images_.end()) {
      return it->second;
    }
    auto boundary = component_boundary(d, v);
    if (boundary.size() == 1) {
      return eval_anchored(d, v, boundary[0], std::nullopt);
    }
    if (boundary.size() == 2) {
      return eval_between(d, v, boundary[0], boundary[1]);
    }
    throw InconsistentElement("component with more than two boundary points");
  }

  // The composite (this after inner), with domain the center closure of
  // both supports pulled to the inner side.
  DendriteElement after(DendriteApprox& d, DendriteElement const& inner) const {
    DendriteElement inner_inverse = inner.inverse();
    std::vector<int> support = inner.domain_;
    for (int w : domain_) {
      int pre = inner_inverse.evaluate(d, w);
      if (!std::count(support.begin(), support.end(), pre)) {
        support.push_back(pre);
      }
    }
    support = d.close_up(support);
    DendriteElement h;
    h.domain_ = support;
    std::sort(h.domain_.begin(), h.domain_.end());
    for (int v : h.domain_) {
      int mid = inner.evaluate(d, v);
      h.images_[v] = evaluate(d, mid);
      h.actions_.emplace(
          v, local_action(d, mid).after(inner.local_action(d, v)));
    }
    return h;
  }

  // Local action at any materialized branch point: chart pins of
  // corresponding branches.
  OrderMap local_action(DendriteApprox& d, int v) const {
    if (auto it = actions_.find(v); it != actions_.end()) {
      return it->second;
    }
    int image = evaluate(d, v);
    std::vector<std::pair<Angle, Angle>> pins;
    for (int y : d.neighbours(v)) {
      int yi = evaluate(d, y);
      Angle c = d.chart_towards(v, y);
      Angle ci = d.chart_towards(image, d.path(image, yi)[1]);
      if (!std::count(pins.begin(), pins.end(), std::make_pair(c, ci))) {
        pins.emplace_back(c, ci);
      }
    }
    return OrderMap::from_partial(FinitePartialMap(pins));
  }

  bool kaleidoscopic_membership(DenseGroup group) const {
    for (auto const& [v, a] : actions_) {
      if (!dense_group_contains(group, a)) {
        return false;
      }
    }
    return true;
  }

 private:
  DendriteElement() = default;

  std::vector<int> component_boundary(DendriteApprox const& d, int v) const {
    std::set<int> dom(domain_.begin(), domain_.end());
    std::set<int> seen = {v};
    std::vector<int> queue = {v};
    std::set<int> boundary;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      for (int nb : d.neighbours(queue[i])) {
        if (dom.count(nb)) {
          boundary.insert(nb);
          continue;
        }
        if (seen.insert(nb).second) {
          queue.push_back(nb);
        }
      }
    }
    return {boundary.begin(), boundary.end()};
  }

  struct Cursor {
    int node;
    int incoming = -1;  // segment id we arrived through
  };

  // Fresh chart color at an image node avoiding its own chart and the
  // whole chart of the matching source node, so copied colors can never
  // collide with bookkeeping ones.
  static Angle safe_fresh_color(DendriteApprox const& d, int image_node,
                                int source_node) {
    std::vector<Angle> used;
    auto collect = [&used, &d](int b) {
      for (auto const& [s, color] : d.node(b).arc_colors) {
        used.push_back(color);
      }
      for (auto const& stub : d.node(b).stubs) {
        used.push_back(stub);
      }
    };
    collect(image_node);
    collect(source_node);
    return fresh_angle(used);
  }

  // Moves `dist` along the straight continuation of the cursor's logical
  // arc, landing on an existing node at an exact hit, subdividing or
  // extending otherwise. `back_color` charts the landing node towards the
  // cursor; `source_node` guards fresh colors.
  static Cursor advance(DendriteApprox& d, Cursor cur, Rational dist,
                        Angle const& back_color, int source_node) {
    while (true) {
      auto seg = d.straight_across(cur.node, cur.incoming);
      if (!seg) {
        // The logical arc ends here; extend it by the remaining length.
        int logical = d.segment(cur.incoming).logical;
        Angle here = safe_fresh_color(d, cur.node, source_node);
        int fresh = d.sprout(cur.node, here, back_color, dist, logical);
        return Cursor{fresh, *d.segment_with_color(cur.node, here)};
      }
      auto const& s = d.segment(*seg);
      if (dist < s.length) {
        bool from_u = s.u == cur.node;
        Angle far = safe_fresh_color(d, cur.node, source_node);
        int m = d.subdivide(*seg, from_u ? dist : s.length - dist,
                            from_u ? back_color : far,
                            from_u ? far : back_color);
        return Cursor{m, *d.segment_between(m, cur.node)};
      }
      int far_node = d.other_end(*seg, cur.node);
      if (dist == s.length) {
        return Cursor{far_node, *seg};
      }
      dist -= s.length;
      cur = Cursor{far_node, *seg};
    }
  }

  // Enters the branch of the cursor node with the given chart color and
  // moves `dist` into it. The segment we arrived through is never taken
  // again; if a foreign chart entry collides with it, the walk drops into
  // a fresh branch instead.
  static Cursor turn_into(DendriteApprox& d, int node, Angle const& color,
                          Rational const& dist, Angle const& back_color,
                          int source_node, int exclude_segment = -1) {
    auto seg = d.segment_with_color(node, color);
    if (seg && *seg != exclude_segment) {
      // Walk into the existing branch as if we had entered it straight.
      auto const& s = d.segment(*seg);
      if (dist < s.length) {
        bool from_u = s.u == node;
        Angle far = safe_fresh_color(d, node, source_node);
        int m = d.subdivide(*seg, from_u ? dist : s.length - dist,
                            from_u ? back_color : far,
                            from_u ? far : back_color);
        return Cursor{m, *d.segment_between(m, node)};
      }
      int far_node = d.other_end(*seg, node);
      if (dist == s.length) {
        return Cursor{far_node, *seg};
      }
      return advance(d, Cursor{far_node, *seg}, dist - s.length, back_color,
                     source_node);
    }
    Angle branch_color =
        seg ? safe_fresh_color(d, node, source_node) : color;
    int fresh = d.sprout(node, branch_color, back_color, dist);
    return Cursor{fresh, *d.segment_with_color(node, branch_color)};
  }

  // Image of v in a component anchored at a single boundary point, or the
  // off-spine part of the two-boundary case: at each source node the walk
  // turns into the branch of the copied chart color and advances by the
  // exact source length.
  int eval_anchored(DendriteApprox& d, int v, int anchor,
                    std::optional<Cursor> start) const {
    auto path = d.path(anchor, v);
    Cursor cur = start.value_or(Cursor{images_.at(anchor), -1});
    for (std::size_t i = 1; i < path.size(); ++i) {
      int from = path[i - 1];
      int to = path[i];
      int seg = *d.segment_between(from, to);
      Rational len = d.segment(seg).length;
      Angle back = d.chart_towards(to, from);
      Angle turn = d.chart_towards(from, to);
      if (i == 1 && !start) {
        turn = actions_.at(anchor).apply(turn);
      }
      cur = turn_into(d, cur.node, turn, len, back, to, cur.incoming);
    }
    return cur.node;
  }

  // Image of v in a component between two boundary points: positions on
  // the spine rescale affinely, side branches copy lengths.
  int eval_between(DendriteApprox& d, int v, int a, int b) const {
    auto spine = d.path(a, b);
    std::vector<Rational> pos(spine.size(), Rational(0));
    for (std::size_t i = 1; i < spine.size(); ++i) {
      pos[i] = pos[i - 1] +
               d.segment(*d.segment_between(spine[i - 1], spine[i])).length;
    }
    Rational source_total = pos.back();

    int ia = images_.at(a);
    int ib = images_.at(b);
    auto img_spine = d.path(ia, ib);
    Rational image_total(0);
    for (std::size_t i = 1; i < img_spine.size(); ++i) {
      image_total +=
          d.segment(*d.segment_between(img_spine[i - 1], img_spine[i])).length;
    }

    // Where does the path from a to v leave the spine?
    auto pa_v = d.path(a, v);
    std::size_t turn = 0;
    for (std::size_t i = 0; i < pa_v.size(); ++i) {
      auto at = std::find(spine.begin(), spine.end(), pa_v[i]);
      if (at == spine.end()) {
        break;
      }
      turn = i;
    }
    int t = pa_v[turn];

    if (t == a) {
      return eval_anchored(d, v, a, std::nullopt);
    }
    if (t == b) {
      return eval_anchored(d, v, b, std::nullopt);
    }

    std::size_t spine_index =
        std::find(spine.begin(), spine.end(), t) - spine.begin();
    Rational target = pos[spine_index] * image_total / source_total;

    // Advance along the image spine to the rescaled position.
    Cursor cur{ia, -1};
    Rational walked(0);
    std::size_t img_i = 1;
    while (true) {
      if (walked == target) {
        break;
      }
      int seg = *d.segment_between(cur.node, img_spine[img_i]);
      Rational len = d.segment(seg).length;
      if (walked + len > target) {
        Rational offset = target - walked;
        bool from_u = d.segment(seg).u == cur.node;
        Angle towards_a = d.chart_towards(t, spine[spine_index - 1]);
        Angle towards_b = d.chart_towards(t, spine[spine_index + 1]);
        int m = d.subdivide(seg, from_u ? offset : len - offset,
                            from_u ? towards_a : towards_b,
                            from_u ? towards_b : towards_a);
        cur = Cursor{m, *d.segment_between(m, cur.node)};
        walked = target;
        break;
      }
      walked += len;
      cur = Cursor{img_spine[img_i], seg};
      ++img_i;
    }
    int img_t = cur.node;
    if (v == t) {
      return img_t;
    }
    // Continue off the spine from t: charts copied, lengths copied.
    return eval_anchored_from(d, t, v, Cursor{img_t, cur.incoming});
  }

  int eval_anchored_from(DendriteApprox& d, int from_node, int v,
                         Cursor start) const {
    auto path = d.path(from_node, v);
    Cursor cur = start;
    for (std::size_t i = 1; i < path.size(); ++i) {
      int from = path[i - 1];
      int to = path[i];
      int seg = *d.segment_between(from, to);
      Rational len = d.segment(seg).length;
      Angle back = d.chart_towards(to, from);
      cur = turn_into(d, cur.node, d.chart_towards(from, to), len, back, to,
                      cur.incoming);
    }
    return cur.node;
  }

  std::vector<int> domain_;
  std::map<int, int> images_;
  std::map<int, OrderMap> actions_;
};

}  // namespace fractalgroups
