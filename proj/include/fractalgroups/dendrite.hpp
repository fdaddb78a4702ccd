#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fractalgroups/angle.hpp"
#include "fractalgroups/cyclic_order.hpp"

namespace fractalgroups {

struct SamePoint : std::invalid_argument {
  SamePoint() : std::invalid_argument("branch points must be distinct") {}
};

struct SameColor : std::invalid_argument {
  SameColor() : std::invalid_argument("chart colors must be distinct") {}
};

// A finite, refinable window onto the universal Wazewski dendrite. Branch
// points are nodes; arcs between them are segments carrying an exact
// rational length and the identity of the logical arc they subdivide.
// Each node charts its incident branches (segments and unexplored stubs)
// injectively by angles.
class DendriteApprox {
 public:
  struct Segment {
    int u, v;
    Rational length;
    int logical;  // segments produced by subdividing one arc share this
  };

  struct Node {
    std::map<int, Angle> arc_colors;  // segment id -> chart color here
    std::set<Angle> stubs;            // declared but unexplored branches
  };

  DendriteApprox() { nodes_.emplace_back(); }

  std::size_t size() const { return nodes_.size(); }
  std::size_t segment_count() const { return segments_.size(); }
  Segment const& segment(int s) const { return segments_[s]; }
  Node const& node(int b) const { return nodes_[b]; }

  int other_end(int segment_id, int from) const {
    auto const& s = segments_[segment_id];
    return s.u == from ? s.v : s.u;
  }

  std::vector<int> neighbours(int b) const {
    std::vector<int> out;
    for (auto const& [s, color] : nodes_[b].arc_colors) {
      out.push_back(other_end(s, b));
    }
    return out;
  }

  // Chart color at b of the branch containing the adjacent node y.
  Angle chart_towards(int b, int y) const {
    for (auto const& [s, color] : nodes_[b].arc_colors) {
      if (other_end(s, b) == y) {
        return color;
      }
    }
    throw std::invalid_argument("chart_towards: nodes not adjacent");
  }

  std::optional<int> segment_between(int b, int y) const {
    for (auto const& [s, color] : nodes_[b].arc_colors) {
      if (other_end(s, b) == y) {
        return s;
      }
    }
    return std::nullopt;
  }

  std::optional<int> segment_with_color(int b, Angle const& c) const {
    for (auto const& [s, color] : nodes_[b].arc_colors) {
      if (color == c) {
        return s;
      }
    }
    return std::nullopt;
  }

  bool chart_color_used(int b, Angle const& c) const {
    if (nodes_[b].stubs.count(c)) {
      return true;
    }
    return segment_with_color(b, c).has_value();
  }

  Angle fresh_chart_color(int b) const {
    std::vector<Angle> used(nodes_[b].stubs.begin(), nodes_[b].stubs.end());
    for (auto const& [s, color] : nodes_[b].arc_colors) {
      used.push_back(color);
    }
    return fresh_angle(used);
  }

  void declare_stub(int b, Angle const& c) {
    if (chart_color_used(b, c)) {
      throw SameColor();
    }
    nodes_[b].stubs.insert(c);
  }

  // Fresh node through the branch of b colored `color_at_b` (declared as a
  // stub if new), at the given arc length; the new node charts the arc
  // back to b with `back_color`.
  int sprout(int b, Angle const& color_at_b, Angle const& back_color,
             Rational const& length, int logical = -1) {
    if (segment_with_color(b, color_at_b)) {
      throw SameColor();
    }
    nodes_[b].stubs.erase(color_at_b);
    int id = int(nodes_.size());
    nodes_.emplace_back();
    int s = int(segments_.size());
    segments_.push_back(
        Segment{b, id, length, logical < 0 ? next_logical_++ : logical});
    nodes_[b].arc_colors[s] = color_at_b;
    nodes_[id].arc_colors[s] = back_color;
    return id;
  }

  // Splits a segment at `offset` from its u end. The new node keeps the
  // logical arc identity on both halves and charts the two directions by
  // the given colors.
  int subdivide(int segment_id, Rational const& offset,
                Angle const& color_towards_u, Angle const& color_towards_v) {
    Segment const s = segments_[segment_id];
    if (offset <= Rational(0) || offset >= s.length) {
      throw std::invalid_argument("subdivide: offset outside the segment");
    }
    if (color_towards_u == color_towards_v) {
      throw SameColor();
    }
    int id = int(nodes_.size());
    nodes_.emplace_back();
    // Reuse the old segment id for the u side, add a new one for v.
    Angle u_color = nodes_[s.u].arc_colors.at(segment_id);
    Angle v_color = nodes_[s.v].arc_colors.at(segment_id);
    segments_[segment_id] = Segment{s.u, id, offset, s.logical};
    int s2 = int(segments_.size());
    segments_.push_back(Segment{id, s.v, s.length - offset, s.logical});
    nodes_[s.v].arc_colors.erase(segment_id);
    nodes_[s.v].arc_colors[s2] = v_color;
    nodes_[s.u].arc_colors[segment_id] = u_color;
    nodes_[id].arc_colors[segment_id] = color_towards_u;
    nodes_[id].arc_colors[s2] = color_towards_v;
    return id;
  }

  // The straight continuation of a logical arc across node b, entered via
  // `incoming` segment.
  std::optional<int> straight_across(int b, int incoming) const {
    int logical = segments_[incoming].logical;
    for (auto const& [s, color] : nodes_[b].arc_colors) {
      if (s != incoming && segments_[s].logical == logical) {
        return s;
      }
    }
    return std::nullopt;
  }

  // Node sequence of the unique path between two nodes.
  std::vector<int> path(int a, int b) const {
    if (a == b) {
      return {a};
    }
    std::vector<int> parent(nodes_.size(), -1);
    std::vector<int> queue = {a};
    parent[a] = a;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      int cur = queue[i];
      if (cur == b) {
        break;
      }
      for (int nb : neighbours(cur)) {
        if (parent[nb] == -1) {
          parent[nb] = cur;
          queue.push_back(nb);
        }
      }
    }
    if (parent[b] == -1) {
      throw std::logic_error("path: nodes not connected");
    }
    std::vector<int> out;
    for (int cur = b; cur != a; cur = parent[cur]) {
      out.push_back(cur);
    }
    out.push_back(a);
    std::reverse(out.begin(), out.end());
    return out;
  }

  bool between(int x, int p, int y) const {
    auto pth = path(x, y);
    return std::find(pth.begin(), pth.end(), p) != pth.end();
  }

  // Median of three branch points.
  int center(int x, int y, int z) const {
    auto xy = path(x, y);
    auto yz = path(y, z);
    auto xz = path(x, z);
    for (int p : xy) {
      if (std::find(yz.begin(), yz.end(), p) != yz.end() &&
          std::find(xz.begin(), xz.end(), p) != xz.end()) {
        return p;
      }
    }
    throw std::logic_error("center: no common point");
  }

  bool is_center_closed(std::vector<int> const& f) const {
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t j = i + 1; j < f.size(); ++j) {
        for (std::size_t k = j + 1; k < f.size(); ++k) {
          if (std::find(f.begin(), f.end(), center(f[i], f[j], f[k])) ==
              f.end()) {
            return false;
          }
        }
      }
    }
    return true;
  }

  std::vector<int> close_up(std::vector<int> f) const {
    bool changed = true;
    while (changed) {
      changed = false;
      std::size_t n = f.size();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          for (std::size_t k = j + 1; k < n; ++k) {
            int c = center(f[i], f[j], f[k]);
            if (std::find(f.begin(), f.end(), c) == f.end()) {
              f.push_back(c);
              changed = true;
            }
          }
        }
      }
    }
    return f;
  }

  // Inserts a separating branch point between b1 and b2, subdividing the
  // arc adjacent to b1 on the path towards b2, with chart value i on the
  // b1 side and j on the b2 side.
  int refine_between(int b1, int b2, Angle const& i, Angle const& j) {
    if (b1 == b2) {
      throw SamePoint();
    }
    if (i == j) {
      throw SameColor();
    }
    auto pth = path(b1, b2);
    int next = pth[1];
    int seg = *segment_between(b1, next);
    Rational offset = segments_[seg].length / Rational(2);
    bool b1_is_u = segments_[seg].u == b1;
    return subdivide(seg, b1_is_u ? offset : segments_[seg].length - offset,
                     b1_is_u ? i : j, b1_is_u ? j : i);
  }

  std::string to_dot() const {
    std::ostringstream out;
    out << "graph dendrite {\n";
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      out << "  b" << i << ";\n";
    }
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      auto const& seg = segments_[s];
      out << "  b" << seg.u << " -- b" << seg.v << " [taillabel=\""
          << nodes_[seg.u].arc_colors.at(int(s)).str() << "\",headlabel=\""
          << nodes_[seg.v].arc_colors.at(int(s)).str() << "\",label=\""
          << seg.length.numerator().str() << "/"
          << seg.length.denominator().str() << "\"];\n";
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      for (auto const& stub : nodes_[i].stubs) {
        out << "  // stub at b" << i << ": " << stub.str() << "\n";
      }
    }
    out << "}\n";
    return out.str();
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Segment> segments_;
  int next_logical_ = 0;
};

}  // namespace fractalgroups
