#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fractalgroups/angle.hpp"
#include "fractalgroups/cyclic_order.hpp"

namespace fractalgroups {

struct BadArity : std::invalid_argument {
  BadArity() : std::invalid_argument("arity must be at least 2") {}
};

struct WrongSide : std::invalid_argument {
  WrongSide() : std::invalid_argument("operation applies to the other side of the bipartition") {}
};

enum class PaletteKind { ears, angles };

// A color is either one of finitely many "ear" labels 1..n or a point of
// the rational circle.
class Color {
 public:
  Color() : data_(1) {}
  static Color ear(int index) { return Color(Data(index)); }
  static Color dense(Angle const& a) { return Color(Data(a)); }

  bool is_ear() const { return std::holds_alternative<int>(data_); }
  bool is_dense() const { return std::holds_alternative<Angle>(data_); }

  int ear_index() const { return std::get<int>(data_); }
  Angle const& angle() const { return std::get<Angle>(data_); }

  bool operator==(Color const& other) const = default;

  bool operator<(Color const& other) const {
    if (is_ear() != other.is_ear()) {
      return is_ear();
    }
    if (is_ear()) {
      return ear_index() < other.ear_index();
    }
    return angle() < other.angle();
  }

  std::string str() const {
    return is_ear() ? std::to_string(ear_index()) : angle().str();
  }

 private:
  using Data = std::variant<int, Angle>;
  explicit Color(Data d) : data_(std::move(d)) {}
  Data data_;
};

// One side of the bipartition: which colors its out half-edges use.
struct Palette {
  PaletteKind kind = PaletteKind::ears;
  int arity = 2;  // number of ears; unused for angle palettes

  static Palette ears_of(int n) {
    if (n < 2) {
      throw BadArity();
    }
    return Palette{PaletteKind::ears, n};
  }
  static Palette dense() { return Palette{PaletteKind::angles, 0}; }

  // The color every child shows back to a root of this neighbouring side.
  Color reserved() const {
    return kind == PaletteKind::ears ? Color::ear(1) : Color::dense(Angle());
  }

  bool contains(Color const& c) const {
    if (kind == PaletteKind::ears) {
      return c.is_ear() && c.ear_index() >= 1 && c.ear_index() <= arity;
    }
    return c.is_dense();
  }
};

// A biregular tree described by the palettes of its two sides. The root
// sits on the side whose out half-edges use `root_palette`.
struct TreeShape {
  Palette root_palette;
  Palette other_palette;

  static std::shared_ptr<TreeShape const> biregular(Palette root,
                                                    Palette other) {
    return std::make_shared<TreeShape const>(TreeShape{root, other});
  }

  // Tree of circles of the n-regular rabbit: circles have one half-edge
  // per angle, cut points have n ears. The root is a circle.
  static std::shared_ptr<TreeShape const> rabbit(int n) {
    return biregular(Palette::dense(), Palette::ears_of(n));
  }

  // n-regular tree with ear colors on both sides.
  static std::shared_ptr<TreeShape const> regular(int n) {
    return biregular(Palette::ears_of(n), Palette::ears_of(n));
  }

  // Tree in which every vertex has countably infinite degree.
  static std::shared_ptr<TreeShape const> infinite_regular() {
    return biregular(Palette::dense(), Palette::dense());
  }

  Palette const& palette_at_depth(std::size_t depth) const {
    return depth % 2 == 0 ? root_palette : other_palette;
  }
};

// Address of a vertex: the word of half-edge colors along the path from
// the root. Letter i colors the half-edge leaving the depth-(i-1) vertex,
// so letters alternate between the two palettes. A letter never repeats
// the letter two positions above it (that color is taken by the edge back
// towards the root), and the second letter avoids the reserved inbound
// color of the root.
class VertexAddress {
 public:
  VertexAddress() = default;
  explicit VertexAddress(std::vector<Color> word) : word_(std::move(word)) {}

  std::vector<Color> const& word() const { return word_; }
  std::size_t depth() const { return word_.size(); }
  bool is_root() const { return word_.empty(); }

  bool root_side() const { return depth() % 2 == 0; }

  VertexAddress parent() const {
    if (is_root()) {
      throw std::logic_error("root has no parent");
    }
    auto w = word_;
    w.pop_back();
    return VertexAddress(std::move(w));
  }

  VertexAddress child(Color const& c) const {
    auto w = word_;
    w.push_back(c);
    return VertexAddress(std::move(w));
  }

  Color const& last_letter() const { return word_.back(); }

  bool is_prefix_of(VertexAddress const& other) const {
    if (depth() > other.depth()) {
      return false;
    }
    return std::equal(word_.begin(), word_.end(), other.word_.begin());
  }

  bool operator==(VertexAddress const& other) const = default;

  bool operator<(VertexAddress const& other) const {
    if (depth() != other.depth()) {
      return depth() < other.depth();
    }
    return std::lexicographical_compare(word_.begin(), word_.end(),
                                        other.word_.begin(), other.word_.end(),
                                        [](Color const& l, Color const& r) {
                                          return l < r;
                                        });
  }

  std::string str() const {
    if (is_root()) {
      return "()";
    }
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < word_.size(); ++i) {
      if (i > 0) {
        out << " ";
      }
      out << word_[i].str();
    }
    out << ")";
    return out.str();
  }

 private:
  std::vector<Color> word_;
};

// The constant color of in(v): every neighbour shows this color on its
// half-edge into v. The root uses the reserved inbound color.
inline Color in_color(TreeShape const& shape, VertexAddress const& v) {
  if (v.is_root()) {
    return shape.other_palette.reserved();
  }
  return v.last_letter();
}

// Color of the half-edge (v, w) for adjacent v, w under the canonical
// legal coloring.
inline Color half_edge_color(TreeShape const& shape, VertexAddress const& v,
                             VertexAddress const& w) {
  if (v.is_prefix_of(w) && w.depth() == v.depth() + 1) {
    return w.last_letter();  // towards a child: the child's letter
  }
  if (w.is_prefix_of(v) && v.depth() == w.depth() + 1) {
    return in_color(shape, w);  // towards the parent
  }
  throw std::invalid_argument("half_edge_color: vertices not adjacent");
}

// The neighbour of v reached through out-color c.
inline VertexAddress step(TreeShape const& shape, VertexAddress const& v,
                          Color const& c) {
  Palette const& palette = shape.palette_at_depth(v.depth());
  if (!palette.contains(c)) {
    throw std::invalid_argument("step: color not in the palette of this side");
  }
  if (!v.is_root() && c == in_color(shape, v.parent())) {
    return v.parent();
  }
  return v.child(c);
}

inline bool valid_address(TreeShape const& shape, VertexAddress const& v) {
  auto const& w = v.word();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!shape.palette_at_depth(i).contains(w[i])) {
      return false;
    }
    Color excluded = i >= 2 ? w[i - 2]
                    : i == 1 ? shape.other_palette.reserved()
                             : Color();  // no exclusion for the first letter
    if (i >= 1 && w[i] == excluded) {
      return false;
    }
  }
  return true;
}

inline std::size_t common_prefix_length(VertexAddress const& a,
                                        VertexAddress const& b) {
  std::size_t limit = std::min(a.depth(), b.depth());
  std::size_t i = 0;
  while (i < limit && a.word()[i] == b.word()[i]) {
    ++i;
  }
  return i;
}

inline VertexAddress meet(VertexAddress const& a, VertexAddress const& b) {
  std::size_t l = common_prefix_length(a, b);
  return VertexAddress(
      std::vector<Color>(a.word().begin(), a.word().begin() + l));
}

inline std::size_t tree_distance(VertexAddress const& a,
                                 VertexAddress const& b) {
  return a.depth() + b.depth() - 2 * common_prefix_length(a, b);
}

// Median of three vertices: the deepest of the three pairwise meets.
inline VertexAddress center(VertexAddress const& x, VertexAddress const& y,
                            VertexAddress const& z) {
  VertexAddress m1 = meet(x, y);
  VertexAddress m2 = meet(y, z);
  VertexAddress m3 = meet(x, z);
  VertexAddress best = m1;
  if (m2.depth() > best.depth()) {
    best = m2;
  }
  if (m3.depth() > best.depth()) {
    best = m3;
  }
  return best;
}

inline bool is_center_closed(std::vector<VertexAddress> const& f) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      for (std::size_t k = j + 1; k < f.size(); ++k) {
        VertexAddress c = center(f[i], f[j], f[k]);
        if (std::find(f.begin(), f.end(), c) == f.end()) {
          return false;
        }
      }
    }
  }
  return true;
}

// Vertices of the path between a and b, inclusive.
inline std::vector<VertexAddress> path_between(VertexAddress const& a,
                                               VertexAddress const& b) {
  VertexAddress m = meet(a, b);
  std::vector<VertexAddress> up;
  for (VertexAddress v = a; !(v == m); v = v.parent()) {
    up.push_back(v);
  }
  up.push_back(m);
  std::vector<VertexAddress> down;
  for (VertexAddress v = b; !(v == m); v = v.parent()) {
    down.push_back(v);
  }
  std::reverse(down.begin(), down.end());
  up.insert(up.end(), down.begin(), down.end());
  return up;
}

// The canonical letters available for children of v, in enumeration
// order. Ear palettes enumerate completely; angle palettes yield the
// first `count` colors.
inline std::vector<Color> child_letters(TreeShape const& shape,
                                        VertexAddress const& v,
                                        std::size_t count) {
  Palette const& palette = shape.palette_at_depth(v.depth());
  std::optional<Color> excluded;
  if (!v.is_root()) {
    excluded = in_color(shape, v.parent());
  }
  std::vector<Color> out;
  if (palette.kind == PaletteKind::ears) {
    for (int i = 1; i <= palette.arity; ++i) {
      Color c = Color::ear(i);
      if (excluded && c == *excluded) {
        continue;
      }
      out.push_back(c);
    }
  } else {
    for (std::size_t i = 0; out.size() < count; ++i) {
      Color c = Color::dense(angle_by_index(i));
      if (excluded && c == *excluded) {
        continue;
      }
      out.push_back(c);
    }
  }
  return out;
}

// A materialized finite window of the tree: the ball of a given radius,
// with every ear-side vertex complete and every angle-side vertex showing
// `branching_cap` children.
class TruncatedTree {
 public:
  struct Node {
    VertexAddress addr;
    int parent = -1;
    std::vector<int> children;
  };

  TruncatedTree(std::shared_ptr<TreeShape const> shape, int radius,
                int branching_cap)
      : shape_(std::move(shape)), radius_(radius), cap_(branching_cap) {
    nodes_.push_back(Node{VertexAddress(), -1, {}});
    index_[nodes_[0].addr] = 0;
    for (int depth = 0; depth < radius; ++depth) {
      std::size_t n = nodes_.size();
      for (std::size_t i = 0; i < n; ++i) {
        if (int(nodes_[i].addr.depth()) != depth) {
          continue;
        }
        materialize_children(int(i));
      }
    }
  }

  std::shared_ptr<TreeShape const> const& shape_ptr() const { return shape_; }
  TreeShape const& shape() const { return *shape_; }
  int radius() const { return radius_; }
  int cap() const { return cap_; }
  std::size_t size() const { return nodes_.size(); }
  Node const& node(int i) const { return nodes_[i]; }

  std::vector<Node> const& nodes() const { return nodes_; }

  std::optional<int> find(VertexAddress const& addr) const {
    auto it = index_.find(addr);
    if (it == index_.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  std::vector<int> neighbours(int i) const {
    std::vector<int> out = nodes_[i].children;
    if (nodes_[i].parent >= 0) {
      out.push_back(nodes_[i].parent);
    }
    return out;
  }

  // Appends one additional child to an angle-side vertex, past the cap.
  int grow_child(int i) {
    if (shape_->palette_at_depth(nodes_[i].addr.depth()).kind !=
        PaletteKind::angles) {
      throw std::logic_error("grow_child: only angle-side vertices grow");
    }
    std::vector<Color> used;
    for (int c : nodes_[i].children) {
      used.push_back(nodes_[c].addr.last_letter());
    }
    auto letters = child_letters(*shape_, nodes_[i].addr,
                                 nodes_[i].children.size() + 1);
    for (auto const& l : letters) {
      if (std::find(used.begin(), used.end(), l) == used.end()) {
        return add_child(i, l);
      }
    }
    throw std::logic_error("grow_child: no fresh letter");
  }

  // Appends the child reached by a specific letter (absent so far).
  int grow_ear_child(int i, Color const& letter) {
    for (int c : nodes_[i].children) {
      if (nodes_[c].addr.last_letter() == letter) {
        throw std::logic_error("grow_ear_child: letter already materialized");
      }
    }
    return add_child(i, letter);
  }

  std::size_t depth_of(int i) const { return nodes_[i].addr.depth(); }

  // Distance via lowest common ancestor on node ids.
  int distance(int a, int b) const {
    int da = int(depth_of(a));
    int db = int(depth_of(b));
    int steps = 0;
    while (da > db) {
      a = nodes_[a].parent;
      --da;
      ++steps;
    }
    while (db > da) {
      b = nodes_[b].parent;
      --db;
      ++steps;
    }
    while (a != b) {
      a = nodes_[a].parent;
      b = nodes_[b].parent;
      steps += 2;
    }
    return steps;
  }

  std::string to_dot() const {
    std::ostringstream out;
    out << "graph truncation {\n";
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      out << "  n" << i << " [label=\"" << nodes_[i].addr.str() << "\"];\n";
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      for (int c : nodes_[i].children) {
        Color down = half_edge_color(*shape_, nodes_[i].addr, nodes_[c].addr);
        Color up = half_edge_color(*shape_, nodes_[c].addr, nodes_[i].addr);
        out << "  n" << i << " -- n" << c << " [label=\"" << down.str() << "/"
            << up.str() << "\"];\n";
      }
    }
    out << "}\n";
    return out.str();
  }

 private:
  void materialize_children(int i) {
    auto letters = child_letters(*shape_, nodes_[i].addr, cap_);
    for (auto const& l : letters) {
      add_child(i, l);
    }
  }

  int add_child(int i, Color const& letter) {
    Node child;
    child.addr = nodes_[i].addr.child(letter);
    child.parent = i;
    nodes_.push_back(child);
    int id = int(nodes_.size()) - 1;
    nodes_[i].children.push_back(id);
    index_[nodes_.back().addr] = id;
    return id;
  }

  std::shared_ptr<TreeShape const> shape_;
  int radius_;
  int cap_;
  std::vector<Node> nodes_;
  std::map<VertexAddress, int> index_;
};

// An explicit half-edge coloring of a truncation, mutable so tests can
// plant defects. Entries are keyed by ordered node pairs.
class HalfEdgeColoring {
 public:
  explicit HalfEdgeColoring(TruncatedTree const& tree) {
    for (std::size_t i = 0; i < tree.size(); ++i) {
      for (int c : tree.node(int(i)).children) {
        colors_[{int(i), c}] =
            half_edge_color(tree.shape(), tree.node(int(i)).addr,
                            tree.node(c).addr);
        colors_[{c, int(i)}] =
            half_edge_color(tree.shape(), tree.node(c).addr,
                            tree.node(int(i)).addr);
      }
    }
  }

  Color const& at(int from, int to) const { return colors_.at({from, to}); }
  void set(int from, int to, Color const& c) { colors_[{from, to}] = c; }

 private:
  std::map<std::pair<int, int>, Color> colors_;
};

struct LegalityViolation {
  std::string condition;  // "bijective-out" or "constant-in"
  int node;
};

// Checks the legal coloring conditions on every interior vertex of the
// truncation: out(v) hits its palette injectively (bijectively when the
// palette is finite and v is complete) and in(v) is constant.
inline std::optional<LegalityViolation> verify_legal(
    TruncatedTree const& tree, HalfEdgeColoring const& coloring) {
  for (std::size_t i = 0; i < tree.size(); ++i) {
    int v = int(i);
    auto nbrs = tree.neighbours(v);
    Palette const& palette =
        tree.shape().palette_at_depth(tree.depth_of(v));
    // Condition 1/2: out(v) into the palette, no repeats, full when finite
    // and completely materialized.
    std::vector<Color> seen;
    for (int w : nbrs) {
      Color c = coloring.at(v, w);
      if (!palette.contains(c) ||
          std::find(seen.begin(), seen.end(), c) != seen.end()) {
        return LegalityViolation{"bijective-out", v};
      }
      seen.push_back(c);
    }
    bool interior = int(tree.depth_of(v)) < tree.radius();
    if (interior && palette.kind == PaletteKind::ears &&
        int(seen.size()) != palette.arity) {
      return LegalityViolation{"bijective-out", v};
    }
    // Condition 3: constant on in(v).
    std::optional<Color> in;
    for (int w : nbrs) {
      Color c = coloring.at(w, v);
      if (!in) {
        in = c;
      } else if (!(*in == c)) {
        return LegalityViolation{"constant-in", v};
      }
    }
  }
  return std::nullopt;
}

}  // namespace fractalgroups
