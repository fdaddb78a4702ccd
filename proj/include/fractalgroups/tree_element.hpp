#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fractalgroups/cyclic_order.hpp"
#include "fractalgroups/tree.hpp"

namespace fractalgroups {

struct InconsistentElement : std::logic_error {
  explicit InconsistentElement(std::string const& what)
      : std::logic_error("inconsistent element: " + what) {}
};

struct NotCenterClosed : std::invalid_argument {
  NotCenterClosed() : std::invalid_argument("set is not center-closed") {}
};

struct NotPartialHomomorphism : std::invalid_argument {
  explicit NotPartialHomomorphism(std::string const& what)
      : std::invalid_argument("not a partial homomorphism: " + what) {}
};

struct BoundaryMismatch : std::invalid_argument {
  BoundaryMismatch()
      : std::invalid_argument("branch rule disagrees with the map on the boundary") {}
};

struct NotOrientation : std::invalid_argument {
  NotOrientation()
      : std::invalid_argument(
            "element is not in the orientation-preserving universal group") {}
};

struct IllDefined : std::logic_error {
  IllDefined()
      : std::logic_error("local actions disagree across ear vertices") {}
};

// A permutation of the ear colors 1..n.
class EarPerm {
 public:
  static EarPerm identity(int n) {
    std::vector<int> img(n);
    std::iota(img.begin(), img.end(), 1);
    return EarPerm(std::move(img));
  }

  static EarPerm rotation(int n, int shift) {
    std::vector<int> img(n);
    for (int i = 0; i < n; ++i) {
      img[i] = (i + shift % n + n) % n + 1;
    }
    return EarPerm(std::move(img));
  }

  static EarPerm from_images(std::vector<int> img) {
    EarPerm p(std::move(img));
    std::vector<bool> seen(p.size() + 1, false);
    for (int v : p.img_) {
      if (v < 1 || v > int(p.size()) || seen[v]) {
        throw std::invalid_argument("not a permutation of 1..n");
      }
      seen[v] = true;
    }
    return p;
  }

  int size() const { return int(img_.size()); }
  int apply(int i) const { return img_.at(i - 1); }

  EarPerm inverse() const {
    std::vector<int> inv(img_.size());
    for (int i = 0; i < int(img_.size()); ++i) {
      inv[img_[i] - 1] = i + 1;
    }
    return EarPerm(std::move(inv));
  }

  EarPerm after(EarPerm const& inner) const {
    std::vector<int> out(img_.size());
    for (int i = 1; i <= int(img_.size()); ++i) {
      out[i - 1] = apply(inner.apply(i));
    }
    return EarPerm(std::move(out));
  }

  bool is_identity() const {
    for (int i = 1; i <= int(img_.size()); ++i) {
      if (apply(i) != i) {
        return false;
      }
    }
    return true;
  }

  std::optional<int> rotation_shift() const {
    int shift = (img_[0] - 1 + size()) % size();
    for (int i = 1; i <= size(); ++i) {
      if (apply(i) != (i - 1 + shift) % size() + 1) {
        return std::nullopt;
      }
    }
    return shift;
  }

  std::vector<int> const& images() const { return img_; }

  bool operator==(EarPerm const& other) const = default;

 private:
  explicit EarPerm(std::vector<int> img) : img_(std::move(img)) {}
  std::vector<int> img_;
};

// The local action of an element at one vertex: a permutation of the
// palette of that side.
class LocalAction {
 public:
  LocalAction() : kind_(PaletteKind::angles), dense_(OrderMap::identity()) {}

  static LocalAction ears(EarPerm p) { return LocalAction(std::move(p)); }
  static LocalAction dense(OrderMap m) { return LocalAction(std::move(m)); }

  static LocalAction identity_for(Palette const& palette) {
    if (palette.kind == PaletteKind::ears) {
      return ears(EarPerm::identity(palette.arity));
    }
    return dense(OrderMap::identity());
  }

  PaletteKind kind() const { return kind_; }
  EarPerm const& ear_perm() const { return *ear_; }
  OrderMap const& order_map() const { return dense_; }

  Color apply(Color const& c) const {
    if (kind_ == PaletteKind::ears) {
      return Color::ear(ear_->apply(c.ear_index()));
    }
    return Color::dense(dense_.apply(c.angle()));
  }

  LocalAction inverse() const {
    if (kind_ == PaletteKind::ears) {
      return ears(ear_->inverse());
    }
    return dense(dense_.inverse());
  }

  LocalAction after(LocalAction const& inner) const {
    if (kind_ != inner.kind_) {
      throw std::invalid_argument("local action palettes differ");
    }
    if (kind_ == PaletteKind::ears) {
      return ears(ear_->after(*inner.ear_));
    }
    return dense(dense_.after(inner.dense_));
  }

  bool is_identity() const {
    return kind_ == PaletteKind::ears ? ear_->is_identity()
                                      : dense_.is_identity();
  }

  bool operator==(LocalAction const& other) const {
    if (kind_ != other.kind_) {
      return false;
    }
    if (kind_ == PaletteKind::ears) {
      return *ear_ == *other.ear_;
    }
    return dense_ == other.dense_;
  }

  // The rotation of the palette taking color `from` to color `to`.
  static LocalAction rotation_through(Palette const& palette,
                                      Color const& from, Color const& to) {
    if (palette.kind == PaletteKind::ears) {
      int shift = to.ear_index() - from.ear_index();
      return ears(EarPerm::rotation(palette.arity, shift));
    }
    return dense(OrderMap::rotation(to.angle() - from.angle()));
  }

 private:
  explicit LocalAction(EarPerm p)
      : kind_(PaletteKind::ears), ear_(std::move(p)), dense_(OrderMap::identity()) {}
  explicit LocalAction(OrderMap m)
      : kind_(PaletteKind::angles), dense_(std::move(m)) {}

  PaletteKind kind_;
  std::optional<EarPerm> ear_;
  OrderMap dense_;
};

// Prescribed groups of local actions.
enum class EarGroup { trivial, cyclic, symmetric };
enum class DenseGroup { trivial, aut_orientation, aut_separation };

inline bool ear_group_contains(EarGroup g, EarPerm const& p) {
  switch (g) {
    case EarGroup::trivial:
      return p.is_identity();
    case EarGroup::cyclic:
      return p.rotation_shift().has_value();
    default:
      return true;
  }
}

inline bool dense_group_contains(DenseGroup g, OrderMap const& m) {
  switch (g) {
    case DenseGroup::trivial:
      return m.is_identity();
    case DenseGroup::aut_orientation:
      return !m.reversing();
    default:
      return true;
  }
}

// An automorphism of a biregular tree given by finite data: the image of
// the root plus explicit local actions on a rooted, ancestor-closed
// support. Off the support, actions are the canonical palette rotations
// forced by the inbound colors, so the element is defined on the whole
// tree and can be evaluated anywhere.
class TreeElement {
 public:
  using ActionMap = std::map<VertexAddress, LocalAction>;

  static TreeElement identity(std::shared_ptr<TreeShape const> shape) {
    ActionMap actions;
    actions[VertexAddress()] = LocalAction::identity_for(shape->root_palette);
    return TreeElement(std::move(shape), VertexAddress(), std::move(actions));
  }

  static TreeElement make(std::shared_ptr<TreeShape const> shape,
                          VertexAddress root_image, ActionMap actions) {
    return TreeElement(std::move(shape), std::move(root_image),
                       std::move(actions));
  }

  std::shared_ptr<TreeShape const> const& shape_ptr() const { return shape_; }
  TreeShape const& shape() const { return *shape_; }
  VertexAddress const& root_image() const { return root_image_; }
  ActionMap const& actions() const { return actions_; }

  bool is_identity_on(std::vector<VertexAddress> const& sample) const {
    for (auto const& v : sample) {
      if (!(evaluate(v) == v)) {
        return false;
      }
    }
    return true;
  }

  VertexAddress evaluate(VertexAddress const& v) const {
    VertexAddress cur;                 // walks down towards v
    VertexAddress img = root_image_;   // image of cur
    std::optional<VertexAddress> prev_cur;
    std::optional<VertexAddress> prev_img;
    for (auto const& letter : v.word()) {
      LocalAction sigma = action_at(cur, prev_cur, prev_img);
      Color image_color = sigma.apply(letter);
      prev_cur = cur;
      prev_img = img;
      cur = cur.child(letter);
      img = step(*shape_, img, image_color);
    }
    return img;
  }

  LocalAction local_action(VertexAddress const& v) const {
    if (v.is_root()) {
      return actions_.at(VertexAddress());
    }
    VertexAddress parent = v.parent();
    auto it = actions_.find(v);
    if (it != actions_.end()) {
      return it->second;
    }
    return derived_action(v, parent, evaluate(parent));
  }

  TreeElement after(TreeElement const& inner) const {
    TreeElement inner_inverse = inner.inverse();
    std::set<VertexAddress> support;
    for (auto const& [v, a] : inner.actions_) {
      support.insert(v);
    }
    for (auto const& [w, a] : actions_) {
      support.insert(inner_inverse.evaluate(w));
    }
    ancestor_close(support);
    ActionMap actions;
    for (auto const& v : support) {
      actions.emplace(v, local_action(inner.evaluate(v)).after(
                             inner.local_action(v)));
    }
    return TreeElement(shape_, evaluate(inner.root_image_),
                       std::move(actions));
  }

  TreeElement inverse() const {
    // Descend to the preimage of the root, collecting the spine pairs.
    std::vector<std::pair<VertexAddress, VertexAddress>> spine;  // (v, g(v))
    VertexAddress cur;
    VertexAddress img = root_image_;
    std::optional<VertexAddress> prev_cur;
    std::optional<VertexAddress> prev_img;
    spine.emplace_back(cur, img);
    while (!img.is_root()) {
      Color up = in_color(*shape_, img.parent());
      LocalAction sigma = action_at(cur, prev_cur, prev_img);
      Color down = sigma.inverse().apply(up);
      prev_cur = cur;
      prev_img = img;
      cur = cur.child(down);
      img = img.parent();
      spine.emplace_back(cur, img);
    }
    VertexAddress root_preimage = cur;

    // Preimages of every vertex we will store an action at.
    std::map<VertexAddress, VertexAddress> preimage;
    for (auto const& [v, w] : spine) {
      preimage[w] = v;
    }
    for (auto const& [v, a] : actions_) {
      preimage[evaluate(v)] = v;
    }
    std::set<VertexAddress> support;
    for (auto const& [w, v] : preimage) {
      support.insert(w);
    }
    ancestor_close(support);
    ActionMap actions;
    for (auto const& w : support) {
      auto it = preimage.find(w);
      if (it == preimage.end()) {
        throw InconsistentElement("inverse support not closed");
      }
      actions.emplace(w, local_action(it->second).inverse());
    }
    return TreeElement(shape_, root_preimage, std::move(actions));
  }

  // True iff every local action lies in the prescribed group of its side:
  // N for ear palettes, M for angle palettes.
  bool is_member(EarGroup n_group, DenseGroup m_group) const {
    auto group_ok = [&](LocalAction const& a) {
      return a.kind() == PaletteKind::ears
                 ? ear_group_contains(n_group, a.ear_perm())
                 : dense_group_contains(m_group, a.order_map());
    };
    for (auto const& [v, a] : actions_) {
      if (!group_ok(a)) {
        return false;
      }
      // Default actions in the branches hanging off v are rotations; they
      // only constrain trivial prescriptions.
      Palette const& opposite =
          shape_->palette_at_depth(v.depth() + 1);
      bool opposite_trivial = opposite.kind == PaletteKind::ears
                                  ? n_group == EarGroup::trivial
                                  : m_group == DenseGroup::trivial;
      if (opposite_trivial && has_nonsupport_child(v) &&
          !(in_color(*shape_, v) == in_color(*shape_, evaluate(v)))) {
        return false;
      }
      Palette const& own = shape_->palette_at_depth(v.depth());
      bool own_trivial = own.kind == PaletteKind::ears
                             ? n_group == EarGroup::trivial
                             : m_group == DenseGroup::trivial;
      if (own_trivial && !nonsupport_colors_fixed(v, a)) {
        return false;
      }
    }
    return true;
  }

  // The constant value of the orientation homomorphism: the common ear
  // local action, asserted equal across all materialized ear-side data.
  EarPerm orientation_hom() const {
    if (shape_->other_palette.kind != PaletteKind::ears) {
      throw WrongSide();
    }
    if (!is_member(EarGroup::cyclic, DenseGroup::aut_orientation)) {
      throw NotOrientation();
    }
    int n = shape_->other_palette.arity;
    std::optional<EarPerm> common;
    auto note = [&](EarPerm const& p) {
      if (!common) {
        common = p;
      } else if (!(*common == p)) {
        throw IllDefined();
      }
    };
    for (auto const& [v, a] : actions_) {
      if (a.kind() == PaletteKind::ears) {
        note(a.ear_perm());
      } else {
        // Ear vertices hanging below v act by the rotation forced by the
        // inbound ear colors of v and its image.
        Color from = in_color(*shape_, v);
        Color to = in_color(*shape_, evaluate(v));
        note(EarPerm::rotation(n, to.ear_index() - from.ear_index()));
      }
    }
    if (!common) {
      throw IllDefined();
    }
    return *common;
  }

  // Constructs an element from a partial tree homomorphism on a
  // center-closed set, extended canonically beyond it. Branch rules, when
  // given, fix the local action at a support vertex on the colors the map
  // itself does not constrain.
  static TreeElement patchwork(
      std::shared_ptr<TreeShape const> shape,
      std::vector<VertexAddress> const& domain,
      std::vector<VertexAddress> const& codomain,
      std::vector<std::pair<VertexAddress, VertexAddress>> const& f,
      std::map<VertexAddress, LocalAction> const& branch_rule = {}) {
    if (domain.empty()) {
      return identity(std::move(shape));
    }
    if (!is_center_closed(domain) || !is_center_closed(codomain)) {
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
      if (v.depth() % 2 != w.depth() % 2) {
        throw NotPartialHomomorphism("bipartition not preserved");
      }
      if (!valid_address(*shape, w)) {
        throw NotPartialHomomorphism("image is not a valid address");
      }
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t j = i + 1; j < f.size(); ++j) {
        if (tree_distance(f[i].first, f[j].first) !=
            tree_distance(f[i].second, f[j].second)) {
          throw NotPartialHomomorphism("distances are not preserved");
        }
      }
    }

    // Extend f over the hull of the domain.
    std::map<VertexAddress, VertexAddress> fhat;
    for (auto const& [v, w] : f) {
      fhat[v] = w;
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t j = i + 1; j < f.size(); ++j) {
        auto src_path = path_between(f[i].first, f[j].first);
        auto dst_path = path_between(f[i].second, f[j].second);
        for (std::size_t k = 0; k < src_path.size(); ++k) {
          auto [it, inserted] = fhat.emplace(src_path[k], dst_path[k]);
          if (!inserted && !(it->second == dst_path[k])) {
            throw NotPartialHomomorphism("hull images disagree");
          }
        }
      }
    }

    // Grow a spine from the hull up to the root, extending canonically.
    VertexAddress top = fhat.begin()->first;
    for (auto const& [v, w] : fhat) {
      if (v.depth() < top.depth()) {
        top = v;
      }
    }
    std::map<VertexAddress, LocalAction> spine_actions;
    if (!top.is_root()) {
      // The action at `top` on the upward color is needed first; it comes
      // from the forced pairs and the branch rule below.
      VertexAddress cur = top;
      while (!cur.is_root()) {
        VertexAddress parent = cur.parent();
        LocalAction sigma =
            cur == top
                ? support_action(*shape, fhat, branch_rule, cur)
                : spine_actions.at(cur);
        Color up = in_color(*shape, parent);
        Color up_image = sigma.apply(up);
        VertexAddress parent_image = step(*shape, fhat.at(cur), up_image);
        fhat[parent] = parent_image;
        if (!parent.is_root()) {
          spine_actions.emplace(
              parent,
              LocalAction::rotation_through(
                  shape->palette_at_depth(parent.depth()),
                  in_color(*shape, cur), in_color(*shape, fhat.at(cur))));
        }
        cur = parent;
      }
    }

    // Assemble stored actions on the ancestor-closed support.
    std::set<VertexAddress> support;
    for (auto const& [v, w] : fhat) {
      support.insert(v);
    }
    ancestor_close(support);
    ActionMap actions;
    for (auto const& v : support) {
      if (auto it = spine_actions.find(v); it != spine_actions.end()) {
        actions.emplace(v, it->second);
      } else {
        actions.emplace(v, support_action(*shape, fhat, branch_rule, v));
      }
    }
    return TreeElement(shape, fhat.at(VertexAddress()), std::move(actions));
  }

 private:
  TreeElement(std::shared_ptr<TreeShape const> shape, VertexAddress root_image,
              ActionMap actions)
      : shape_(std::move(shape)),
        root_image_(std::move(root_image)),
        actions_(std::move(actions)) {
    validate();
  }

  static void ancestor_close(std::set<VertexAddress>& s) {
    std::vector<VertexAddress> queue(s.begin(), s.end());
    for (auto const& v : queue) {
      VertexAddress cur = v;
      while (!cur.is_root()) {
        cur = cur.parent();
        s.insert(cur);
      }
    }
    s.insert(VertexAddress());
  }

  // The derived default action at an off-support vertex: the palette
  // rotation taking the inbound color of its parent to the inbound color
  // of the parent's image.
  LocalAction derived_action(VertexAddress const& v,
                             VertexAddress const& parent,
                             VertexAddress const& parent_image) const {
    return LocalAction::rotation_through(
        shape_->palette_at_depth(v.depth()), in_color(*shape_, parent),
        in_color(*shape_, parent_image));
  }

  LocalAction action_at(VertexAddress const& cur,
                        std::optional<VertexAddress> const& prev_cur,
                        std::optional<VertexAddress> const& prev_img) const {
    auto it = actions_.find(cur);
    if (it != actions_.end()) {
      return it->second;
    }
    if (!prev_cur) {
      throw InconsistentElement("root action missing");
    }
    return derived_action(cur, *prev_cur, *prev_img);
  }

  bool has_nonsupport_child(VertexAddress const& v) const {
    Palette const& palette = shape_->palette_at_depth(v.depth());
    if (palette.kind == PaletteKind::angles) {
      return true;  // infinitely many children, finitely many keys
    }
    auto letters = child_letters(*shape_, v, 0);
    for (auto const& l : letters) {
      if (actions_.find(v.child(l)) == actions_.end()) {
        return true;
      }
    }
    return false;
  }

  bool nonsupport_colors_fixed(VertexAddress const& v,
                               LocalAction const& a) const {
    if (a.kind() == PaletteKind::angles) {
      // An interpolated order map fixing all but finitely many angles is
      // the identity.
      return a.is_identity() || !has_nonsupport_child(v);
    }
    auto letters = child_letters(*shape_, v, 0);
    for (auto const& l : letters) {
      if (actions_.find(v.child(l)) == actions_.end() && !(a.apply(l) == l)) {
        return false;
      }
    }
    return true;
  }

  // The stored action at a support vertex: forced on colors towards
  // support neighbours, branch rule or canonical completion elsewhere.
  static LocalAction support_action(
      TreeShape const& shape,
      std::map<VertexAddress, VertexAddress> const& fhat,
      std::map<VertexAddress, LocalAction> const& branch_rule,
      VertexAddress const& v) {
    Palette const& palette = shape.palette_at_depth(v.depth());
    VertexAddress const& image = fhat.at(v);
    std::vector<std::pair<Color, Color>> forced;
    auto add_forced = [&](VertexAddress const& w) {
      forced.emplace_back(half_edge_color(shape, v, w),
                          half_edge_color(shape, image, fhat.at(w)));
    };
    if (!v.is_root() && fhat.count(v.parent())) {
      add_forced(v.parent());
    }
    for (auto const& [w, wi] : fhat) {
      if (w.depth() == v.depth() + 1 && v.is_prefix_of(w)) {
        add_forced(w);
      }
    }
    if (auto it = branch_rule.find(v); it != branch_rule.end()) {
      LocalAction const& rule = it->second;
      if (rule.kind() != palette.kind) {
        throw BoundaryMismatch();
      }
      for (auto const& [c, ci] : forced) {
        if (!(rule.apply(c) == ci)) {
          throw BoundaryMismatch();
        }
      }
      return rule;
    }
    return canonical_completion(palette, forced);
  }

  // Completes forced color pairs to a full palette permutation: the
  // rotation when one fits, otherwise the order-preserving matching of
  // the remaining colors (interpolation, for angle palettes).
  static LocalAction canonical_completion(
      Palette const& palette,
      std::vector<std::pair<Color, Color>> const& forced) {
    if (palette.kind == PaletteKind::angles) {
      std::vector<std::pair<Angle, Angle>> pins;
      for (auto const& [c, ci] : forced) {
        pins.emplace_back(c.angle(), ci.angle());
      }
      FinitePartialMap partial(pins);
      try {
        return LocalAction::dense(OrderMap::from_partial(partial));
      } catch (NotMonotone const&) {
        throw NotPartialHomomorphism("angle colors are not monotone");
      }
    }
    int n = palette.arity;
    if (forced.empty()) {
      return LocalAction::ears(EarPerm::identity(n));
    }
    int shift = forced[0].second.ear_index() - forced[0].first.ear_index();
    bool rotation_fits = true;
    for (auto const& [c, ci] : forced) {
      if ((ci.ear_index() - c.ear_index() - shift) % n != 0) {
        rotation_fits = false;
        break;
      }
    }
    if (rotation_fits) {
      return LocalAction::ears(EarPerm::rotation(n, shift));
    }
    std::vector<int> img(n, 0);
    std::vector<bool> source_used(n + 1, false), target_used(n + 1, false);
    for (auto const& [c, ci] : forced) {
      if (source_used[c.ear_index()] || target_used[ci.ear_index()]) {
        throw NotPartialHomomorphism("forced ear colors collide");
      }
      img[c.ear_index() - 1] = ci.ear_index();
      source_used[c.ear_index()] = true;
      target_used[ci.ear_index()] = true;
    }
    std::vector<int> free_targets;
    for (int t = 1; t <= n; ++t) {
      if (!target_used[t]) {
        free_targets.push_back(t);
      }
    }
    std::size_t next = 0;
    for (int s = 1; s <= n; ++s) {
      if (!source_used[s]) {
        img[s - 1] = free_targets[next++];
      }
    }
    return LocalAction::ears(EarPerm::from_images(std::move(img)));
  }

  void validate() const {
    if (!valid_address(*shape_, root_image_) ||
        root_image_.depth() % 2 != 0) {
      throw InconsistentElement("root image");
    }
    if (actions_.find(VertexAddress()) == actions_.end()) {
      throw InconsistentElement("support must contain the root");
    }
    for (auto const& [v, a] : actions_) {
      Palette const& palette = shape_->palette_at_depth(v.depth());
      if (a.kind() != palette.kind ||
          (palette.kind == PaletteKind::ears &&
           a.ear_perm().size() != palette.arity)) {
        throw InconsistentElement("action palette mismatch");
      }
      if (!v.is_root()) {
        if (actions_.find(v.parent()) == actions_.end()) {
          throw InconsistentElement("support is not ancestor-closed");
        }
        // Parent-ward consistency of the stored action.
        VertexAddress parent_image = evaluate(v.parent());
        Color up = in_color(*shape_, v.parent());
        if (!(a.apply(up) == in_color(*shape_, parent_image))) {
          throw InconsistentElement("stored action contradicts the images");
        }
      }
    }
  }

  std::shared_ptr<TreeShape const> shape_;
  VertexAddress root_image_;
  ActionMap actions_;
};

// Color of the circle side: the constant ear shown into a circle vertex.
inline int circle_color(TreeShape const& shape, VertexAddress const& v) {
  if (shape.other_palette.kind != PaletteKind::ears || !v.root_side()) {
    throw WrongSide();
  }
  return in_color(shape, v).ear_index();
}

}  // namespace fractalgroups
