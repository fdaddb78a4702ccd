#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fractalgroups/angle.hpp"

namespace fractalgroups {

enum class Orientation { positive, negative };

inline Orientation opposite(Orientation o) {
  return o == Orientation::positive ? Orientation::negative
                                    : Orientation::positive;
}

struct DegenerateTriple : std::invalid_argument {
  DegenerateTriple()
      : std::invalid_argument("orient requires three pairwise distinct angles") {}
};

struct DegenerateQuadruple : std::invalid_argument {
  DegenerateQuadruple()
      : std::invalid_argument(
            "separates requires four pairwise distinct angles") {}
};

struct TooFewPoints : std::invalid_argument {
  TooFewPoints()
      : std::invalid_argument("classification needs at least three pairs") {}
};

struct DegeneratePair : std::invalid_argument {
  DegeneratePair()
      : std::invalid_argument("transitivity witness needs distinct endpoints") {}
};

struct NotMonotone : std::invalid_argument {
  NotMonotone()
      : std::invalid_argument("map does not preserve or reverse the order") {}
};

struct Singleton : std::invalid_argument {
  Singleton() : std::invalid_argument("cyclic successor needs two points") {}
};

struct NotMember : std::invalid_argument {
  NotMember() : std::invalid_argument("point does not belong to the set") {}
};

// [a, b, c] holds iff, lifting b and c to the interval (a, a + 1), the
// lift of b precedes the lift of c.
inline Orientation orient(Angle const& a, Angle const& b, Angle const& c) {
  if (a == b || b == c || a == c) {
    throw DegenerateTriple();
  }
  Rational lift_b = frac_mod_one(b.value() - a.value());
  Rational lift_c = frac_mod_one(c.value() - a.value());
  return lift_b < lift_c ? Orientation::positive : Orientation::negative;
}

// S(a,b,c,d) iff [a,b,c] and [c,d,a], or [a,d,c] and [c,b,a].
inline bool separates(Angle const& a, Angle const& b, Angle const& c,
                      Angle const& d) {
  Angle const points[4] = {a, b, c, d};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (points[i] == points[j]) {
        throw DegenerateQuadruple();
      }
    }
  }
  bool first = orient(a, b, c) == Orientation::positive &&
               orient(c, d, a) == Orientation::positive;
  bool second = orient(a, d, c) == Orientation::positive &&
                orient(c, b, a) == Orientation::positive;
  return first || second;
}

// Minimum of F \ {x} for the linear order y <_x z iff [x, y, z].
inline Angle cyclic_successor(std::vector<Angle> const& points,
                              Angle const& x) {
  if (std::find(points.begin(), points.end(), x) == points.end()) {
    throw NotMember();
  }
  if (points.size() < 2) {
    throw Singleton();
  }
  std::optional<Angle> best;
  for (auto const& y : points) {
    if (y == x) {
      continue;
    }
    if (!best || frac_mod_one(y.value() - x.value()) <
                     frac_mod_one(best->value() - x.value())) {
      best = y;
    }
  }
  return *best;
}

enum class MapKind { preserving, reversing, neither };

// A finite injective association of angles.
class FinitePartialMap {
 public:
  FinitePartialMap() = default;

  explicit FinitePartialMap(std::vector<std::pair<Angle, Angle>> pairs)
      : pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end(),
              [](auto const& l, auto const& r) { return l.first < r.first; });
    for (std::size_t i = 0; i + 1 < pairs_.size(); ++i) {
      if (pairs_[i].first == pairs_[i + 1].first) {
        throw std::invalid_argument("duplicate source in partial map");
      }
    }
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      for (std::size_t j = i + 1; j < pairs_.size(); ++j) {
        if (pairs_[i].second == pairs_[j].second) {
          throw std::invalid_argument("duplicate target in partial map");
        }
      }
    }
  }

  std::vector<std::pair<Angle, Angle>> const& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

  bool has_source(Angle const& x) const {
    for (auto const& [s, t] : pairs_) {
      if (s == x) {
        return true;
      }
    }
    return false;
  }

  Angle at(Angle const& x) const {
    for (auto const& [s, t] : pairs_) {
      if (s == x) {
        return t;
      }
    }
    throw NotMember();
  }

  FinitePartialMap with(Angle const& source, Angle const& target) const {
    auto extended = pairs_;
    extended.emplace_back(source, target);
    return FinitePartialMap(std::move(extended));
  }

  bool operator==(FinitePartialMap const& other) const = default;

 private:
  std::vector<std::pair<Angle, Angle>> pairs_;  // sorted by source
};

// preserving iff orient agrees on every source/target triple, reversing
// iff it is negated on every triple.
inline MapKind classify(FinitePartialMap const& m) {
  if (m.size() < 3) {
    throw TooFewPoints();
  }
  bool all_preserved = true;
  bool all_reversed = true;
  auto const& pairs = m.pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      for (std::size_t k = j + 1; k < pairs.size(); ++k) {
        Orientation src =
            orient(pairs[i].first, pairs[j].first, pairs[k].first);
        Orientation dst =
            orient(pairs[i].second, pairs[j].second, pairs[k].second);
        if (src == dst) {
          all_reversed = false;
        } else {
          all_preserved = false;
        }
      }
    }
  }
  if (all_preserved) {
    return MapKind::preserving;
  }
  if (all_reversed) {
    return MapKind::reversing;
  }
  return MapKind::neither;
}

// A bijection of Q/Z given by finitely many pinned pairs together with the
// canonical interpolation rule: between consecutive pins, the map is the
// affine correspondence of the two arcs (traversed backwards for reversing
// maps). With no pins this is the identity or the reflection x -> -x; with
// one pin it is a rotation or a point reflection. Pinned composition and
// inversion are exact, so group identities can be asserted as equalities
// of functions.
class OrderMap {
 public:
  static OrderMap identity() { return OrderMap(false, {}); }

  static OrderMap rotation(Angle const& delta) {
    if (delta == Angle()) {
      return identity();
    }
    return OrderMap(false, {{Angle(), delta}});
  }

  static OrderMap reflection() { return OrderMap(true, {}); }

  static OrderMap preserving(std::vector<std::pair<Angle, Angle>> pins) {
    OrderMap m(false, std::move(pins));
    m.validate();
    return m;
  }

  static OrderMap reversing(std::vector<std::pair<Angle, Angle>> pins) {
    OrderMap m(true, std::move(pins));
    m.validate();
    return m;
  }

  static OrderMap from_partial(FinitePartialMap const& m) {
    if (m.size() >= 3 && classify(m) == MapKind::neither) {
      throw NotMonotone();
    }
    bool rev = m.size() >= 3 && classify(m) == MapKind::reversing;
    return OrderMap(rev, m.pairs());
  }

  bool reversing() const { return reversing_; }
  std::vector<std::pair<Angle, Angle>> const& pins() const { return pins_; }

  Angle apply(Angle const& x) const {
    if (pins_.empty()) {
      return reversing_ ? x.negated() : x;
    }
    for (auto const& [s, t] : pins_) {
      if (s == x) {
        return t;
      }
    }
    auto [lo, hi] = bracket(x);
    Angle const& s0 = pins_[lo].first;
    Angle const& t0 = pins_[lo].second;
    Angle const& s1 = pins_[hi].first;
    Angle const& t1 = pins_[hi].second;
    Rational src_len = ccw_arc_length(s0, s1);
    Rational offset = frac_mod_one(x.value() - s0.value());
    if (!reversing_) {
      Rational dst_len = ccw_arc_length(t0, t1);
      return Angle(t0.value() + offset * dst_len / src_len);
    }
    Rational dst_len = ccw_arc_length(t1, t0);
    return Angle(t0.value() - offset * dst_len / src_len);
  }

  OrderMap inverse() const {
    std::vector<std::pair<Angle, Angle>> inverted;
    inverted.reserve(pins_.size());
    for (auto const& [s, t] : pins_) {
      inverted.emplace_back(t, s);
    }
    return OrderMap(reversing_, std::move(inverted));
  }

  // this after inner; pin sets are merged so the result is the exact
  // composite as a function.
  OrderMap after(OrderMap const& inner) const {
    std::vector<Angle> sources;
    for (auto const& [s, t] : inner.pins_) {
      sources.push_back(s);
    }
    OrderMap inner_inverse = inner.inverse();
    for (auto const& [s, t] : pins_) {
      Angle preimage = inner_inverse.apply(s);
      if (std::find(sources.begin(), sources.end(), preimage) ==
          sources.end()) {
        sources.push_back(preimage);
      }
    }
    std::vector<std::pair<Angle, Angle>> combined;
    combined.reserve(sources.size());
    for (auto const& s : sources) {
      combined.emplace_back(s, apply(inner.apply(s)));
    }
    return OrderMap(reversing_ != inner.reversing_, std::move(combined));
  }

  bool is_identity() const {
    if (reversing_) {
      return false;
    }
    for (auto const& [s, t] : pins_) {
      if (!(s == t)) {
        return false;
      }
    }
    return true;
  }

  // A rotation in the exact sense: some x -> x + delta.
  std::optional<Angle> rotation_offset() const {
    if (reversing_) {
      return std::nullopt;
    }
    if (pins_.empty()) {
      return Angle();
    }
    Angle delta = pins_[0].second - pins_[0].first;
    for (auto const& [s, t] : pins_) {
      if (!(t - s == delta)) {
        return std::nullopt;
      }
    }
    return delta;
  }

  // Equality as functions on Q/Z.
  bool operator==(OrderMap const& other) const {
    if (reversing_ != other.reversing_) {
      // Maps of opposite orientation can only coincide on <= 2 points.
      return false;
    }
    for (auto const& [s, t] : pins_) {
      if (!(other.apply(s) == t)) {
        return false;
      }
    }
    for (auto const& [s, t] : other.pins_) {
      if (!(apply(s) == t)) {
        return false;
      }
    }
    if (pins_.empty() && other.pins_.empty()) {
      return true;
    }
    // Both are affine between the merged pins and agree on all of them,
    // except that pinless maps need one probe.
    if (pins_.empty() || other.pins_.empty()) {
      Angle probe =
          pins_.empty() ? other.pins_[0].first + Angle(1, 3) : pins_[0].first + Angle(1, 3);
      return apply(probe) == other.apply(probe);
    }
    return true;
  }

 private:
  OrderMap(bool reversing, std::vector<std::pair<Angle, Angle>> pins)
      : reversing_(reversing), pins_(std::move(pins)) {
    std::sort(pins_.begin(), pins_.end(),
              [](auto const& l, auto const& r) { return l.first < r.first; });
  }

  void validate() const {
    for (std::size_t i = 0; i + 1 < pins_.size(); ++i) {
      if (pins_[i].first == pins_[i + 1].first) {
        throw std::invalid_argument("duplicate source pin");
      }
    }
    if (pins_.size() < 2) {
      return;
    }
    // Targets must be cyclically monotone in the stated direction.
    std::size_t descents = 0;
    for (std::size_t i = 0; i < pins_.size(); ++i) {
      Angle const& cur = pins_[i].second;
      Angle const& nxt = pins_[(i + 1) % pins_.size()].second;
      if (cur == nxt) {
        throw std::invalid_argument("duplicate target pin");
      }
      bool ascent = cur < nxt;
      if (reversing_ ? ascent : !ascent) {
        ++descents;
      }
    }
    if (descents > 1) {
      throw NotMonotone();
    }
  }

  // Indices of the consecutive pins whose source arc strictly contains x.
  std::pair<std::size_t, std::size_t> bracket(Angle const& x) const {
    std::size_t n = pins_.size();
    if (n == 1) {
      return {0, 0};
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = (i + 1) % n;
      if (in_open_arc(x, pins_[i].first, pins_[j].first)) {
        return {i, j};
      }
    }
    throw std::logic_error("bracket: unpinned angle not located");
  }

  bool reversing_;
  std::vector<std::pair<Angle, Angle>> pins_;  // sorted by source
};

// Extends a monotone partial map by one source point, choosing the image
// canonically: the affine interpolation between the neighbouring pinned
// pairs. The choice is independent of the order in which points are added.
inline FinitePartialMap extend_point(FinitePartialMap const& m,
                                     Angle const& x) {
  if (m.has_source(x)) {
    throw std::invalid_argument("extend_point: source already present");
  }
  OrderMap extension = OrderMap::from_partial(m);
  return m.with(x, extension.apply(x));
}

// An orientation-preserving piecewise affine bijection of Q/Z: on the arc
// [breakpoint i, breakpoint i+1) the rule is x -> p x + q mod 1.
class PiecewiseAffineMap {
 public:
  struct Piece {
    Angle from;        // arc start (inclusive)
    Rational slope;    // p > 0
    Rational offset;   // q
  };

  explicit PiecewiseAffineMap(std::vector<Piece> pieces)
      : pieces_(std::move(pieces)) {
    if (pieces_.empty()) {
      throw std::invalid_argument("piecewise map needs at least one piece");
    }
    std::sort(pieces_.begin(), pieces_.end(), [](auto const& l, auto const& r) {
      return l.from < r.from;
    });
  }

  std::vector<Piece> const& pieces() const { return pieces_; }

  Angle apply(Angle const& x) const {
    Piece const& piece = locate(x);
    // Lift x into [piece.from, piece.from + 1) so the rule is affine on
    // the whole arc even when it wraps past 1.
    Rational lifted =
        piece.from.value() + frac_mod_one(x.value() - piece.from.value());
    return Angle(piece.slope * lifted + piece.offset);
  }

  bool is_identity() const {
    for (auto const& piece : pieces_) {
      if (piece.slope != Rational(1) ||
          frac_mod_one(piece.offset) != Rational(0)) {
        return false;
      }
    }
    return true;
  }

 private:
  Piece const& locate(Angle const& x) const {
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      std::size_t j = (i + 1) % pieces_.size();
      if (x == pieces_[i].from ||
          in_open_arc(x, pieces_[i].from, pieces_[j].from)) {
        return pieces_[i];
      }
    }
    return pieces_.front();
  }

  std::vector<Piece> pieces_;
};

// Order-preserving witness sending a -> a2 and b -> b2: the two-piece
// affine rescaling of the complementary arcs, conjugated by rotations that
// move a and a2 to zero.
inline PiecewiseAffineMap two_transitive_witness(Angle const& a,
                                                 Angle const& b,
                                                 Angle const& a2,
                                                 Angle const& b2) {
  if (a == b || a2 == b2) {
    throw DegeneratePair();
  }
  Rational beta = ccw_arc_length(a, b);
  Rational beta2 = ccw_arc_length(a2, b2);
  // First piece: [a, b) -> [a2, b2), slope beta2/beta.
  Rational p1 = beta2 / beta;
  Rational q1 = a2.value() - p1 * a.value();
  // Second piece: [b, a) -> [b2, a2), slope (1-beta2)/(1-beta).
  Rational p2 = (Rational(1) - beta2) / (Rational(1) - beta);
  Rational q2 = b2.value() - p2 * b.value();
  return PiecewiseAffineMap({{a, p1, q1}, {b, p2, q2}});
}

}  // namespace fractalgroups
