#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "fractalgroups/angle.hpp"
#include "fractalgroups/cyclic_order.hpp"

namespace fractalgroups {

struct NotSubset : std::invalid_argument {
  NotSubset()
      : std::invalid_argument("split points to double must come from the base set") {}
};

enum class SplitSide { minus, plus, plain };

// A point of the doubled circle: each element of the split set A is
// replaced by the pair a-, a+ with a+ the cyclic successor of a-.
struct SplitPoint {
  Angle base;
  SplitSide side = SplitSide::plain;

  bool operator==(SplitPoint const& other) const = default;

  std::string str() const {
    switch (side) {
      case SplitSide::minus:
        return base.str() + "-";
      case SplitSide::plus:
        return base.str() + "+";
      default:
        return base.str();
    }
  }
};

inline Angle split_base(SplitPoint const& p) { return p.base; }

namespace detail {
inline int side_rank(SplitSide side) {
  return side == SplitSide::plus ? 1 : 0;
}

// Linear order realizing the split cyclic order: by base representative,
// then minus before plus.
inline bool split_less(SplitPoint const& l, SplitPoint const& r) {
  if (!(l.base == r.base)) {
    return l.base < r.base;
  }
  return side_rank(l.side) < side_rank(r.side);
}
}  // namespace detail

// Cyclic order of the split circle: it projects to the base order on
// points with distinct bases, and puts a+ right after a-.
inline Orientation split_orient(SplitPoint const& a, SplitPoint const& b,
                                SplitPoint const& c) {
  if (a == b || b == c || a == c) {
    throw DegenerateTriple();
  }
  bool ab = detail::split_less(a, b);
  bool bc = detail::split_less(b, c);
  bool ca = detail::split_less(c, a);
  // [a,b,c] in the induced cyclic order iff a<b<c up to rotation.
  int ascents = int(ab) + int(bc) + int(ca);
  return ascents >= 2 ? Orientation::positive : Orientation::negative;
}

inline bool split_separates(SplitPoint const& a, SplitPoint const& b,
                            SplitPoint const& c, SplitPoint const& d) {
  bool first = split_orient(a, b, c) == Orientation::positive &&
               split_orient(c, d, a) == Orientation::positive;
  bool second = split_orient(a, d, c) == Orientation::positive &&
                split_orient(c, b, a) == Orientation::positive;
  return first || second;
}

// Doubles every point of A inside `points`; the result is listed in the
// split cyclic order, starting from the linearly smallest base.
inline std::vector<SplitPoint> split(std::vector<Angle> const& points,
                                     std::vector<Angle> const& to_split) {
  for (auto const& a : to_split) {
    if (std::find(points.begin(), points.end(), a) == points.end()) {
      throw NotSubset();
    }
  }
  std::vector<SplitPoint> result;
  for (auto const& p : points) {
    bool doubled =
        std::find(to_split.begin(), to_split.end(), p) != to_split.end();
    if (doubled) {
      result.push_back({p, SplitSide::minus});
      result.push_back({p, SplitSide::plus});
    } else {
      result.push_back({p, SplitSide::plain});
    }
  }
  std::sort(result.begin(), result.end(), detail::split_less);
  return result;
}

}  // namespace fractalgroups
