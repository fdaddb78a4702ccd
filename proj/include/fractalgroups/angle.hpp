#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace fractalgroups {

using Int      = boost::multiprecision::cpp_int;
using Rational = boost::rational<Int>;

inline Rational rational_of(long num, long den = 1) {
  return Rational(Int(num), Int(den));
}

// Fractional part in [0, 1).
inline Rational frac_mod_one(Rational const& x) {
  Int q = x.numerator() / x.denominator();
  Rational r = x - Rational(q, Int(1));
  if (r < Rational(0)) {
    r += Rational(1);
  }
  return r;
}

// A point of the rational circle Q/Z, kept as the reduced representative
// p/q with 0 <= p < q. All order logic in the library is exact; floating
// point never enters here.
class Angle {
 public:
  Angle() : value_(0) {}

  explicit Angle(Rational const& v) : value_(frac_mod_one(v)) {}

  Angle(long num, long den) : value_(frac_mod_one(rational_of(num, den))) {}

  Rational const& value() const { return value_; }
  Int numerator() const { return value_.numerator(); }
  Int denominator() const { return value_.denominator(); }

  bool operator==(Angle const& other) const = default;

  // Linear order of representatives in [0, 1); used for sorting and as a
  // tiebreaker, not as the circle structure.
  bool operator<(Angle const& other) const { return value_ < other.value_; }
  bool operator<=(Angle const& other) const { return value_ <= other.value_; }
  bool operator>(Angle const& other) const { return value_ > other.value_; }

  Angle operator+(Angle const& other) const {
    return Angle(value_ + other.value_);
  }

  Angle operator-(Angle const& other) const {
    return Angle(value_ - other.value_);
  }

  Angle negated() const { return Angle(-value_); }

  Angle doubled() const { return Angle(value_ * Rational(2)); }

  Angle half() const { return Angle(value_ / Rational(2)); }

  Angle half_plus() const {
    return Angle(value_ / Rational(2) + rational_of(1, 2));
  }

  std::string str() const {
    return numerator().str() + "/" + denominator().str();
  }

  static Angle parse(std::string const& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) {
      throw std::invalid_argument("angle must be written as p/q: " + s);
    }
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den <= 0) {
      throw std::invalid_argument("angle denominator must be positive: " + s);
    }
    return Angle(Rational(num, den));
  }

 private:
  Rational value_;
};

// Length of the counterclockwise arc from a to b, in (0, 1]; a full turn
// when a == b.
inline Rational ccw_arc_length(Angle const& a, Angle const& b) {
  if (a == b) {
    return Rational(1);
  }
  return frac_mod_one(b.value() - a.value());
}

// Whether x lies strictly inside the counterclockwise open arc (a, b);
// the arc is the full circle minus {a} when a == b.
inline bool in_open_arc(Angle const& x, Angle const& a, Angle const& b) {
  if (x == a || x == b) {
    return false;
  }
  if (a == b) {
    return true;
  }
  return frac_mod_one(x.value() - a.value()) <
         frac_mod_one(b.value() - a.value());
}

// The canonical enumeration of Q/Z ordered by (denominator, numerator):
// 0/1, 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, ...
inline Angle angle_by_index(std::size_t index) {
  std::size_t seen = 0;
  for (long den = 1;; ++den) {
    for (long num = 0; num < den; ++num) {
      if (std::gcd(num, den) != 1) {
        continue;
      }
      if (seen == index) {
        return Angle(num, den);
      }
      ++seen;
    }
  }
}

// First angle of the canonical enumeration not present in `used`.
template <typename Container>
Angle fresh_angle(Container const& used) {
  for (std::size_t i = 0;; ++i) {
    Angle candidate = angle_by_index(i);
    bool taken = false;
    for (auto const& u : used) {
      if (u == candidate) {
        taken = true;
        break;
      }
    }
    if (!taken) {
      return candidate;
    }
  }
}

}  // namespace fractalgroups
