#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hjb {

// Real number extended with +infinity. No -infinity and no NaN can be
// represented; attempting to construct one throws. Used as the codomain of
// Lagrangians, which are proper (never -inf) but may take the value +inf.
class ExtendedReal {
 public:
  ExtendedReal() = default;

  ExtendedReal(double v) : v_(v) {
    if (std::isnan(v)) throw std::invalid_argument("ExtendedReal: NaN");
    if (v == -std::numeric_limits<double>::infinity())
      throw std::invalid_argument("ExtendedReal: -infinity");
  }

  static ExtendedReal infinity() {
    ExtendedReal e;
    e.v_ = std::numeric_limits<double>::infinity();
    return e;
  }

  bool is_finite() const { return std::isfinite(v_); }
  bool is_infinite() const { return !std::isfinite(v_); }

  // Finite payload; +inf as a plain double when infinite.
  double raw() const { return v_; }

  // Finite value; calling this on +infinity is a programming error.
  double value() const {
    if (!is_finite()) throw std::logic_error("ExtendedReal::value on +infinity");
    return v_;
  }

  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }
  friend bool operator!=(ExtendedReal a, ExtendedReal b) { return a.v_ != b.v_; }
  friend bool operator<(ExtendedReal a, ExtendedReal b) { return a.v_ < b.v_; }
  friend bool operator<=(ExtendedReal a, ExtendedReal b) { return a.v_ <= b.v_; }
  friend bool operator>(ExtendedReal a, ExtendedReal b) { return a.v_ > b.v_; }
  friend bool operator>=(ExtendedReal a, ExtendedReal b) { return a.v_ >= b.v_; }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return ExtendedReal(a.v_ + b.v_);
  }

  friend ExtendedReal min(ExtendedReal a, ExtendedReal b) { return a < b ? a : b; }

 private:
  double v_ = 0.0;
};

}  // namespace hjb
