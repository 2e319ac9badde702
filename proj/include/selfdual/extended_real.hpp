#pragma once

#include <cmath>
#include <compare>
#include <stdexcept>

namespace selfdual {

/// Extended real number: finite value, +infinity, or -infinity.
/// Infinities are explicit states, never sentinel doubles, and the
/// ordering -inf < finite < +inf is total.
class ExtendedReal {
 public:
  ExtendedReal() : state_(State::Finite), value_(0.0) {}
  ExtendedReal(double v) : state_(State::Finite), value_(v) {
    if (!std::isfinite(v)) throw std::invalid_argument("ExtendedReal: non-finite double");
  }

  static ExtendedReal plus_infinity() { return ExtendedReal(State::PlusInf); }
  static ExtendedReal minus_infinity() { return ExtendedReal(State::MinusInf); }

  bool is_finite() const { return state_ == State::Finite; }
  bool is_plus_infinity() const { return state_ == State::PlusInf; }
  bool is_minus_infinity() const { return state_ == State::MinusInf; }

  /// Finite value; throws if infinite.
  double finite() const {
    if (state_ != State::Finite) throw std::logic_error("ExtendedReal: not finite");
    return value_;
  }

  /// Value as a double for reporting only (+-HUGE_VAL for infinities).
  double as_double() const {
    switch (state_) {
      case State::PlusInf: return HUGE_VAL;
      case State::MinusInf: return -HUGE_VAL;
      default: return value_;
    }
  }

  friend ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.is_finite() && b.is_finite()) return ExtendedReal(a.value_ + b.value_);
    if ((a.is_plus_infinity() && b.is_minus_infinity()) ||
        (a.is_minus_infinity() && b.is_plus_infinity()))
      throw std::logic_error("ExtendedReal: +inf + -inf");
    if (a.is_plus_infinity() || b.is_plus_infinity()) return plus_infinity();
    return minus_infinity();
  }
  friend ExtendedReal operator-(const ExtendedReal& a) {
    if (a.is_plus_infinity()) return minus_infinity();
    if (a.is_minus_infinity()) return plus_infinity();
    return ExtendedReal(-a.value_);
  }
  friend ExtendedReal operator-(const ExtendedReal& a, const ExtendedReal& b) { return a + (-b); }

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.state_ != b.state_) return false;
    return !a.is_finite() || a.value_ == b.value_;
  }
  friend std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) {
    auto rank = [](State s) { return s == State::MinusInf ? 0 : (s == State::Finite ? 1 : 2); };
    if (a.state_ != b.state_) return rank(a.state_) <=> rank(b.state_);
    if (!a.is_finite()) return std::partial_ordering::equivalent;
    return a.value_ <=> b.value_;
  }

 private:
  enum class State { Finite, PlusInf, MinusInf };
  explicit ExtendedReal(State s) : state_(s), value_(0.0) {}
  State state_;
  double value_;
};

}  // namespace selfdual
