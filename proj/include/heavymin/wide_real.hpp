#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>

namespace heavymin {

// An extended real for quantities that outgrow double range.
//
// Breakpoint recursions here exponentiate the previous value at every
// step, so sequences pass 1e300 within a dozen intervals and keep
// exponentiating from there: the values are power towers.  A WideReal
// stores
//
//     value = exp^height(rep)        (height-fold exponential)
//
// canonicalized so that height is minimal: height 0 covers
// [-inf, 1e300] exactly (plain doubles, full precision, negatives and the
// -inf sentinel included); every higher level keeps rep in
// (log 1e300, 1e300].  Canonical ranges are disjoint and increasing in
// height, so ordering is exact: compare height, then rep.
//
// Precision by level: height 0 arithmetic is IEEE double arithmetic;
// height 1 sums use logaddexp (value-relative error ~ ulp(rep)); height 2
// and above truncate sums to the dominant term, which is exact to the
// last representable digit at every magnitude where those levels are
// reachable.  log and exp move between levels without any rounding.
class WideReal {
 public:
  static constexpr double kLinCap = 1e300;
  static constexpr std::int32_t kInfHeight = 1 << 30;

  constexpr WideReal() = default;

  static WideReal from_double(double x) { return canonical(0, x); }

  // Value e^log_x.
  static WideReal from_log(double log_x) { return canonical(1, log_x); }

  // Value e^(e^loglog_x).
  static WideReal from_loglog(double loglog_x) {
    return canonical(2, loglog_x);
  }

  // Value exp^height(rep).
  static WideReal from_tower(std::int32_t height, double rep) {
    return canonical(height, rep);
  }

  static WideReal zero() { return WideReal(0, 0.0); }
  static WideReal one() { return WideReal(0, 1.0); }
  static WideReal neg_infinity() {
    return WideReal(0, -std::numeric_limits<double>::infinity());
  }
  static WideReal infinity() {
    return WideReal(kInfHeight, std::numeric_limits<double>::infinity());
  }

  std::int32_t height() const { return height_; }
  double rep() const { return rep_; }

  bool is_nan() const { return std::isnan(rep_); }
  bool is_neg_infinity() const {
    return height_ == 0 && std::isinf(rep_) && rep_ < 0;
  }
  bool is_infinity() const { return height_ == kInfHeight; }
  bool is_zero() const { return height_ == 0 && rep_ == 0.0; }
  bool negative() const { return height_ == 0 && rep_ < 0.0; }

  // True when the value fits a finite double exactly as stored.
  bool fits_double() const { return height_ == 0 && std::isfinite(rep_); }

  double as_double() const {
    if (height_ == 0) return rep_;
    return std::numeric_limits<double>::infinity();
  }

  // log(value); +inf once even the log exceeds double range.
  double log_as_double() const {
    switch (height_) {
      case 0:
        return rep_ > 0 ? std::log(rep_)
                        : -std::numeric_limits<double>::infinity();
      case 1:
        return rep_;
      default:
        return std::numeric_limits<double>::infinity();
    }
  }

  // log(log(value)); -inf for values <= 1, NaN below that.
  double loglog_as_double() const {
    switch (height_) {
      case 0:
        if (rep_ > 1) return std::log(std::log(rep_));
        return rep_ == 1 ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::quiet_NaN();
      case 1:
        return std::log(rep_);
      case 2:
        return rep_;
      default:
        return std::numeric_limits<double>::infinity();
    }
  }

  friend bool operator==(const WideReal& a, const WideReal& b) {
    return a.height_ == b.height_ && a.rep_ == b.rep_;
  }
  friend bool operator!=(const WideReal& a, const WideReal& b) {
    return !(a == b);
  }
  friend bool operator<(const WideReal& a, const WideReal& b) {
    if (a.height_ != b.height_) return a.height_ < b.height_;
    return a.rep_ < b.rep_;
  }
  friend bool operator>(const WideReal& a, const WideReal& b) { return b < a; }
  friend bool operator<=(const WideReal& a, const WideReal& b) {
    return !(b < a);
  }
  friend bool operator>=(const WideReal& a, const WideReal& b) {
    return !(a < b);
  }

  friend WideReal operator+(const WideReal& a, const WideReal& b) {
    if (a.height_ == 0 && b.height_ == 0)
      return from_double(a.rep_ + b.rep_);
    const WideReal& hi = (b < a) ? a : b;
    const WideReal& lo = (b < a) ? b : a;
    if (hi.height_ >= 2) return hi;  // dominant term is exact at this level
    // hi at height 1; a negative or zero lo vanishes against it
    double log_lo = lo.log_as_double();
    if (lo.negative() || std::isinf(log_lo)) return hi;
    return from_log(logaddexp(hi.rep_, log_lo));
  }
  WideReal& operator+=(const WideReal& b) { return *this = *this + b; }

  // max(a - b, 0); callers subtract dominated terms (b <= a up to rounding).
  friend WideReal sub_clamped(const WideReal& a, const WideReal& b) {
    if (!(b < a)) return zero();
    if (b.negative() || b.is_zero()) {
      if (a.height_ == 0)
        return from_double(a.rep_ - b.rep_);
      return a + WideReal(0, -b.rep_);
    }
    switch (a.height_) {
      case 0:
        return from_double(std::max(0.0, a.rep_ - b.rep_));
      case 1: {
        double d = b.log_as_double() - a.rep_;  // <= 0
        return from_log(a.rep_ + std::log1p(-std::exp(d)));
      }
      default:
        return a;  // dominant term; correction below representable ulp
    }
  }

  // value * c for c > 0.
  WideReal scaled(double c) const {
    assert(c > 0.0);
    switch (height_) {
      case 0:
        return from_double(rep_ * c);
      case 1:
        return from_log(rep_ + std::log(c));
      default:
        return *this;  // log shifts by log(c): below ulp of the level rep
    }
  }

  // value^p for p > 0 (value must be >= 0).
  WideReal powed(double p) const {
    assert(p > 0.0 && !negative());
    if (height_ == 0) {
      if (rep_ == 0.0) return zero();
      double r = std::pow(rep_, p);
      if (r <= kLinCap) return from_double(r);
      return from_log(p * std::log(rep_));
    }
    return exp_of(log_of(*this).scaled(p));
  }

  // Moving between levels is exact: log drops the height, exp raises it.
  friend WideReal log_of(const WideReal& a) {
    if (a.height_ == 0)
      return from_double(std::log(a.rep_));  // -inf at 0, NaN if negative
    if (a.is_infinity()) return infinity();
    return canonical(a.height_ - 1, a.rep_);
  }

  friend WideReal exp_of(const WideReal& a) {
    if (a.is_infinity()) return infinity();
    if (a.is_neg_infinity()) return zero();
    return canonical(a.height_ + 1, a.rep_);
  }

  static double logaddexp(double a, double b) {
    if (std::isinf(a) && a < 0) return b;
    if (std::isinf(b) && b < 0) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
  }

 private:
  constexpr WideReal(std::int32_t h, double r) : height_(h), rep_(r) {}

  static WideReal canonical(std::int32_t height, double rep) {
    if (std::isnan(rep)) return WideReal(0, rep);
    if (std::isinf(rep) && rep > 0) return infinity();
    while (rep > kLinCap) {
      rep = std::log(rep);
      ++height;
    }
    while (height > 0 && rep <= log_lin_cap()) {
      rep = std::exp(rep);
      --height;
    }
    if (height == kInfHeight || height < 0) {
      // height only reaches the sentinel through infinity()
      return infinity();
    }
    return WideReal(height, rep);
  }

  static double log_lin_cap() {
    static const double v = std::log(kLinCap);
    return v;
  }

  std::int32_t height_ = 0;
  double rep_ = 0.0;
};

}  // namespace heavymin
