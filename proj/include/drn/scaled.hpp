#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace drn {

// Nonnegative real with an explicit binary exponent, for conductances like
// 2^{|x|} at |x| ~ 1e4 that overflow double. Mantissa is kept in [1, 2)
// (or exactly 0).
class Scaled {
 public:
  Scaled() = default;
  Scaled(double v) { *this = from_double(v); }  // NOLINT: implicit by design

  static Scaled from_double(double v) {
    Scaled s;
    if (v == 0.0) return s;
    int e = 0;
    s.m_ = std::frexp(v, &e) * 2.0;  // frexp mantissa in [0.5,1)
    s.e_ = e - 1;
    return s;
  }

  // value = m * 2^e with m in [1,2)
  static Scaled pow2(long long e) {
    Scaled s;
    s.m_ = 1.0;
    s.e_ = e;
    return s;
  }

  // lambda^k for lambda > 0, exact in the exponent.
  static Scaled pow(double lambda, long long k) {
    double l2 = std::log2(lambda) * static_cast<double>(k);
    double fl = std::floor(l2);
    Scaled s;
    s.m_ = std::exp2(l2 - fl);
    s.e_ = static_cast<long long>(fl);
    s.normalize();
    return s;
  }

  bool is_zero() const { return m_ == 0.0; }
  double log2_value() const {
    return is_zero() ? -std::numeric_limits<double>::infinity()
                     : std::log2(m_) + static_cast<double>(e_);
  }
  // Clamps to the double range.
  double to_double() const {
    if (is_zero()) return 0.0;
    if (e_ > 1020) return std::numeric_limits<double>::infinity();
    if (e_ < -1020) return 0.0;
    return std::ldexp(m_, static_cast<int>(e_));
  }

  friend Scaled operator*(Scaled a, Scaled b) {
    if (a.is_zero() || b.is_zero()) return Scaled{};
    Scaled s;
    s.m_ = a.m_ * b.m_;
    s.e_ = a.e_ + b.e_;
    s.normalize();
    return s;
  }
  friend Scaled operator/(Scaled a, Scaled b) {
    Scaled s;
    if (a.is_zero()) return s;
    s.m_ = a.m_ / b.m_;
    s.e_ = a.e_ - b.e_;
    s.normalize();
    return s;
  }
  friend Scaled operator+(Scaled a, Scaled b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.e_ < b.e_) std::swap(a, b);
    long long d = a.e_ - b.e_;
    if (d > 64) return a;
    Scaled s;
    s.m_ = a.m_ + std::ldexp(b.m_, -static_cast<int>(d));
    s.e_ = a.e_;
    s.normalize();
    return s;
  }
  // Saturating subtraction: results below 0 (from cancellation) clamp to 0.
  friend Scaled operator-(Scaled a, Scaled b) {
    if (b.is_zero()) return a;
    if (!(b < a)) return Scaled{};
    long long d = a.e_ - b.e_;
    if (d > 64) return a;
    Scaled s;
    s.m_ = a.m_ - std::ldexp(b.m_, -static_cast<int>(d));
    s.e_ = a.e_;
    s.normalize();
    return s;
  }
  Scaled& operator+=(Scaled o) { return *this = *this + o; }
  Scaled& operator*=(Scaled o) { return *this = *this * o; }

  friend bool operator<(Scaled a, Scaled b) {
    if (a.is_zero()) return !b.is_zero();
    if (b.is_zero()) return false;
    if (a.e_ != b.e_) return a.e_ < b.e_;
    return a.m_ < b.m_;
  }
  friend bool operator>(Scaled a, Scaled b) { return b < a; }

  static Scaled inverse(Scaled a) { return Scaled::from_double(1.0) / a; }

 private:
  void normalize() {
    if (m_ == 0.0) {
      e_ = 0;
      return;
    }
    int e = 0;
    m_ = std::frexp(m_, &e) * 2.0;
    e_ += e - 1;
  }

  double m_ = 0.0;
  long long e_ = 0;
};

}  // namespace drn
