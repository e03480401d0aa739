#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <string>

#include "carlab/errors.hpp"

namespace carlab {

// A point of velocity space R^d, d in {2, 3}.
class Velocity {
 public:
  static constexpr int kMaxDim = 3;

  Velocity() = default;
  explicit Velocity(int dim) : dim_(dim) { check_dim(dim); }
  Velocity(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
    check_dim(dim_);
    int i = 0;
    for (double x : xs) c_[i++] = x;
  }

  int dim() const noexcept { return dim_; }
  double operator[](int i) const noexcept { return c_[i]; }
  double& operator[](int i) noexcept { return c_[i]; }

  double dot(const Velocity& o) const noexcept {
    double acc = 0.0;
    for (int i = 0; i < dim_; ++i) acc += c_[i] * o.c_[i];
    return acc;
  }
  double norm2() const noexcept { return dot(*this); }
  double norm() const noexcept { return std::sqrt(norm2()); }

  bool is_finite() const noexcept {
    for (int i = 0; i < dim_; ++i)
      if (!std::isfinite(c_[i])) return false;
    return true;
  }

  Velocity& operator+=(const Velocity& o) noexcept {
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Velocity& operator-=(const Velocity& o) noexcept {
    for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Velocity& operator*=(double a) noexcept {
    for (int i = 0; i < dim_; ++i) c_[i] *= a;
    return *this;
  }

  friend Velocity operator+(Velocity a, const Velocity& b) noexcept { return a += b; }
  friend Velocity operator-(Velocity a, const Velocity& b) noexcept { return a -= b; }
  friend Velocity operator*(double s, Velocity a) noexcept { return a *= s; }
  friend Velocity operator*(Velocity a, double s) noexcept { return a *= s; }
  friend Velocity operator-(Velocity a) noexcept { return a *= -1.0; }

  std::string to_string() const;

 private:
  static void check_dim(int d) {
    if (d < 2 || d > kMaxDim) throw InputError("velocity dimension must be 2 or 3");
  }

  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

inline double distance(const Velocity& a, const Velocity& b) noexcept { return (a - b).norm(); }

inline void require_same_dim(const Velocity& a, const Velocity& b) {
  if (a.dim() != b.dim()) throw InputError("velocity dimension mismatch");
}

}  // namespace carlab
