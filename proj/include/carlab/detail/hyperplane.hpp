#pragma once

// Shared building blocks for hyperplane quadrature in the Carleman kernel.
// Used both by the pointwise kernel and by the cached collision operator, so
// that both see bit-identical node sets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "carlab/field.hpp"
#include "carlab/vec.hpp"

namespace carlab::detail {

class LinearSampler;

// Flip w so its first nonzero component is positive; w and -w share a
// hyperplane, and this makes them share the quadrature nodes too.
inline Velocity canonical_direction(Velocity w) {
  for (int k = 0; k < w.dim(); ++k) {
    if (w[k] > 0.0) break;
    if (w[k] < 0.0) {
      w *= -1.0;
      break;
    }
  }
  return w;
}

// Orthonormal basis e1 (, e2) of the complement of the unit vector n.
inline void complement_basis(const Velocity& n, Velocity& e1, Velocity& e2) {
  const int d = n.dim();
  e1 = Velocity(d);
  e2 = Velocity(d);
  if (d == 2) {
    e1[0] = -n[1];
    e1[1] = n[0];
    return;
  }
  // Start from the axis least aligned with n.
  int k = 0;
  for (int j = 1; j < 3; ++j)
    if (std::abs(n[j]) < std::abs(n[k])) k = j;
  Velocity a(3);
  a[k] = 1.0;
  e1 = a - a.dot(n) * n;
  e1 *= 1.0 / e1.norm();
  e2 = Velocity{n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2],
                n[0] * e1[1] - n[1] * e1[0]};
}

// Parameter interval of {v + t p} inside the box. False when empty.
inline bool clip_line(const Velocity& v, const Velocity& p, const Box& box, double& t0, double& t1) {
  t0 = -INFINITY;
  t1 = INFINITY;
  for (int k = 0; k < v.dim(); ++k) {
    if (p[k] == 0.0) {
      if (v[k] < box.lo[k] || v[k] > box.hi[k]) return false;
      continue;
    }
    double a = (box.lo[k] - v[k]) / p[k];
    double b = (box.hi[k] - v[k]) / p[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return t0 < t1;
}

// Bounding rectangle, in the (e1, e2) coordinates centred at v, of the
// polygon {x : (x - v).n = 0} inside a 3D box. False when empty.
inline bool plane_rectangle(const Velocity& v, const Velocity& n, const Velocity& e1,
                            const Velocity& e2, const Box& box, double lo[2], double hi[2]) {
  lo[0] = lo[1] = INFINITY;
  hi[0] = hi[1] = -INFINITY;
  bool any = false;
  for (int axis = 0; axis < 3; ++axis) {
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    for (int c = 0; c < 4; ++c) {
      Velocity p(3), q(3);
      p[a1] = q[a1] = (c & 1) ? box.hi[a1] : box.lo[a1];
      p[a2] = q[a2] = (c & 2) ? box.hi[a2] : box.lo[a2];
      p[axis] = box.lo[axis];
      q[axis] = box.hi[axis];
      const double dp = (p - v).dot(n), dq = (q - v).dot(n);
      if (dp * dq > 0.0) continue;
      Velocity x = p;
      if (dp != dq) x = p + (dp / (dp - dq)) * (q - p);
      const Velocity r = x - v;
      const double u1 = r.dot(e1), u2 = r.dot(e2);
      lo[0] = std::min(lo[0], u1);
      hi[0] = std::max(hi[0], u1);
      lo[1] = std::min(lo[1], u2);
      hi[1] = std::max(hi[1], u2);
      any = true;
    }
  }
  return any && lo[0] < hi[0] && lo[1] < hi[1];
}

// Midpoint-rule integral over the hyperplane through v orthogonal to the
// unit vector w_hat, restricted to `box`:
//   sum_j f(v + x_j) * radial(|x_j|) * cell.
// M nodes per hyperplane direction.
template <class Sampler, class Radial>
double hyperplane_sum(const Velocity& v, const Velocity& w_hat, const Box& box, int M,
                      const Sampler& f, const Radial& radial) {
  if (box.empty()) return 0.0;
  const Velocity n = canonical_direction(w_hat);
  Velocity e1, e2;
  complement_basis(n, e1, e2);
  double acc = 0.0;
  if (v.dim() == 2) {
    double t0, t1;
    if (!clip_line(v, e1, box, t0, t1)) return 0.0;
    const double dt = (t1 - t0) / M;
    if constexpr (std::is_same_v<Sampler, LinearSampler>) {
      return f.line_sum(v, e1, t0, dt, M, radial) * dt;
    }
    for (int j = 0; j < M; ++j) {
      const double t = t0 + (j + 0.5) * dt;
      const double fx = f(v + t * e1);
      if (fx != 0.0) acc += fx * radial(std::abs(t));
    }
    return acc * dt;
  }
  double lo[2], hi[2];
  if (!plane_rectangle(v, n, e1, e2, box, lo, hi)) return 0.0;
  const double da = (hi[0] - lo[0]) / M, db = (hi[1] - lo[1]) / M;
  for (int i = 0; i < M; ++i) {
    const double a = lo[0] + (i + 0.5) * da;
    const Velocity va = v + a * e1;
    for (int j = 0; j < M; ++j) {
      const double b = lo[1] + (j + 0.5) * db;
      const double fx = f(va + b * e2);
      if (fx != 0.0) acc += fx * radial(std::sqrt(a * a + b * b));
    }
  }
  return acc * da * db;
}

// Multilinear interpolation on a grid, zero outside the nodes. Holds a copy
// padded by one zero layer so the inner loops need no bounds checks.
class LinearSampler {
 public:
  explicit LinearSampler(const GridFunction& g)
      : d_(g.grid().dim()), n_(g.grid().n()), np_(n_ + 3), inv_h_(1.0 / g.grid().h()) {
    const std::size_t total = d_ == 2 ? std::size_t(np_) * np_ : std::size_t(np_) * np_ * np_;
    pad_.assign(total, 0.0);
    const auto& v = g.values();
    if (d_ == 2) {
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) pad_[(i + 1) * np_ + (j + 1)] = v[i * n_ + j];
    } else {
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          for (int k = 0; k < n_; ++k)
            pad_[((i + 1) * np_ + (j + 1)) * np_ + (k + 1)] = v[(i * n_ + j) * n_ + k];
    }
    shift_ = n_ / 2 + 1;
  }

  int dim() const noexcept { return d_; }

  double operator()(const Velocity& x) const noexcept {
    int i[3] = {0, 0, 0};
    double t[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < d_; ++k) {
      const double u = x[k] * inv_h_ + shift_;
      if (!(u >= 0.0 && u < n_ + 1)) return 0.0;
      i[k] = static_cast<int>(u);
      t[k] = u - i[k];
    }
    if (d_ == 2) {
      const double* p = pad_.data() + i[0] * np_ + i[1];
      return (1.0 - t[0]) * ((1.0 - t[1]) * p[0] + t[1] * p[1]) +
             t[0] * ((1.0 - t[1]) * p[np_] + t[1] * p[np_ + 1]);
    }
    const double* p = pad_.data() + (i[0] * np_ + i[1]) * np_ + i[2];
    const std::ptrdiff_t sy = np_, sx = std::ptrdiff_t(np_) * np_;
    const double c00 = (1.0 - t[2]) * p[0] + t[2] * p[1];
    const double c01 = (1.0 - t[2]) * p[sy] + t[2] * p[sy + 1];
    const double c10 = (1.0 - t[2]) * p[sx] + t[2] * p[sx + 1];
    const double c11 = (1.0 - t[2]) * p[sx + sy] + t[2] * p[sx + sy + 1];
    return (1.0 - t[0]) * ((1.0 - t[1]) * c00 + t[1] * c01) +
           t[0] * ((1.0 - t[1]) * c10 + t[1] * c11);
  }

  // sum_j f(v + (t0 + (j + 1/2) dt) e) radial(|t0 + (j + 1/2) dt|), d = 2.
  template <class Radial>
  double line_sum(const Velocity& v, const Velocity& e, double t0, double dt, int M,
                  const Radial& radial) const noexcept {
    const double ux0 = v[0] * inv_h_ + shift_, uy0 = v[1] * inv_h_ + shift_;
    const double ex = e[0] * inv_h_, ey = e[1] * inv_h_;
    const double hi = n_ + 1;
    const double* base = pad_.data();
    double acc = 0.0;
    for (int j = 0; j < M; ++j) {
      const double t = t0 + (j + 0.5) * dt;
      const double u = ux0 + t * ex, w = uy0 + t * ey;
      // The chord lies inside the grid box, so u, w stay in [0, n + 1]; the
      // clamp only absorbs roundoff at the ends.
      const double uc = std::min(std::max(u, 0.0), hi), wc = std::min(std::max(w, 0.0), hi);
      const int iu = static_cast<int>(uc), iw = static_cast<int>(wc);
      const double a = uc - iu, b = wc - iw;
      const double* p = base + iu * np_ + iw;
      const double fx = (1.0 - a) * ((1.0 - b) * p[0] + b * p[1]) + a * ((1.0 - b) * p[np_] + b * p[np_ + 1]);
      acc += fx * radial(std::abs(t));
    }
    return acc;
  }

 private:
  int d_, n_, np_;
  double inv_h_;
  double shift_ = 0.0;
  std::vector<double> pad_;
};

// Catmull-Rom cubic convolution of the zero-extended grid values. The
// interpolant vanishes two cells beyond the box; the copy is padded by four
// zero layers so any point is handled without bounds checks.
class CubicSampler {
 public:
  explicit CubicSampler(const GridFunction& g)
      : d_(g.grid().dim()), n_(g.grid().n()), np_(n_ + 8), inv_h_(1.0 / g.grid().h()) {
    const std::size_t total = d_ == 2 ? std::size_t(np_) * np_ : std::size_t(np_) * np_ * np_;
    pad_.assign(total, 0.0);
    const auto& v = g.values();
    if (d_ == 2) {
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) pad_[(i + 4) * np_ + (j + 4)] = v[i * n_ + j];
    } else {
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          for (int k = 0; k < n_; ++k)
            pad_[((i + 4) * np_ + (j + 4)) * np_ + (k + 4)] = v[(i * n_ + j) * n_ + k];
    }
    shift_ = n_ / 2 + 4;
  }

  // d = 2 evaluation without building a Velocity.
  double at(double x, double y) const noexcept {
    const double hi = n_ + 5;
    const double u = std::min(std::max(x * inv_h_ + shift_, 1.0), hi);
    const double w = std::min(std::max(y * inv_h_ + shift_, 1.0), hi);
    const int iu = static_cast<int>(u), iw = static_cast<int>(w);
    double a[4], b[4];
    weights(u - iu, a);
    weights(w - iw, b);
    const double* p = pad_.data() + (iu - 1) * np_ + (iw - 1);
    double acc = 0.0;
    for (int k = 0; k < 4; ++k, p += np_) acc += a[k] * (b[0] * p[0] + b[1] * p[1] + b[2] * p[2] + b[3] * p[3]);
    return acc;
  }

  double operator()(const Velocity& x) const noexcept {
    int i[3] = {0, 0, 0};
    double w[3][4] = {};
    // Outside [1, n + 5] every stencil node is padding.
    const double hi = n_ + 5;
    for (int k = 0; k < d_; ++k) {
      const double u = std::min(std::max(x[k] * inv_h_ + shift_, 1.0), hi);
      i[k] = static_cast<int>(u);
      weights(u - i[k], w[k]);
      i[k] -= 1;
    }
    if (d_ == 2) {
      const double* p = pad_.data() + i[0] * np_ + i[1];
      double acc = 0.0;
      for (int a = 0; a < 4; ++a) {
        const double* r = p + a * np_;
        acc += w[0][a] * (w[1][0] * r[0] + w[1][1] * r[1] + w[1][2] * r[2] + w[1][3] * r[3]);
      }
      return acc;
    }
    const double* p = pad_.data() + (i[0] * np_ + i[1]) * np_ + i[2];
    double acc = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double* r = p + (a * np_ + b) * np_;
        acc += w[0][a] * w[1][b] * (w[2][0] * r[0] + w[2][1] * r[1] + w[2][2] * r[2] + w[2][3] * r[3]);
      }
    return acc;
  }

 private:
  static void weights(double t, double w[4]) noexcept {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = -0.5 * t3 + t2 - 0.5 * t;
    w[1] = 1.5 * t3 - 2.5 * t2 + 1.0;
    w[2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
    w[3] = 0.5 * t3 - 0.5 * t2;
  }

  int d_, n_, np_;
  double inv_h_;
  double shift_ = 0.0;
  std::vector<double> pad_;
};

}  // namespace carlab::detail
