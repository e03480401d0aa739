#include "carlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace carlab {

Box Box::intersect(const Box& o) const noexcept {
  Box out = *this;
  for (int i = 0; i < dim; ++i) {
    out.lo[i] = std::max(lo[i], o.lo[i]);
    out.hi[i] = std::min(hi[i], o.hi[i]);
  }
  return out;
}

Box Box::cube(int dim, double half_width) noexcept {
  Box b;
  b.dim = dim;
  for (int i = 0; i < dim; ++i) {
    b.lo[i] = -half_width;
    b.hi[i] = half_width;
  }
  return b;
}

VelocityGrid::VelocityGrid(int d, double v_max, int n) : d_(d), n_(n), v_max_(v_max) {
  if (d != 2 && d != 3) throw ConfigError("grid dimension must be 2 or 3");
  if (n < 4 || n % 2 != 0) throw ConfigError("grid points per axis must be even and >= 4");
  if (!(v_max > 0.0) || !std::isfinite(v_max)) throw ConfigError("v_max must be positive");
  h_ = 2.0 * v_max / n;
  cell_ = std::pow(h_, d);
  size_ = 1;
  for (int i = 0; i < d; ++i) size_ *= static_cast<std::size_t>(n);
}

std::array<int, 3> VelocityGrid::index(std::size_t flat) const noexcept {
  std::array<int, 3> idx{};
  for (int k = d_ - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  return idx;
}

std::size_t VelocityGrid::flat(const std::array<int, 3>& idx) const noexcept {
  std::size_t f = 0;
  for (int k = 0; k < d_; ++k) f = f * n_ + idx[k];
  return f;
}

Velocity VelocityGrid::node(std::size_t flat_index) const {
  const auto idx = index(flat_index);
  Velocity v(d_);
  for (int k = 0; k < d_; ++k) v[k] = coord(idx[k]);
  return v;
}

std::array<std::ptrdiff_t, 3> VelocityGrid::strides() const noexcept {
  std::array<std::ptrdiff_t, 3> st{0, 0, 0};
  std::ptrdiff_t acc = 1;
  for (int k = d_ - 1; k >= 0; --k) {
    st[k] = acc;
    acc *= n_;
  }
  return st;
}

void require_same_grid(const VelocityGrid& a, const VelocityGrid& b) {
  if (a != b) throw InputError("fields live on different grids");
}

GridFunction::GridFunction(VelocityGrid grid, double fill)
    : grid_(grid), values_(grid.size(), fill) {}

GridFunction::GridFunction(VelocityGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InputError("value count " + std::to_string(values_.size()) + " does not match grid size " +
                     std::to_string(grid_.size()));
}

namespace {

// Catmull-Rom weights for fractional offset t in [0,1), nodes -1..2.
inline void cubic_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = -0.5 * t3 + t2 - 0.5 * t;
  w[1] = 1.5 * t3 - 2.5 * t2 + 1.0;
  w[2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
  w[3] = 0.5 * t3 - 0.5 * t2;
}

}  // namespace

double GridFunction::sample_linear(const Velocity& v) const {
  const int d = grid_.dim(), n = grid_.n();
  const double inv_h = 1.0 / grid_.h();
  int i0[3];
  double t[3];
  for (int k = 0; k < d; ++k) {
    const double u = v[k] * inv_h + n / 2;
    const double fl = std::floor(u);
    if (fl < -1.0 || fl > n - 1) return 0.0;
    i0[k] = static_cast<int>(fl);
    t[k] = u - fl;
  }
  const auto st = grid_.strides();
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    std::ptrdiff_t off = 0;
    bool inside = true;
    for (int k = 0; k < d; ++k) {
      const int bit = (corner >> k) & 1;
      const int i = i0[k] + bit;
      if (i < 0 || i >= n) {
        inside = false;
        break;
      }
      w *= bit ? t[k] : 1.0 - t[k];
      off += i * st[k];
    }
    if (inside && w != 0.0) acc += w * values_[off];
  }
  return acc;
}

double GridFunction::sample_cubic(const Velocity& v) const {
  const int d = grid_.dim(), n = grid_.n();
  const double inv_h = 1.0 / grid_.h();
  int i0[3];
  double w[3][4];
  for (int k = 0; k < d; ++k) {
    const double u = v[k] * inv_h + n / 2;
    const double fl = std::floor(u);
    if (fl < -2.0 || fl > n) return 0.0;
    i0[k] = static_cast<int>(fl) - 1;
    cubic_weights(u - fl, w[k]);
  }
  const auto st = grid_.strides();
  double acc = 0.0;
  const int corners = d == 2 ? 16 : 64;
  for (int c = 0; c < corners; ++c) {
    double wt = 1.0;
    std::ptrdiff_t off = 0;
    bool inside = true;
    int rest = c;
    for (int k = 0; k < d; ++k) {
      const int j = rest & 3;
      rest >>= 2;
      const int i = i0[k] + j;
      if (i < 0 || i >= n) {
        inside = false;
        break;
      }
      wt *= w[k][j];
      off += i * st[k];
    }
    if (inside) acc += wt * values_[off];
  }
  return acc;
}

double GridFunction::integral() const noexcept {
  double acc = 0.0;
  for (double x : values_) acc += x;
  return acc * grid_.cell_volume();
}

double GridFunction::sup_abs() const noexcept {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

Box GridFunction::support_box(double pad_cells) const {
  const int d = grid_.dim();
  std::array<int, 3> lo{grid_.n(), grid_.n(), grid_.n()}, hi{-1, -1, -1};
  for (std::size_t f = 0; f < values_.size(); ++f) {
    if (values_[f] == 0.0) continue;
    const auto idx = grid_.index(f);
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], idx[k]);
      hi[k] = std::max(hi[k], idx[k]);
    }
  }
  Box b;
  b.dim = d;
  if (hi[0] < 0) {
    for (int k = 0; k < d; ++k) b.lo[k] = b.hi[k] = 0.0;
    return b;
  }
  const double pad = pad_cells * grid_.h();
  for (int k = 0; k < d; ++k) {
    b.lo[k] = grid_.coord(lo[k]) - pad;
    b.hi[k] = grid_.coord(hi[k]) + pad;
  }
  return b.intersect(grid_.box());
}

DistributionField::DistributionField(VelocityGrid grid, std::vector<double> values)
    : DistributionField(GridFunction(grid, std::move(values))) {}

DistributionField::DistributionField(GridFunction values) : data_(std::move(values)) {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double x = data_[i];
    if (!std::isfinite(x)) throw InputError("distribution values must be finite");
    if (x < 0.0) throw InputError("distribution values must be nonnegative");
  }
  support_ = data_.support_box(1.0);
}

DistributionField DistributionField::zero(const VelocityGrid& grid) {
  return DistributionField(GridFunction(grid, 0.0));
}

DistributionField DistributionField::scaled(double a) const {
  GridFunction g = data_;
  for (double& x : g.values()) x *= a;
  return DistributionField(std::move(g));
}

Maxwellian::Maxwellian(int d, double mass, double temperature)
    : d_(d), mass_(mass), temperature_(temperature) {
  if (d != 2 && d != 3) throw ConfigError("Maxwellian dimension must be 2 or 3");
  if (!(mass >= 0.0) || !(temperature > 0.0))
    throw ConfigError("Maxwellian needs mass >= 0 and temperature > 0");
  norm_ = mass_ / std::pow(2.0 * M_PI * temperature_, 0.5 * d_);
}

double Maxwellian::operator()(const Velocity& v) const {
  return norm_ * std::exp(-0.5 * v.norm2() / temperature_);
}

Box Maxwellian::support() const {
  // exp(-r^2 / 2T) < 1e-17 beyond this radius.
  return Box::cube(d_, std::sqrt(2.0 * temperature_ * 17.0 * std::log(10.0)));
}

Indicator::Indicator(int d, double radius, double height) : d_(d), radius_(radius), height_(height) {
  if (d != 2 && d != 3) throw ConfigError("indicator dimension must be 2 or 3");
  if (!(radius > 0.0) || !(height >= 0.0))
    throw ConfigError("indicator needs radius > 0 and height >= 0");
}

double Indicator::operator()(const Velocity& v) const {
  return v.norm2() <= radius_ * radius_ ? height_ : 0.0;
}

TwoBumps::TwoBumps(std::vector<Velocity> centers, double radius, double height)
    : centers_(std::move(centers)), radius_(radius), height_(height) {
  if (centers_.empty()) throw ConfigError("two_bumps needs at least one center");
  for (const auto& c : centers_) {
    require_same_dim(c, centers_.front());
    if (!c.is_finite()) throw ConfigError("bump centers must be finite");
  }
  if (!(radius > 0.0) || !(height >= 0.0))
    throw ConfigError("two_bumps needs radius > 0 and height >= 0");
}

TwoBumps TwoBumps::standard(int d) {
  Velocity a(d), b(d);
  a[0] = 1.5;
  b[0] = -1.5;
  return TwoBumps({a, b}, 1.0, 1.0);
}

double TwoBumps::operator()(const Velocity& v) const {
  double acc = 0.0;
  const double r2 = radius_ * radius_;
  for (const auto& c : centers_) {
    const double q = 1.0 - distance(v, c) * distance(v, c) / r2;
    if (q > 0.0) acc += height_ * q * q * q;
  }
  return acc;
}

Box TwoBumps::support() const {
  const int d = dim();
  Box b;
  b.dim = d;
  for (int k = 0; k < d; ++k) {
    b.lo[k] = centers_.front()[k];
    b.hi[k] = centers_.front()[k];
  }
  for (const auto& c : centers_)
    for (int k = 0; k < d; ++k) {
      b.lo[k] = std::min(b.lo[k], c[k] - radius_);
      b.hi[k] = std::max(b.hi[k], c[k] + radius_);
    }
  return b;
}

DistributionField rasterize(const Density& rho, const VelocityGrid& grid, int subsamples) {
  if (rho.dim() != grid.dim()) throw ConfigError("density and grid dimensions differ");
  if (subsamples < 1) throw ConfigError("subsamples must be >= 1");
  const int d = grid.dim();
  const double h = grid.h();
  const bool average = rho.discontinuous() && subsamples > 1;
  int sub_total = 1;
  if (average)
    for (int k = 0; k < d; ++k) sub_total *= subsamples;
  std::vector<double> values(grid.size());
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const Velocity x = grid.node(f);
    if (!average) {
      values[f] = rho(x);
      continue;
    }
    double acc = 0.0;
    for (int c = 0; c < sub_total; ++c) {
      Velocity y = x;
      int rest = c;
      for (int k = 0; k < d; ++k) {
        const int j = rest % subsamples;
        rest /= subsamples;
        y[k] += h * ((j + 0.5) / subsamples - 0.5);
      }
      acc += rho(y);
    }
    values[f] = acc / sub_total;
  }
  return DistributionField(grid, std::move(values));
}

}  // namespace carlab
