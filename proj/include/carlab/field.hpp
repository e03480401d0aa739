#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "carlab/vec.hpp"

namespace carlab {

// Axis-aligned box in velocity space. Unused axes (beyond dim) are ignored.
struct Box {
  int dim = 2;
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};

  bool empty() const noexcept {
    for (int i = 0; i < dim; ++i)
      if (!(lo[i] < hi[i])) return true;
    return false;
  }
  bool contains(const Velocity& v) const noexcept {
    for (int i = 0; i < dim; ++i)
      if (v[i] < lo[i] || v[i] > hi[i]) return false;
    return true;
  }
  Box intersect(const Box& o) const noexcept;
  static Box cube(int dim, double half_width) noexcept;
};

// Uniform lattice with n nodes per axis at x_i = (i - n/2) h, h = 2 v_max / n.
// The origin is a node; values beyond the nodes are taken as zero.
class VelocityGrid {
 public:
  VelocityGrid() = default;
  VelocityGrid(int d, double v_max, int n);

  int dim() const noexcept { return d_; }
  int n() const noexcept { return n_; }
  double v_max() const noexcept { return v_max_; }
  double h() const noexcept { return h_; }
  std::size_t size() const noexcept { return size_; }
  double cell_volume() const noexcept { return cell_; }

  double coord(int i) const noexcept { return (i - n_ / 2) * h_; }
  std::array<int, 3> index(std::size_t flat) const noexcept;
  std::size_t flat(const std::array<int, 3>& idx) const noexcept;
  Velocity node(std::size_t flat) const;
  // The truncation box [-v_max, v_max]^d.
  Box box() const noexcept { return Box::cube(d_, v_max_); }
  // Row-major strides, last axis fastest.
  std::array<std::ptrdiff_t, 3> strides() const noexcept;

  bool operator==(const VelocityGrid& o) const noexcept {
    return d_ == o.d_ && n_ == o.n_ && v_max_ == o.v_max_;
  }
  bool operator!=(const VelocityGrid& o) const noexcept { return !(*this == o); }

 private:
  int d_ = 2;
  int n_ = 0;
  double v_max_ = 0.0;
  double h_ = 0.0;
  double cell_ = 0.0;
  std::size_t size_ = 0;
};

void require_same_grid(const VelocityGrid& a, const VelocityGrid& b);

// Signed values on a grid: operator outputs, test functions, differences.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(VelocityGrid grid, double fill = 0.0);
  GridFunction(VelocityGrid grid, std::vector<double> values);

  const VelocityGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  // Multilinear interpolation, zero outside the nodes.
  double sample_linear(const Velocity& v) const;
  // Catmull-Rom cubic convolution, zero outside the nodes. Not sign-preserving.
  double sample_cubic(const Velocity& v) const;

  double integral() const noexcept;
  double sup_abs() const noexcept;
  // Bounding box of the nonzero nodes padded by pad_cells, clipped to the
  // truncation box. Empty when every value is zero.
  Box support_box(double pad_cells) const;

 private:
  VelocityGrid grid_;
  std::vector<double> values_;
};

// Nonnegative, finite density on a grid. Immutable once built.
class DistributionField {
 public:
  DistributionField() = default;
  DistributionField(VelocityGrid grid, std::vector<double> values);
  explicit DistributionField(GridFunction values);
  static DistributionField zero(const VelocityGrid& grid);

  const VelocityGrid& grid() const noexcept { return data_.grid(); }
  const GridFunction& function() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_.values(); }
  std::size_t size() const noexcept { return data_.size(); }
  double operator[](std::size_t i) const noexcept { return data_[i]; }
  double sample_linear(const Velocity& v) const { return data_.sample_linear(v); }
  double sample_cubic(const Velocity& v) const { return data_.sample_cubic(v); }
  // Region where the bilinear interpolant may be nonzero.
  const Box& support() const noexcept { return support_; }
  bool is_zero() const noexcept { return support_.empty(); }
  double mass() const noexcept { return data_.integral(); }
  double sup() const noexcept { return data_.sup_abs(); }
  DistributionField scaled(double a) const;

 private:
  GridFunction data_;
  Box support_;
};

// Analytic density used for initial data and for grid-free checks.
class Density {
 public:
  virtual ~Density() = default;
  virtual int dim() const noexcept = 0;
  virtual double operator()(const Velocity& v) const = 0;
  // Box outside which the density vanishes (or is below 1e-17 of its peak).
  virtual Box support() const = 0;
  // Discontinuous profiles are rasterized by cell averaging.
  virtual bool discontinuous() const noexcept { return false; }
};

class Maxwellian final : public Density {
 public:
  Maxwellian(int d, double mass = 1.0, double temperature = 1.0);
  int dim() const noexcept override { return d_; }
  double operator()(const Velocity& v) const override;
  Box support() const override;

 private:
  int d_;
  double mass_, temperature_, norm_;
};

class Indicator final : public Density {
 public:
  Indicator(int d, double radius = 1.0, double height = 1.0);
  int dim() const noexcept override { return d_; }
  double operator()(const Velocity& v) const override;
  Box support() const override { return Box::cube(d_, radius_); }
  bool discontinuous() const noexcept override { return true; }

 private:
  int d_;
  double radius_, height_;
};

// Sum of compactly supported bumps height * (1 - |v-c|^2/r^2)^3_+.
class TwoBumps final : public Density {
 public:
  TwoBumps(std::vector<Velocity> centers, double radius = 1.0, double height = 1.0);
  static TwoBumps standard(int d);
  int dim() const noexcept override { return centers_.front().dim(); }
  double operator()(const Velocity& v) const override;
  Box support() const override;

 private:
  std::vector<Velocity> centers_;
  double radius_, height_;
};

// Samples rho at the nodes, or averages it over each cell on a
// subsamples^d sub-lattice when rho is discontinuous.
DistributionField rasterize(const Density& rho, const VelocityGrid& grid, int subsamples = 8);

}  // namespace carlab
