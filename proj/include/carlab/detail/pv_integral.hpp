#pragma once

#include <cmath>

namespace carlab {

template <class KernelFn>
double pv_integral(const GridFunction& g, std::size_t node, const KernelFn& K,
                   const PVQuadratureSpec& spec) {
  spec.validate();
  const VelocityGrid& grid = g.grid();
  const int d = grid.dim(), n = grid.n();
  const double h = grid.h();
  const auto idx = grid.index(node);
  const double g0 = g[node];
  const double excl2 = spec.inner_exclusion_radius * spec.inner_exclusion_radius;
  auto value = [&](const int* k) {
    std::array<int, 3> j{};
    for (int a = 0; a < d; ++a) {
      j[a] = idx[a] + k[a];
      if (j[a] < 0 || j[a] >= n) return 0.0;
    }
    return g[grid.flat(j)];
  };

  double acc = 0.0;
  int k[3] = {0, 0, 0};
  int mk[3] = {0, 0, 0};
  const int span = 2 * n - 1;
  long total = 1;
  for (int a = 0; a < d; ++a) total *= span;
  for (long c = 0; c < total; ++c) {
    long rest = c;
    for (int a = d - 1; a >= 0; --a) {
      k[a] = static_cast<int>(rest % span) - (n - 1);
      rest /= span;
    }
    // Half space: first nonzero component positive.
    int lead = 0;
    for (int a = 0; a < d; ++a)
      if (k[a] != 0) {
        lead = k[a];
        break;
      }
    if (lead <= 0) continue;
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += double(k[a]) * k[a];
    if (r2 < excl2) continue;
    Velocity w(d);
    for (int a = 0; a < d; ++a) {
      w[a] = k[a] * h;
      mk[a] = -k[a];
    }
    const double second = value(k) + value(mk) - 2.0 * g0;
    if (second != 0.0) acc += K(w) * second;
  }
  return acc * grid.cell_volume();
}

}  // namespace carlab
