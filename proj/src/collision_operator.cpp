#include "carlab/collision_operator.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "carlab/detail/hyperplane.hpp"

namespace carlab {

namespace {

struct Primitive {
  std::array<int, 3> k{};
  Velocity dir;
  double len_pow = 0.0;  // (|k| h)^{-d-2s}
  double len = 0.0;      // |k| h
  int m_min = 1;
  int m_max = 0;
};

struct CorrectionDir {
  Velocity dir;
  double weight = 0.0;
  double near_radius = 0.0;  // extent of the excluded region along dir
  double far_radius = 0.0;   // distance to the edge of the offset lattice along dir
};

int gcd3(const std::array<int, 3>& k, int d) {
  int g = 0;
  for (int a = 0; a < d; ++a) g = std::gcd(g, std::abs(k[a]));
  return g;
}

// Cell average of |w|^gamma over [-h/2, h/2]^d.
double self_cell_average(int d, double gamma, double h) {
  if (gamma == 0.0) return 1.0;
  const int q = d == 2 ? 32 : 16;
  const GaussRule& g = gauss_legendre(q);
  double acc = 0.0;
  if (d == 2) {
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) {
        const double x = 0.5 * g.x[i], y = 0.5 * g.x[j];
        acc += 0.25 * g.w[i] * g.w[j] * std::pow(std::sqrt(x * x + y * y), gamma);
      }
  } else {
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        for (int l = 0; l < q; ++l) {
          const double x = 0.5 * g.x[i], y = 0.5 * g.x[j], z = 0.5 * g.x[l];
          acc += 0.125 * g.w[i] * g.w[j] * g.w[l] * std::pow(std::sqrt(x * x + y * y + z * z), gamma);
        }
  }
  return acc * std::pow(h, gamma);
}

}  // namespace

struct CollisionOperator::Impl {
  VelocityGrid grid;
  KernelParams params;
  OperatorOptions opts;
  CancellationConstant cc;
  std::vector<Primitive> prims;
  std::vector<CorrectionDir> corr;
  std::vector<CorrectionDir> polar;  // half-sphere directions of the polar scheme
  std::vector<double> m_pow;  // m^{-d-2s}
  double self_avg = 1.0;

  Impl(const VelocityGrid& g, const KernelParams& p, OperatorOptions o)
      : grid(g), params(p), opts(o) {
    params.validate();
    opts.pv.validate();
    if (grid.dim() != params.d) throw ConfigError("grid and kernel dimensions differ");
    if (opts.correction_directions < 1 || opts.correction_radial_nodes < 1)
      throw ConfigError("correction quadrature needs at least one node");
    if (opts.polar_directions < 2 || opts.radial_nodes < 1)
      throw ConfigError("polar quadrature needs at least two directions and one radial node");
    cc = cancellation_constant(params);
    if (opts.scheme == PVScheme::kLattice) {
      build_lattice();
      build_corrections();
    } else {
      const int nodes = grid.dim() == 2 ? opts.polar_directions : std::max(2, opts.polar_directions / 8);
      const SphereRule rule = sphere_rule(grid.dim(), nodes, true);
      for (std::size_t j = 0; j < rule.dirs.size(); ++j) {
        CorrectionDir c;
        c.dir = rule.dirs[j];
        c.weight = rule.w[j];
        polar.push_back(c);
      }
    }
    self_avg = self_cell_average(grid.dim(), params.gamma, grid.h());
  }

  double expo() const { return -params.d - 2.0 * params.s; }

  void build_lattice() {
    const int d = grid.dim(), n = grid.n();
    const double h = grid.h();
    const double excl = opts.pv.inner_exclusion_radius;
    m_pow.assign(n, 0.0);
    for (int m = 1; m < n; ++m) m_pow[m] = std::pow(double(m), expo());
    const int span = 2 * n - 1;
    long total = 1;
    for (int a = 0; a < d; ++a) total *= span;
    for (long c = 0; c < total; ++c) {
      std::array<int, 3> k{};
      long rest = c;
      for (int a = d - 1; a >= 0; --a) {
        k[a] = static_cast<int>(rest % span) - (n - 1);
        rest /= span;
      }
      int lead = 0;
      for (int a = 0; a < d; ++a)
        if (k[a] != 0) {
          lead = k[a];
          break;
        }
      if (lead <= 0 || gcd3(k, d) != 1) continue;
      Primitive p;
      p.k = k;
      int kmax = 0;
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) {
        kmax = std::max(kmax, std::abs(k[a]));
        r2 += double(k[a]) * k[a];
      }
      const double r = std::sqrt(r2);
      p.m_max = (n - 1) / kmax;
      p.m_min = 1;
      while (p.m_min <= p.m_max && p.m_min * r < excl) ++p.m_min;
      if (p.m_min > p.m_max) continue;
      p.dir = Velocity(d);
      for (int a = 0; a < d; ++a) p.dir[a] = k[a] / r;
      p.len = r * h;
      p.len_pow = std::pow(p.len, expo());
      prims.push_back(p);
    }
  }

  void build_corrections() {
    const int d = grid.dim(), n = grid.n();
    const double h = grid.h();
    const int nodes = d == 2 ? opts.correction_directions
                             : std::max(2, opts.correction_directions / 4);
    const SphereRule rule = sphere_rule(d, nodes, true);
    const double excl = opts.pv.inner_exclusion_radius;
    // Excluded region: the central cell when only w = 0 is skipped, else a
    // ball with the volume of all skipped cells.
    double ball_radius = 0.0;
    if (excl > 1.0) {
      long count = 0;
      const int lim = static_cast<int>(std::ceil(excl));
      for (int i = -lim; i <= lim; ++i)
        for (int j = -lim; j <= lim; ++j)
          for (int l = (d == 3 ? -lim : 0); l <= (d == 3 ? lim : 0); ++l)
            if (double(i) * i + double(j) * j + double(l) * l < excl * excl) ++count;
      const double unit_ball = d == 2 ? M_PI : 4.0 * M_PI / 3.0;
      ball_radius = std::pow(count * grid.cell_volume() / unit_ball, 1.0 / d);
    }
    for (std::size_t j = 0; j < rule.dirs.size(); ++j) {
      CorrectionDir c;
      c.dir = rule.dirs[j];
      c.weight = rule.w[j];
      double mx = 0.0;
      for (int a = 0; a < d; ++a) mx = std::max(mx, std::abs(c.dir[a]));
      c.near_radius = excl > 1.0 ? ball_radius : 0.5 * h / mx;
      c.far_radius = (n - 0.5) * h / mx;
      corr.push_back(c);
    }
  }

  // H_f(v, dir) with |w| = rw (rw only matters for non-constant b~).
  template <class Sampler>
  double H(const Velocity& v, const Velocity& dir, double rw, const Sampler& s,
           const DistributionField& f) const {
    return detail::hyperplane_sum(v, dir, f.support(), params.hyperplane_nodes, s,
                                  CarlemanRadial(params, rw));
  }

  // Radial integrals of the corrections along one direction.
  //   near: int_0^{rE} rho^{1-2s} H(rho) drho, far: int_{rC}^inf rho^{-1-2s} H(rho) drho.
  template <class Sampler>
  void correction_radials(const Velocity& v, const CorrectionDir& c, const Sampler& smp,
                          const DistributionField& f, bool want_near, bool want_far, double& near,
                          double& far) const {
    const double s = params.s;
    const double cn = std::pow(c.near_radius, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    const double cf = std::pow(c.far_radius, -2.0 * s) / (2.0 * s);
    near = far = 0.0;
    if (params.tilde_b.is_constant()) {
      const double h1 = H(v, c.dir, 1.0, smp, f);
      near = want_near ? cn * h1 : 0.0;
      far = want_far ? cf * h1 : 0.0;
      return;
    }
    const GaussRule& g = gauss_legendre(opts.correction_radial_nodes);
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const double u = 0.5 * (g.x[q] + 1.0);
      if (want_near)
        near += 0.5 * g.w[q] * H(v, c.dir, c.near_radius * std::pow(u, 1.0 / (2.0 - 2.0 * s)), smp, f);
      if (want_far)
        far += 0.5 * g.w[q] * H(v, c.dir, c.far_radius * std::pow(u, -1.0 / (2.0 * s)), smp, f);
    }
    near *= cn;
    far *= cf;
  }

  std::vector<GridFunction> singular(const DistributionField& f,
                                     const std::vector<GridFunction>& gs) const {
    if (opts.scheme == PVScheme::kPolar) return singular_polar(f, gs);
    require_same_grid(f.grid(), grid);
    for (const auto& g : gs) require_same_grid(g.grid(), grid);
    const std::size_t ng = gs.size();
    std::vector<GridFunction> out(ng, GridFunction(grid, 0.0));
    if (ng == 0 || f.is_zero()) return out;

    const int d = grid.dim(), n = grid.n();
    const double h = grid.h();
    const auto st = grid.strides();
    const detail::LinearSampler smp(f.function());
    const bool const_b = params.tilde_b.is_constant();
    const bool near_on = opts.pv.near_field_correction;
    const bool far_on = opts.pv.far_field_tail;
    const long N = static_cast<long>(grid.size());
    const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();

#pragma omp parallel num_threads(threads)
    {
      std::vector<double> acc(ng), S(ng), g0(ng);
      std::vector<double> hess(ng * 9);
#pragma omp for schedule(dynamic, 8)
      for (long node = 0; node < N; ++node) {
        const auto idx = grid.index(static_cast<std::size_t>(node));
        const Velocity v = grid.node(static_cast<std::size_t>(node));
        for (std::size_t q = 0; q < ng; ++q) {
          acc[q] = 0.0;
          g0[q] = gs[q][node];
        }
        auto at = [&](const GridFunction& g, const int* off) {
          std::ptrdiff_t flat = 0;
          for (int a = 0; a < d; ++a) {
            const int j = idx[a] + off[a];
            if (j < 0 || j >= n) return 0.0;
            flat += j * st[a];
          }
          return g[flat];
        };

        for (const Primitive& p : prims) {
          bool any = false;
          if (const_b) {
            for (std::size_t q = 0; q < ng; ++q) {
              double sum = 0.0;
              for (int m = p.m_min; m <= p.m_max; ++m) {
                int pk[3], mk[3];
                for (int a = 0; a < d; ++a) {
                  pk[a] = m * p.k[a];
                  mk[a] = -pk[a];
                }
                const double dd = at(gs[q], pk) + at(gs[q], mk) - 2.0 * g0[q];
                if (dd != 0.0) sum += m_pow[m] * dd;
              }
              S[q] = sum;
              any = any || sum != 0.0;
            }
            if (!any) continue;
            const double Hv = H(v, p.dir, 1.0, smp, f);
            if (Hv == 0.0) continue;
            for (std::size_t q = 0; q < ng; ++q) acc[q] += Hv * p.len_pow * S[q];
          } else {
            for (int m = p.m_min; m <= p.m_max; ++m) {
              int pk[3], mk[3];
              for (int a = 0; a < d; ++a) {
                pk[a] = m * p.k[a];
                mk[a] = -pk[a];
              }
              any = false;
              for (std::size_t q = 0; q < ng; ++q) {
                S[q] = at(gs[q], pk) + at(gs[q], mk) - 2.0 * g0[q];
                any = any || S[q] != 0.0;
              }
              if (!any) continue;
              const double Hv = H(v, p.dir, m * p.len, smp, f);
              if (Hv == 0.0) continue;
              for (std::size_t q = 0; q < ng; ++q) acc[q] += Hv * p.len_pow * m_pow[m] * S[q];
            }
          }
        }
        for (std::size_t q = 0; q < ng; ++q) acc[q] *= grid.cell_volume();

        if (near_on || far_on) {
          // Central-difference Hessian with zero extension.
          bool hess_any = false;
          for (std::size_t q = 0; q < ng; ++q) {
            for (int a = 0; a < d; ++a)
              for (int b = 0; b < d; ++b) {
                double val;
                int o1[3] = {0, 0, 0}, o2[3] = {0, 0, 0}, o3[3] = {0, 0, 0}, o4[3] = {0, 0, 0};
                if (a == b) {
                  o1[a] = 1;
                  o2[a] = -1;
                  val = (at(gs[q], o1) + at(gs[q], o2) - 2.0 * g0[q]) / (h * h);
                } else {
                  o1[a] = 1, o1[b] = 1;
                  o2[a] = 1, o2[b] = -1;
                  o3[a] = -1, o3[b] = 1;
                  o4[a] = -1, o4[b] = -1;
                  val = (at(gs[q], o1) - at(gs[q], o2) - at(gs[q], o3) + at(gs[q], o4)) / (4.0 * h * h);
                }
                hess[q * 9 + a * 3 + b] = near_on ? val : 0.0;
                hess_any = hess_any || (near_on && val != 0.0);
              }
          }
          bool g_any = false;
          for (std::size_t q = 0; q < ng; ++q) g_any = g_any || (far_on && g0[q] != 0.0);
          if (hess_any || g_any) {
            for (const CorrectionDir& c : corr) {
              double near, far;
              correction_radials(v, c, smp, f, hess_any, g_any, near, far);
              if (near == 0.0 && far == 0.0) continue;
              for (std::size_t q = 0; q < ng; ++q) {
                double quad = 0.0;
                for (int a = 0; a < d; ++a)
                  for (int b = 0; b < d; ++b) quad += c.dir[a] * hess[q * 9 + a * 3 + b] * c.dir[b];
                acc[q] += c.weight * (0.5 * quad * near - g0[q] * far);
              }
            }
          }
        }
        for (std::size_t q = 0; q < ng; ++q) out[q][node] = acc[q];
      }
    }
    return out;
  }

  // Polar form around each node v, per half-sphere direction e:
  //   Q_s(v) = sum_e (w_e / 2) int_0^inf rho^{-1-2s} H(v, e; rho) D(rho) drho,
  //   D(rho) = g(v + rho e) + g(v - rho e) - 2 g(v),
  // g sampled by cubic convolution. The first cell uses rho = a u^{1/(2-2s)},
  // which absorbs the rho^{1-2s} behaviour of the integrand; the -2 g(v) part
  // beyond it is integrated in closed form (or in u = (a/rho)^{2s}).
  std::vector<GridFunction> singular_polar(const DistributionField& f,
                                           const std::vector<GridFunction>& gs) const {
    require_same_grid(f.grid(), grid);
    for (const auto& g : gs) require_same_grid(g.grid(), grid);
    const std::size_t ng = gs.size();
    std::vector<GridFunction> out(ng, GridFunction(grid, 0.0));
    if (ng == 0 || f.is_zero()) return out;

    const int d = grid.dim();
    const double h = grid.h(), s = params.s;
    const detail::LinearSampler smp(f.function());
    std::vector<detail::CubicSampler> gsm;
    // Catmull-Rom undershoots next to a compact support; the positivity option
    // clamps it for nonnegative g.
    std::vector<char> nonneg;
    Box gbox;
    gbox.dim = d;
    bool have_box = false;
    for (const auto& g : gs) {
      nonneg.push_back(opts.positivity_preserving && std::all_of(g.values().begin(), g.values().end(), [](double x) { return x >= 0.0; }));
      gsm.emplace_back(g);
      // Support of the interpolant: two cells beyond the nonzero nodes, which
      // may reach past the grid box.
      Box b = g.support_box(0.0);
      if (b.empty() && g.sup_abs() == 0.0) continue;
      for (int k = 0; k < d; ++k) {
        b.lo[k] -= 2.0 * h;
        b.hi[k] += 2.0 * h;
      }
      if (!have_box) {
        gbox = b;
        have_box = true;
      } else {
        for (int k = 0; k < d; ++k) {
          gbox.lo[k] = std::min(gbox.lo[k], b.lo[k]);
          gbox.hi[k] = std::max(gbox.hi[k], b.hi[k]);
        }
      }
    }
    if (!have_box) return out;

    const bool const_b = params.tilde_b.is_constant();
    const GaussRule& gl = gauss_legendre(opts.radial_nodes);
    const GaussRule& gl0 = gauss_legendre(2 * opts.radial_nodes);
    const GaussRule& gtail = gauss_legendre(opts.correction_radial_nodes);
    const double a = h;  // first panel [0, a]
    const double p0 = 1.0 / (2.0 - 2.0 * s);
    const double c0 = std::pow(a, -2.0 * s) * p0;            // int_0^a rho^{-1-2s} drho in u
    const double ctail = std::pow(a, -2.0 * s) / (2.0 * s);  // int_a^inf rho^{-1-2s} drho
    // Radial nodes and weights (rho^{-1-2s} included) shared by all rays.
    std::vector<double> rho0, w0, rhoP, wP;
    for (std::size_t k = 0; k < gl0.x.size(); ++k) {
      const double u = 0.5 * (gl0.x[k] + 1.0);
      rho0.push_back(a * std::pow(u, p0));
      w0.push_back(0.5 * gl0.w[k] * c0 * std::pow(u, -2.0 * p0));
    }
    double diag = 0.0;
    for (int k = 0; k < d; ++k) diag += (gbox.hi[k] - gbox.lo[k]) * (gbox.hi[k] - gbox.lo[k]);
    const int panels = static_cast<int>(std::ceil(std::sqrt(diag) / h)) + 1;
    const int rn = opts.radial_nodes;
    for (int m = 0; m < panels; ++m)
      for (int k = 0; k < rn; ++k) {
        const double rho = a + m * h + 0.5 * h * (gl.x[k] + 1.0);
        rhoP.push_back(rho);
        wP.push_back(0.5 * h * gl.w[k] * std::pow(rho, -1.0 - 2.0 * s));
      }
    const long N = static_cast<long>(grid.size());
    const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();

#pragma omp parallel num_threads(threads)
    {
      std::vector<double> acc(ng), g0(ng), I(ng);
#pragma omp for schedule(dynamic, 8)
      for (long node = 0; node < N; ++node) {
        const Velocity v = grid.node(static_cast<std::size_t>(node));
        bool any0 = false;
        for (std::size_t q = 0; q < ng; ++q) {
          acc[q] = 0.0;
          g0[q] = gs[q][node];
          any0 = any0 || g0[q] != 0.0;
        }
        for (const CorrectionDir& c : polar) {
          double t0, t1;
          const bool hit = detail::clip_line(v, c.dir, gbox, t0, t1);
          if (!hit && !any0) continue;
          auto Hr = [&](double rho) { return H(v, c.dir, rho, smp, f); };
          const double Hc = const_b ? Hr(1.0) : 0.0;
          if (const_b && Hc == 0.0) continue;
          // g(v + rho e) + g(v - rho e); + ray inside for rho in [t0, t1], - ray for rho in [-t1, -t0].
          auto G = [&](double rho, std::size_t q) {
            double vp = 0.0, vm = 0.0;
            const bool plus = rho >= t0 && rho <= t1, minus = -rho >= t0 && -rho <= t1;
            if (d == 2) {
              if (plus) vp = gsm[q].at(v[0] + rho * c.dir[0], v[1] + rho * c.dir[1]);
              if (minus) vm = gsm[q].at(v[0] - rho * c.dir[0], v[1] - rho * c.dir[1]);
            } else {
              if (plus) vp = gsm[q](v + rho * c.dir);
              if (minus) vm = gsm[q](v - rho * c.dir);
            }
            if (nonneg[q]) return std::max(vp, 0.0) + std::max(vm, 0.0);
            return vp + vm;
          };
          for (std::size_t q = 0; q < ng; ++q) I[q] = 0.0;
          if (hit) {
            // [0, a]; when g(v) != 0, v is inside the box and this branch runs.
            if (t0 < a && t1 > -a) {
              for (std::size_t k = 0; k < rho0.size(); ++k) {
                const double wt = w0[k] * (const_b ? 1.0 : Hr(rho0[k]));
                for (std::size_t q = 0; q < ng; ++q) I[q] += wt * (G(rho0[k], q) - 2.0 * g0[q]);
              }
            }
            // Cell-wide panels beyond a, restricted to where either ray is inside.
            const double R = std::max(std::abs(t0), std::abs(t1));
            const double rmin = t0 > 0.0 ? t0 : (t1 < 0.0 ? -t1 : 0.0);
            const int m0 = std::max(0, static_cast<int>(std::floor((rmin - a) / h)));
            const int m1 = std::min(panels, static_cast<int>(std::ceil((R - a) / h)));
            for (int m = m0; m < m1; ++m)
              for (int k = m * rn; k < (m + 1) * rn; ++k) {
                const double wt = wP[k] * (const_b ? 1.0 : Hr(rhoP[k]));
                for (std::size_t q = 0; q < ng; ++q) I[q] += wt * G(rhoP[k], q);
              }
          }
          // -2 g(v) int_a^inf rho^{-1-2s} H drho.
          if (any0) {
            double tail = ctail;
            if (!const_b) {
              tail = 0.0;
              for (std::size_t k = 0; k < gtail.x.size(); ++k) {
                const double u = 0.5 * (gtail.x[k] + 1.0);
                tail += 0.5 * gtail.w[k] * Hr(a * std::pow(u, -1.0 / (2.0 * s)));
              }
              tail *= ctail;
            }
            for (std::size_t q = 0; q < ng; ++q) I[q] -= 2.0 * g0[q] * tail;
          }
          const double scale = 0.5 * c.weight * (const_b ? Hc : 1.0);
          for (std::size_t q = 0; q < ng; ++q) acc[q] += scale * I[q];
        }
        for (std::size_t q = 0; q < ng; ++q) out[q][node] = acc[q];
      }
    }
    return out;
  }
};

CollisionOperator::CollisionOperator(const VelocityGrid& grid, const KernelParams& params,
                                     OperatorOptions opts)
    : impl_(std::make_unique<Impl>(grid, params, opts)) {}
CollisionOperator::~CollisionOperator() = default;
CollisionOperator::CollisionOperator(CollisionOperator&&) noexcept = default;
CollisionOperator& CollisionOperator::operator=(CollisionOperator&&) noexcept = default;

const VelocityGrid& CollisionOperator::grid() const noexcept { return impl_->grid; }
const KernelParams& CollisionOperator::params() const noexcept { return impl_->params; }
const OperatorOptions& CollisionOperator::options() const noexcept { return impl_->opts; }
const CancellationConstant& CollisionOperator::cancellation() const noexcept { return impl_->cc; }

GridFunction CollisionOperator::q_singular(const DistributionField& f, const GridFunction& g) const {
  return impl_->singular(f, {g}).front();
}

std::vector<GridFunction> CollisionOperator::q_singular(const DistributionField& f,
                                                        const std::vector<GridFunction>& gs) const {
  return impl_->singular(f, gs);
}

GridFunction CollisionOperator::convolution_with_S(const DistributionField& f) const {
  const VelocityGrid& grid = impl_->grid;
  require_same_grid(f.grid(), grid);
  const double cs = impl_->cc.value;
  const double gamma = impl_->params.gamma;
  GridFunction out(grid, 0.0);
  if (gamma == 0.0) {
    const double c = cs * f.mass();
    for (double& x : out.values()) x = c;
    return out;
  }
  // Nonzero nodes only; the self cell uses the cell average of |w|^gamma.
  std::vector<std::size_t> nz;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] != 0.0) nz.push_back(i);
  const long N = static_cast<long>(grid.size());
  const double self = impl_->self_avg;
  const int threads = impl_->opts.threads > 0 ? impl_->opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long i = 0; i < N; ++i) {
    const Velocity v = grid.node(static_cast<std::size_t>(i));
    double acc = 0.0;
    for (std::size_t j : nz) {
      if (j == static_cast<std::size_t>(i)) {
        acc += f[j] * self;
        continue;
      }
      const double r = distance(v, grid.node(j));
      acc += f[j] * (gamma == 1.0 ? r : std::pow(r, gamma));
    }
    out[i] = cs * acc * grid.cell_volume();
  }
  return out;
}

GridFunction CollisionOperator::q_nonsingular(const DistributionField& f, const GridFunction& g) const {
  require_same_grid(g.grid(), impl_->grid);
  GridFunction conv = convolution_with_S(f);
  for (std::size_t i = 0; i < conv.size(); ++i) conv[i] *= g[i];
  return conv;
}

GridFunction CollisionOperator::q_full(const DistributionField& f) const {
  GridFunction qs = q_singular(f, f.function());
  const GridFunction qns = q_nonsingular(f, f.function());
  for (std::size_t i = 0; i < qs.size(); ++i) qs[i] += qns[i];
  return qs;
}

GridFunction q_singular(const DistributionField& f, const GridFunction& g, const KernelParams& params) {
  return CollisionOperator(f.grid(), params).q_singular(f, g);
}

GridFunction q_nonsingular(const DistributionField& f, const GridFunction& g,
                           const KernelParams& params) {
  return CollisionOperator(f.grid(), params).q_nonsingular(f, g);
}

GridFunction q_full(const DistributionField& f, const KernelParams& params) {
  return CollisionOperator(f.grid(), params).q_full(f);
}

}  // namespace carlab
