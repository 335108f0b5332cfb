#include "kdl/operators.hpp"

#include "kdl/error.hpp"
#include "kdl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace kdl {

StreamingMode parse_streaming_mode(const std::string& name) {
  if (name == "conservative_remap") return StreamingMode::conservative_remap;
  if (name == "linear_interpolation") return StreamingMode::linear_interpolation;
  throw ConfigError("streaming mode: unknown value '" + name + "'");
}

std::string to_string(StreamingMode mode) {
  return mode == StreamingMode::conservative_remap ? "conservative_remap" : "linear_interpolation";
}

BoundaryMode parse_boundary_mode(const std::string& name) {
  if (name == "outflow") return BoundaryMode::outflow;
  if (name == "periodic") return BoundaryMode::periodic;
  throw ConfigError("boundary mode: unknown value '" + name + "'");
}

std::string to_string(BoundaryMode mode) { return mode == BoundaryMode::outflow ? "outflow" : "periodic"; }

namespace {

constexpr double kSnap = 1e-9;

struct Shift {
  long k = 0;
  double theta = 0.0;
};

// displacement in cells -> integer part and fractional remainder in [0, 1)
Shift split_shift(double cells) {
  Shift s;
  const double fl = std::floor(cells);
  s.k = static_cast<long>(fl);
  s.theta = cells - fl;
  if (s.theta < kSnap) {
    s.theta = 0.0;
  } else if (s.theta > 1.0 - kSnap) {
    s.theta = 0.0;
    s.k += 1;
  }
  return s;
}

long wrap(long i, long n) {
  const long r = i % n;
  return r < 0 ? r + n : r;
}

// One 1D remap of every line along `axis` of a column; returns the outflow sum.
template <typename Scalar>
double remap_axis(Scalar* col, int n, int axis, const Shift& sh, bool periodic, std::vector<Scalar>& line) {
  if (sh.k == 0 && sh.theta == 0.0) return 0.0;
  const long nn = static_cast<long>(n) * n;
  const long stride = axis == 0 ? nn : (axis == 1 ? n : 1);
  const Scalar keep = static_cast<Scalar>(1.0 - sh.theta);
  const Scalar move = static_cast<Scalar>(sh.theta);
  double leaked = 0.0;
  line.resize(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      // a, b run over the two axes orthogonal to `axis`
      const long base = axis == 0 ? a * static_cast<long>(n) + b : (axis == 1 ? a * nn + b : (a * static_cast<long>(n) + b) * n);
      for (int i = 0; i < n; ++i) line[i] = col[base + i * stride];
      for (int i = 0; i < n; ++i) {
        Scalar value = 0;
        const long src0 = i - sh.k;
        const long src1 = src0 - 1;
        if (periodic) {
          value = keep * line[wrap(src0, n)];
          if (sh.theta != 0.0) value += move * line[wrap(src1, n)];
        } else {
          if (src0 >= 0 && src0 < n) value = sh.theta == 0.0 ? line[src0] : keep * line[src0];
          if (sh.theta != 0.0 && src1 >= 0 && src1 < n) value += move * line[src1];
        }
        col[base + i * stride] = value;
      }
      if (!periodic) {
        for (int p = 0; p < n; ++p) {
          const long d0 = p + sh.k;
          if (d0 < 0 || d0 >= n) leaked += (sh.theta == 0.0 ? 1.0 : 1.0 - sh.theta) * line[p];
          if (sh.theta != 0.0 && (d0 + 1 < 0 || d0 + 1 >= n)) leaked += sh.theta * line[p];
        }
      }
    }
  return leaked;
}

// Direct trilinear gather of src at x_i - d.
template <typename Scalar>
void gather_trilinear(const Scalar* src, Scalar* dst, int n, const double cells[3], bool periodic) {
  Shift sh[3];
  for (int a = 0; a < 3; ++a) sh[a] = split_shift(cells[a]);
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const int idx[3] = {ix, iy, iz};
        double acc = 0.0;
        for (int corner = 0; corner < 8; ++corner) {
          double w = 1.0;
          long pos[3];
          bool inside = true;
          for (int a = 0; a < 3; ++a) {
            const int hi = (corner >> a) & 1;
            const double wa = hi ? sh[a].theta : 1.0 - sh[a].theta;
            w *= wa;
            long p = idx[a] - sh[a].k - hi;
            if (periodic) p = wrap(p, n);
            else if (p < 0 || p >= n) inside = false;
            pos[a] = p;
          }
          if (w == 0.0 || !inside) continue;
          acc += w * static_cast<double>(src[(pos[0] * n + pos[1]) * n + pos[2]]);
        }
        dst[(ix * n + iy) * n + iz] = static_cast<Scalar>(acc);
      }
}

template <typename Scalar>
DistributionField<Scalar> shift_field(const DistributionField<Scalar>& g, const Eigen::MatrixXd& displacement,
                                      const StreamingScheme& scheme, OutflowLeak* leak) {
  using Matrix = typename DistributionField<Scalar>::Matrix;
  const auto& part = g.partition();
  const auto& vel = g.velocity();
  const int n = part.fine_cells_per_axis();
  const double h = part.spacing();
  const bool periodic = scheme.boundary == BoundaryMode::periodic;
  Matrix out = g.values();
  std::vector<double> column_leak(g.nodes(), 0.0);
  parallel_for(static_cast<std::size_t>(g.nodes()), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    double cells[3];
    for (int a = 0; a < 3; ++a) cells[a] = displacement(j, a) / h;
    if (scheme.mode == StreamingMode::conservative_remap) {
      std::vector<Scalar> line;
      double leaked = 0.0;
      for (int a = 0; a < 3; ++a) leaked += remap_axis<Scalar>(out.col(j).data(), n, a, split_shift(cells[a]), periodic, line);
      column_leak[j] = leaked;
    } else {
      gather_trilinear<Scalar>(g.values().col(j).data(), out.col(j).data(), n, cells, periodic);
      if (!periodic) column_leak[j] = static_cast<double>(g.values().col(j).sum()) - static_cast<double>(out.col(j).sum());
    }
  });
  if (leak) {
    const double vol = g.space().sample_volume();
    for (int j = 0; j < g.nodes(); ++j) {
      const double m = column_leak[j] * vol;
      leak->mass += m;
      leak->momentum += m * vel.node(j);
      leak->energy += m * vel.speed_squared()(j);
    }
  }
  return DistributionField<Scalar>(g.space(), std::move(out));
}

}  // namespace

template <typename Scalar>
DistributionField<Scalar> stream(const DistributionField<Scalar>& g, double t, const StreamingScheme& scheme,
                                 OutflowLeak* leak) {
  if (!std::isfinite(t)) throw PreconditionError("stream: time must be finite");
  if (t == 0.0) return g;
  const Eigen::MatrixXd displacement = t * g.velocity().nodes();
  return shift_field(g, displacement, scheme, leak);
}

template <typename Scalar>
DistributionField<Scalar> translate(const DistributionField<Scalar>& g, const Vec3& y, const StreamingScheme& scheme,
                                    OutflowLeak* leak) {
  if (!y.allFinite()) throw PreconditionError("translate: displacement must be finite");
  if (y.isZero(0.0)) return g;
  Eigen::MatrixXd displacement(g.nodes(), 3);
  displacement.rowwise() = (-y).transpose();
  return shift_field(g, displacement, scheme, leak);
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> block_average(const DistributionField<Scalar>& g) {
  const auto& part = g.partition();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(part.blocks(), g.nodes());
  const auto& values = g.values();
  for (int b = 0; b < part.blocks(); ++b) {
    const auto members = part.members(b);
    const Scalar inv = static_cast<Scalar>(1.0 / static_cast<double>(members.size()));
    // first + mean(x - first): exact when the block is already constant
    const auto first = values.row(members[0]);
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> dev = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Zero(g.nodes());
    for (std::size_t m = 1; m < members.size(); ++m) dev += values.row(members[m]) - first;
    out.row(b) = first + inv * dev;
  }
  return out;
}

namespace {

template <typename Scalar>
typename DistributionField<Scalar>::Matrix expand_blocks(const SpatialPartition& part,
                                                         const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& blocks) {
  typename DistributionField<Scalar>::Matrix out(part.cells(), blocks.cols());
  for (int c = 0; c < part.cells(); ++c) out.row(c) = blocks.row(part.block_of(c));
  return out;
}

}  // namespace

template <typename Scalar>
DistributionField<Scalar> homogenize(const DistributionField<Scalar>& g) {
  if (g.partition().block_factor() == 1) return g;
  return DistributionField<Scalar>(g.space(), expand_blocks<Scalar>(g.partition(), block_average(g)));
}

Eigen::MatrixXd loss_kernel_matrix(const VelocityGrid& grid, const CollisionModel& model) {
  model.kernel.validate();
  const int nv = grid.size();
  const double sphere = model.sphere.weights().sum();
  const double base = model.kernel.b0 / (4.0 * std::numbers::pi) * sphere * grid.weight();
  const bool soft = model.kernel.form == KernelForm::power_law_soft && model.kernel.lambda != 0.0;
  Eigen::MatrixXd k(nv, nv);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j) {
      if (!soft) {
        k(i, j) = base;
      } else {
        const double s = (grid.nodes().row(i) - grid.nodes().row(j)).norm();
        k(i, j) = base * std::pow(std::max(s, model.kernel.speed_floor), -model.kernel.lambda);
      }
    }
  return k;
}

template <typename Scalar>
DistributionField<Scalar> loss_term(const DistributionField<Scalar>& g, const DistributionField<Scalar>& h,
                                    const CollisionModel& model) {
  require_same_space(g.space(), h.space(), "loss_term");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> k = loss_kernel_matrix(g.velocity(), model).template cast<Scalar>();
  typename DistributionField<Scalar>::Matrix rate = h.values() * k.transpose();
  return DistributionField<Scalar>(g.space(), g.values().cwiseProduct(rate));
}

namespace {

// Post-collision geometry for one lattice offset u = v - v* and one sphere
// direction. Because v and v* sit on the lattice, the fractional positions of
// v' = v - (u.w)w and v*' = v* + (u.w)w depend only on (u, w).
struct CornerSet {
  int shift[3];
  double frac[3];
  int extent[3];  // 1 when the point is off-lattice along the axis
  int count;
  int offset[8];  // flattened node offsets from the low corner
  double w[8];
};

struct CollisionStencil {
  CornerSet g;
  CornerSet h;
  double weight;
};

void finish_corners(CornerSet& cs, int n) {
  for (int a = 0; a < 3; ++a) cs.extent[a] = cs.frac[a] == 0.0 ? 0 : 1;
  cs.count = 0;
  for (int cx = 0; cx <= cs.extent[0]; ++cx)
    for (int cy = 0; cy <= cs.extent[1]; ++cy)
      for (int cz = 0; cz <= cs.extent[2]; ++cz) {
        cs.offset[cs.count] = (cx * n + cy) * n + cz;
        cs.w[cs.count] = (cx ? cs.frac[0] : 1.0 - cs.frac[0]) * (cy ? cs.frac[1] : 1.0 - cs.frac[1]) *
                         (cz ? cs.frac[2] : 1.0 - cs.frac[2]);
        ++cs.count;
      }
}

void split_lattice(double cells, int& shift, double& frac) {
  double fl = std::floor(cells);
  double th = cells - fl;
  if (th < 1e-12) th = 0.0;
  if (th > 1.0 - 1e-12) {
    th = 0.0;
    fl += 1.0;
  }
  shift = static_cast<int>(fl);
  frac = th;
}

std::vector<CollisionStencil> collision_stencils(const VelocityGrid& grid, const CollisionModel& model) {
  const int n = grid.nodes_per_axis();
  const int span = 2 * n - 1;
  const double h = grid.spacing();
  const auto& sphere = model.sphere;
  const auto& half = sphere.half_set();
  const double base = model.kernel.b0 / (4.0 * std::numbers::pi) * grid.weight();
  const bool soft = model.kernel.form == KernelForm::power_law_soft && model.kernel.lambda != 0.0;
  std::vector<CollisionStencil> table(static_cast<std::size_t>(span) * span * span * half.size());
  std::size_t e = 0;
  for (int dx = -(n - 1); dx < n; ++dx)
    for (int dy = -(n - 1); dy < n; ++dy)
      for (int dz = -(n - 1); dz < n; ++dz) {
        const Vec3 u = h * Vec3(dx, dy, dz);
        double b = base;
        if (soft) b *= std::pow(std::max(u.norm(), model.kernel.speed_floor), -model.kernel.lambda);
        for (int k : half) {
          CollisionStencil& st = table[e++];
          const Vec3 w = sphere.direction(k);
          const Vec3 delta = u.dot(w) * w;
          for (int a = 0; a < 3; ++a) {
            split_lattice(-delta(a) / h, st.g.shift[a], st.g.frac[a]);
            split_lattice(delta(a) / h, st.h.shift[a], st.h.frac[a]);
          }
          finish_corners(st.g, n);
          finish_corners(st.h, n);
          // w and -w give the same post-collision pair
          st.weight = 2.0 * sphere.weights()(k) * b;
        }
      }
  return table;
}

// Corner node indices and trilinear weights for the set anchored at lattice
// point p, dropping corners outside the grid.
int corners(int n, const int p[3], const CornerSet& cs, int* idx, double* w) {
  const int anchor = (p[0] * n + p[1]) * n + p[2];
  if (p[0] >= 0 && p[1] >= 0 && p[2] >= 0 && p[0] + cs.extent[0] < n && p[1] + cs.extent[1] < n &&
      p[2] + cs.extent[2] < n) {
    for (int m = 0; m < cs.count; ++m) {
      idx[m] = anchor + cs.offset[m];
      w[m] = cs.w[m];
    }
    return cs.count;
  }
  int count = 0;
  int m = 0;
  for (int cx = 0; cx <= cs.extent[0]; ++cx)
    for (int cy = 0; cy <= cs.extent[1]; ++cy)
      for (int cz = 0; cz <= cs.extent[2]; ++cz, ++m) {
        const int ix = p[0] + cx, iy = p[1] + cy, iz = p[2] + cz;
        if (ix < 0 || ix >= n || iy < 0 || iy >= n || iz < 0 || iz >= n) continue;
        idx[count] = anchor + cs.offset[m];
        w[count] = cs.w[m];
        ++count;
      }
  return count;
}

}  // namespace

template <typename Scalar>
DistributionField<Scalar> gain_term(const DistributionField<Scalar>& g, const DistributionField<Scalar>& h,
                                    const CollisionModel& model) {
  require_same_space(g.space(), h.space(), "gain_term");
  model.kernel.validate();
  const auto& grid = g.velocity();
  const int n = grid.nodes_per_axis();
  const int nv = grid.size();
  const int cells = g.cells();
  const std::size_t nh = model.sphere.half_set().size();
  const std::vector<CollisionStencil> table = collision_stencils(grid, model);
  const Scalar* G = g.values().data();
  const Scalar* H = h.values().data();

  typename DistributionField<Scalar>::Matrix out = DistributionField<Scalar>::Matrix::Zero(cells, nv);
  Scalar* P = out.data();
  // Every output node accumulates in (u, w) order whatever the chunking, so
  // the result does not depend on the worker count.
  const int chunks = std::max(1, std::min(nv, workers()));
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t chunk) {
    const int j0 = static_cast<int>(chunk * nv / chunks);
    const int j1 = static_cast<int>((chunk + 1) * nv / chunks);
    std::vector<Scalar> ga(cells), hb(cells);
    int idx_g[8], idx_h[8];
    double w_g[8], w_h[8];
    std::size_t u_index = 0;
    for (int dx = -(n - 1); dx < n; ++dx)
      for (int dy = -(n - 1); dy < n; ++dy)
        for (int dz = -(n - 1); dz < n; ++dz, ++u_index) {
          const CollisionStencil* row = table.data() + u_index * nh;
          for (int j = j0; j < j1; ++j) {
            const auto iv = grid.axis_indices(j);
            const int is[3] = {iv[0] - dx, iv[1] - dy, iv[2] - dz};
            if (is[0] < 0 || is[0] >= n || is[1] < 0 || is[1] >= n || is[2] < 0 || is[2] >= n) continue;
            Scalar* acc = P + static_cast<std::size_t>(j) * cells;
            for (std::size_t k = 0; k < nh; ++k) {
              const CollisionStencil& st = row[k];
              int pg[3], ph[3];
              for (int a = 0; a < 3; ++a) {
                pg[a] = iv[a] + st.g.shift[a];
                ph[a] = is[a] + st.h.shift[a];
              }
              const int cg = corners(n, pg, st.g, idx_g, w_g);
              if (cg == 0) continue;
              const int ch = corners(n, ph, st.h, idx_h, w_h);
              if (ch == 0) continue;
              if (cells == 1) {
                double a = 0.0, b = 0.0;
                for (int m = 0; m < cg; ++m) a += w_g[m] * G[idx_g[m]];
                for (int m = 0; m < ch; ++m) b += w_h[m] * H[idx_h[m]];
                acc[0] += static_cast<Scalar>(st.weight * a * b);
                continue;
              }
              {
                const Scalar* col = G + static_cast<std::size_t>(idx_g[0]) * cells;
                const Scalar wm = static_cast<Scalar>(w_g[0]);
                for (int c = 0; c < cells; ++c) ga[c] = wm * col[c];
              }
              for (int m = 1; m < cg; ++m) {
                const Scalar* col = G + static_cast<std::size_t>(idx_g[m]) * cells;
                const Scalar wm = static_cast<Scalar>(w_g[m]);
                for (int c = 0; c < cells; ++c) ga[c] += wm * col[c];
              }
              {
                const Scalar* col = H + static_cast<std::size_t>(idx_h[0]) * cells;
                const Scalar wm = static_cast<Scalar>(w_h[0]);
                for (int c = 0; c < cells; ++c) hb[c] = wm * col[c];
              }
              for (int m = 1; m < ch; ++m) {
                const Scalar* col = H + static_cast<std::size_t>(idx_h[m]) * cells;
                const Scalar wm = static_cast<Scalar>(w_h[m]);
                for (int c = 0; c < cells; ++c) hb[c] += wm * col[c];
              }
              const Scalar wt = static_cast<Scalar>(st.weight);
              for (int c = 0; c < cells; ++c) acc[c] += wt * ga[c] * hb[c];
            }
          }
        }
  });
  return DistributionField<Scalar>(g.space(), std::move(out));
}

template <typename Scalar>
DistributionField<Scalar> bilinear_collision(const DistributionField<Scalar>& g, const DistributionField<Scalar>& h,
                                             const CollisionModel& model) {
  return gain_term(g, h, model) - loss_term(g, h, model);
}

template <typename Scalar>
DistributionField<Scalar> collision(const DistributionField<Scalar>& g, const CollisionModel& model) {
  return bilinear_collision(g, g, model);
}

template <typename Scalar>
DistributionField<Scalar> homogenized_collision(const DistributionField<Scalar>& g, const CollisionModel& model) {
  return bilinear_collision(g, homogenize(g), model);
}

template <typename Scalar>
DistributionField<Scalar> collision_frequency(const DistributionField<Scalar>& g, const CollisionModel& model) {
  if (g.values().size() > 0 && g.values().minCoeff() < 0)
    throw PreconditionError("collision_frequency: field must be nonnegative");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> k = loss_kernel_matrix(g.velocity(), model).template cast<Scalar>();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> rate = block_average(g) * k.transpose();
  return DistributionField<Scalar>(g.space(), expand_blocks<Scalar>(g.partition(), rate));
}

template <typename Scalar>
DistributionField<Scalar> defect(const DistributionField<Scalar>& g, const DistributionField<Scalar>& h, double t,
                                 double s, const CollisionModel& model, const StreamingScheme& scheme) {
  require_same_space(g.space(), h.space(), "defect");
  return homogenized_collision(stream(g, t, scheme), model) - stream(collision(h, model), s, scheme);
}

#define KDL_INSTANTIATE(S)                                                                                            \
  template DistributionField<S> stream(const DistributionField<S>&, double, const StreamingScheme&, OutflowLeak*);    \
  template DistributionField<S> translate(const DistributionField<S>&, const Vec3&, const StreamingScheme&,           \
                                          OutflowLeak*);                                                              \
  template Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> block_average(const DistributionField<S>&);               \
  template DistributionField<S> homogenize(const DistributionField<S>&);                                              \
  template DistributionField<S> loss_term(const DistributionField<S>&, const DistributionField<S>&,                   \
                                          const CollisionModel&);                                                     \
  template DistributionField<S> gain_term(const DistributionField<S>&, const DistributionField<S>&,                   \
                                          const CollisionModel&);                                                     \
  template DistributionField<S> bilinear_collision(const DistributionField<S>&, const DistributionField<S>&,          \
                                                   const CollisionModel&);                                            \
  template DistributionField<S> collision(const DistributionField<S>&, const CollisionModel&);                        \
  template DistributionField<S> homogenized_collision(const DistributionField<S>&, const CollisionModel&);            \
  template DistributionField<S> collision_frequency(const DistributionField<S>&, const CollisionModel&);              \
  template DistributionField<S> defect(const DistributionField<S>&, const DistributionField<S>&, double, double,      \
                                       const CollisionModel&, const StreamingScheme&);
KDL_INSTANTIATE(float)
KDL_INSTANTIATE(double)
#undef KDL_INSTANTIATE

}  // namespace kdl
