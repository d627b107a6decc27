#include "mirt/transform.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "mirt/error.hpp"
#include "mirt/rng.hpp"

namespace mirt {
namespace {

constexpr int kAdjointChunks = 16;

struct DirectionData {
  Vec3 omega;
  Vec9 ta;  // omega (x) omega_alpha
  Vec9 tb;  // omega (x) omega_beta
  double weight;
};

std::vector<DirectionData> direction_table(const LineSet& lines) {
  std::vector<DirectionData> dirs(static_cast<std::size_t>(lines.n_alpha()) * lines.n_beta());
  for (int n = 0; n < lines.n_beta(); ++n)
    for (int m = 0; m < lines.n_alpha(); ++m) {
      const auto fr = frame_at(lines.alpha(m), lines.beta(n));
      auto& d = dirs[m + static_cast<std::size_t>(lines.n_alpha()) * n];
      d.omega = fr.xi;
      d.ta = outer_flat(fr.xi, fr.xi_alpha);
      d.tb = outer_flat(fr.xi, fr.xi_beta);
      d.weight = lines.weight(m);
    }
  return dirs;
}

std::vector<Vec3> source_table(const LineSet& lines) {
  std::vector<Vec3> pts(lines.n_t());
  for (int k = 0; k < lines.n_t(); ++k) pts[k] = lines.curve().position(lines.t(k));
  return pts;
}

/// Trilinear stencil of one line sample: base voxel index and the eight corner weights.
struct Stencil {
  std::size_t corner[8];
  double w[8];
};

/// Calls visit(stencil) for every in-grid sample of the line through `source` along `omega`.
template <typename Visit>
void trace_line(const LineSet& lines, const Vec3& source, const Vec3& omega, Visit&& visit) {
  const Grid3& g = lines.grid();
  const double h = lines.step();
  const Vec3 rel = source - lines.sphere_center();
  const double s_mid = -rel.dot(omega);
  const double disc = lines.sphere_radius() * lines.sphere_radius() - rel.squaredNorm() +
                      s_mid * s_mid;
  if (disc <= 0.0) return;
  const int n_s = std::max(1, static_cast<int>(std::ceil(2.0 * std::sqrt(disc) / h)));
  const double s_first = s_mid - 0.5 * (n_s - 1) * h;

  // Continuous voxel index u(j) = a + b j per axis; restrict j to where 0 <= u <= n - 1.
  double a[3], b[3];
  double j_lo = 0.0, j_hi = n_s - 1.0;
  for (int ax = 0; ax < 3; ++ax) {
    a[ax] = (source[ax] + s_first * omega[ax] - g.origin[ax]) / g.spacing[ax];
    b[ax] = h * omega[ax] / g.spacing[ax];
    const double top = g.counts[ax] - 1.0;
    if (std::abs(b[ax]) < 1e-300) {
      if (a[ax] < 0.0 || a[ax] > top) return;
      continue;
    }
    double l = (0.0 - a[ax]) / b[ax], r = (top - a[ax]) / b[ax];
    if (l > r) std::swap(l, r);
    j_lo = std::max(j_lo, l);
    j_hi = std::min(j_hi, r);
  }
  if (j_lo > j_hi + 1.0) return;
  const int j_begin = std::max(0, static_cast<int>(std::floor(j_lo)) - 1);
  const int j_end = std::min(n_s - 1, static_cast<int>(std::ceil(j_hi)) + 1);

  const std::size_t sx = 1, sy = g.counts[0], sz = static_cast<std::size_t>(g.counts[0]) * g.counts[1];
  Stencil st;
  for (int j = j_begin; j <= j_end; ++j) {
    int i0[3];
    double fr[3];
    bool inside = true;
    for (int ax = 0; ax < 3; ++ax) {
      const double u = a[ax] + b[ax] * j;
      if (!(u >= 0.0 && u <= g.counts[ax] - 1.0)) {
        inside = false;
        break;
      }
      i0[ax] = std::min(static_cast<int>(u), g.counts[ax] - 2);
      fr[ax] = u - i0[ax];
    }
    if (!inside) continue;
    const std::size_t base = g.index(i0[0], i0[1], i0[2]);
    int c = 0;
    for (int dz = 0; dz < 2; ++dz)
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx, ++c) {
          st.corner[c] = base + dx * sx + dy * sy + dz * sz;
          st.w[c] = (dx ? fr[0] : 1.0 - fr[0]) * (dy ? fr[1] : 1.0 - fr[1]) *
                    (dz ? fr[2] : 1.0 - fr[2]);
        }
    visit(st);
  }
}

}  // namespace

LineSet::LineSet(const Curve& curve, const Grid3& grid, const LineSetParams& params)
    : curve_(curve), grid_(grid), params_(params) {
  grid_.validate();
  if (params.n_t < 1 || params.n_alpha < 1 || params.n_beta < 1)
    throw ValidationError("line set: sample counts must be positive");
  if (!(params.pole_band >= 0.0 && params.pole_band < 0.5 * std::numbers::pi))
    throw ValidationError("line set: pole band must lie in [0, pi/2)");
  if (!(params.step_fraction > 0.0 && params.step_fraction <= 0.5))
    throw ValidationError("line set: step fraction must lie in (0, 1/2]");
  t0_ = curve.t0();
  t1_ = curve.t1();
  dt_ = (t1_ - t0_) / params.n_t;
  alpha_min_ = params.pole_band;
  alpha_max_ = std::numbers::pi - params.pole_band;
  dalpha_ = (alpha_max_ - alpha_min_) / params.n_alpha;
  dbeta_ = 2.0 * std::numbers::pi / params.n_beta;
  step_ = params.step_fraction * grid.min_spacing();
  center_ = grid.center();
  radius_ = grid.bounding_radius();
}

Sinogram Sinogram::zeros(const LineSet& lines) {
  Sinogram s;
  s.n_t = lines.n_t();
  s.n_alpha = lines.n_alpha();
  s.n_beta = lines.n_beta();
  s.t0 = lines.t0();
  s.t1 = lines.t1();
  s.alpha_min = lines.alpha_min();
  s.alpha_max = lines.alpha_max();
  s.chan_a.assign(lines.size(), 0.0);
  s.chan_b.assign(lines.size(), 0.0);
  return s;
}

void Sinogram::validate() const {
  const std::size_t n = static_cast<std::size_t>(n_t) * n_alpha * n_beta;
  if (n_t < 1 || n_alpha < 1 || n_beta < 1 || chan_a.size() != n || chan_b.size() != n)
    throw ValidationError("sinogram: inconsistent sizes");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(chan_a[i]) || !std::isfinite(chan_b[i]))
      throw ValidationError("sinogram: non-finite value");
}

void Sinogram::check_compatible(const LineSet& lines) const {
  if (n_t != lines.n_t() || n_alpha != lines.n_alpha() || n_beta != lines.n_beta() ||
      chan_a.size() != lines.size() || chan_b.size() != lines.size())
    throw ValidationError("sinogram does not match the line set");
}

double Sinogram::norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < chan_a.size(); ++i)
    s += chan_a[i] * chan_a[i] + chan_b[i] * chan_b[i];
  return std::sqrt(s);
}

Sinogram& Sinogram::operator+=(const Sinogram& other) {
  if (other.size() != size()) throw ValidationError("sinogram: size mismatch");
  for (std::size_t i = 0; i < size(); ++i) {
    chan_a[i] += other.chan_a[i];
    chan_b[i] += other.chan_b[i];
  }
  return *this;
}

Sinogram& Sinogram::operator*=(double s) {
  for (auto& v : chan_a) v *= s;
  for (auto& v : chan_b) v *= s;
  return *this;
}

Sinogram mirt_forward(const Tensor2Field& f, const LineSet& lines) {
  if (!(f.grid() == lines.grid())) throw ValidationError("forward: field grid differs from line set");
  Sinogram out = Sinogram::zeros(lines);
  const auto dirs = direction_table(lines);
  const auto sources = source_table(lines);
  const double h = lines.step();
  const double* fv = f.data().data();
  const long n_dirs = static_cast<long>(dirs.size());

#pragma omp parallel for schedule(dynamic, 4)
  for (long d = 0; d < n_dirs; ++d) {
    const int m = static_cast<int>(d % lines.n_alpha());
    const int n = static_cast<int>(d / lines.n_alpha());
    const auto& dir = dirs[d];
    for (int k = 0; k < lines.n_t(); ++k) {
      double acc_a = 0.0, acc_b = 0.0;
      trace_line(lines, sources[k], dir.omega, [&](const Stencil& st) {
        for (int c = 0; c < 8; ++c) {
          const double* v = fv + st.corner[c] * 9;
          double pa = 0.0, pb = 0.0;
          for (int q = 0; q < 9; ++q) {
            pa += v[q] * dir.ta[q];
            pb += v[q] * dir.tb[q];
          }
          acc_a += st.w[c] * pa;
          acc_b += st.w[c] * pb;
        }
      });
      const std::size_t li = lines.index(k, m, n);
      out.chan_a[li] = h * acc_a;
      out.chan_b[li] = h * acc_b;
    }
  }
  return out;
}

Tensor2Field mirt_adjoint(const Sinogram& g, const LineSet& lines) {
  g.check_compatible(lines);
  const auto dirs = direction_table(lines);
  const auto sources = source_table(lines);
  const double scale = lines.step() / lines.grid().voxel_volume();
  const std::size_t n_values = lines.grid().voxel_count() * 9;
  const long n_dirs = static_cast<long>(dirs.size());

  // Fixed chunking with private buffers summed in chunk order keeps the result independent
  // of the thread count.
  std::vector<std::vector<double>> buffers(kAdjointChunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (int chunk = 0; chunk < kAdjointChunks; ++chunk) {
    auto& buf = buffers[chunk];
    buf.assign(n_values, 0.0);
    const long d0 = n_dirs * chunk / kAdjointChunks;
    const long d1 = n_dirs * (chunk + 1) / kAdjointChunks;
    for (long d = d0; d < d1; ++d) {
      const int m = static_cast<int>(d % lines.n_alpha());
      const int n = static_cast<int>(d / lines.n_alpha());
      const auto& dir = dirs[d];
      for (int k = 0; k < lines.n_t(); ++k) {
        const std::size_t li = lines.index(k, m, n);
        const double ca = dir.weight * scale * g.chan_a[li];
        const double cb = dir.weight * scale * g.chan_b[li];
        if (ca == 0.0 && cb == 0.0) continue;
        Vec9 t = ca * dir.ta + cb * dir.tb;
        trace_line(lines, sources[k], dir.omega, [&](const Stencil& st) {
          for (int c = 0; c < 8; ++c) {
            double* v = buf.data() + st.corner[c] * 9;
            for (int q = 0; q < 9; ++q) v[q] += st.w[c] * t[q];
          }
        });
      }
    }
  }

  Tensor2Field out(lines.grid());
  auto& ov = out.data();
  const long nv = static_cast<long>(n_values);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < nv; ++i) {
    double s = 0.0;
    for (int chunk = 0; chunk < kAdjointChunks; ++chunk) s += buffers[chunk][i];
    ov[i] = s;
  }
  return out;
}

Tensor2Field normal_op(const Tensor2Field& f, const LineSet& lines) {
  return mirt_adjoint(mirt_forward(f, lines), lines);
}

double sinogram_inner(const Sinogram& a, const Sinogram& b, const LineSet& lines) {
  a.check_compatible(lines);
  b.check_compatible(lines);
  double s = 0.0;
  for (int n = 0; n < lines.n_beta(); ++n)
    for (int m = 0; m < lines.n_alpha(); ++m) {
      double part = 0.0;
      for (int k = 0; k < lines.n_t(); ++k) {
        const std::size_t i = lines.index(k, m, n);
        part += a.chan_a[i] * b.chan_a[i] + a.chan_b[i] * b.chan_b[i];
      }
      s += lines.weight(m) * part;
    }
  return s;
}

double adjoint_defect(const Tensor2Field& f, const Sinogram& g, const LineSet& lines) {
  const Sinogram mf = mirt_forward(f, lines);
  const Tensor2Field mg = mirt_adjoint(g, lines);
  const double lhs = sinogram_inner(mf, g, lines);
  const double rhs = grid_inner(f, mg);
  const double denom = std::sqrt(sinogram_inner(mf, mf, lines) * sinogram_inner(g, g, lines)) +
                       std::sqrt(grid_inner(f, f) * grid_inner(mg, mg));
  return denom > 0.0 ? std::abs(lhs - rhs) / denom : std::abs(lhs - rhs);
}

Tensor2Field random_tensor_field(const Grid3& grid, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, stream_id(Stream::kRandomField, 2 * index));
  Tensor2Field f(grid);
  for (auto& v : f.data()) v = rng.normal();
  return f;
}

Sinogram random_sinogram(const LineSet& lines, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, stream_id(Stream::kRandomField, 2 * index + 1));
  Sinogram s = Sinogram::zeros(lines);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.chan_a[i] = rng.normal();
    s.chan_b[i] = rng.normal();
  }
  return s;
}

AdjointTestResult adjoint_test(const LineSet& lines, int pairs, std::uint64_t seed) {
  if (pairs < 1) throw ValidationError("adjoint test: pair count must be positive");
  const auto start = std::chrono::steady_clock::now();
  AdjointTestResult res;
  res.pairs = pairs;
  for (int p = 0; p < pairs; ++p) {
    const auto f = random_tensor_field(lines.grid(), seed, static_cast<std::uint64_t>(p));
    const auto g = random_sinogram(lines, seed, static_cast<std::uint64_t>(p));
    res.max_defect = std::max(res.max_defect, adjoint_defect(f, g, lines));
  }
  res.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace mirt
