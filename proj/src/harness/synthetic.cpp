#include "pmri/harness/synthetic.hpp"

#include "pmri/core/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace pmri {

PhantomKind parse_phantom_kind(std::string const &name)
{
  if (name == "shepp_logan") { return PhantomKind::shepp_logan; }
  if (name == "blocks") { return PhantomKind::blocks; }
  throw ConfigError("unknown phantom kind '" + name + "'");
}

namespace {

struct Ellipse
{
  double value, a, b, x0, y0, phi_deg;
};

// Modified Shepp-Logan (Toft) intensities.
constexpr std::array<Ellipse, 10> kSheppLogan{{
  {1.0, 0.69, 0.92, 0.0, 0.0, 0},
  {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0},
  {-0.2, 0.11, 0.31, 0.22, 0.0, -18},
  {-0.2, 0.16, 0.41, -0.22, 0.0, 18},
  {0.1, 0.21, 0.25, 0.0, 0.35, 0},
  {0.1, 0.046, 0.046, 0.0, 0.1, 0},
  {0.1, 0.046, 0.046, 0.0, -0.1, 0},
  {0.1, 0.046, 0.023, -0.08, -0.605, 0},
  {0.1, 0.023, 0.023, 0.0, -0.606, 0},
  {0.1, 0.023, 0.046, 0.06, -0.605, 0},
}};

void fill_rect(Image &img, Index r0, Index c0, Index h, Index w, double v)
{
  for (Index i = r0; i < r0 + h; ++i) {
    for (Index j = c0; j < c0 + w; ++j) { img(i, j) = v; }
  }
}

} // namespace

Image make_phantom(PhantomKind kind, Grid grid, bool smooth_phase)
{
  if (grid.nx < 8 || grid.ny < 8) { throw ConfigError("phantoms need a grid of at least 8x8"); }
  Image img(grid);
  if (kind == PhantomKind::shepp_logan) {
    for (Index i = 0; i < grid.nx; ++i) {
      double const v = 1.0 - 2.0 * (double(i) + 0.5) / double(grid.nx);
      for (Index j = 0; j < grid.ny; ++j) {
        double const u = 2.0 * (double(j) + 0.5) / double(grid.ny) - 1.0;
        double s = 0;
        for (Ellipse const &e : kSheppLogan) {
          double const phi = e.phi_deg * std::numbers::pi / 180.0;
          double const du = u - e.x0;
          double const dv = v - e.y0;
          double const p = (du * std::cos(phi) + dv * std::sin(phi)) / e.a;
          double const q = (-du * std::sin(phi) + dv * std::cos(phi)) / e.b;
          if (p * p + q * q <= 1.0) { s += e.value; }
        }
        img(i, j) = std::clamp(s, 0.0, 1.0);
      }
    }
  } else {
    Index const nx = grid.nx;
    Index const ny = grid.ny;
    fill_rect(img, nx / 4, ny / 4, nx / 8, ny / 8, 1.0);
    fill_rect(img, nx / 2, ny / 2, nx / 8, ny / 8, 0.5);
    fill_rect(img, nx / 4, (5 * ny) / 8, nx / 16, ny / 16, 0.75);
  }
  if (smooth_phase) {
    for (Index i = 0; i < grid.nx; ++i) {
      for (Index j = 0; j < grid.ny; ++j) {
        double const ph = 0.5 * std::numbers::pi * (double(i) / double(grid.nx) + 0.5 * double(j) / double(grid.ny));
        img(i, j) *= std::polar(1.0, ph);
      }
    }
  }
  return img;
}

MaskSpec::Kind parse_mask_kind(std::string const &name)
{
  if (name == "full") { return MaskSpec::Kind::full; }
  if (name == "every_nth") { return MaskSpec::Kind::every_nth; }
  if (name == "variable_density_lines") { return MaskSpec::Kind::variable_density_lines; }
  if (name == "poisson_disc") { return MaskSpec::Kind::poisson_disc; }
  throw ConfigError("unknown mask kind '" + name + "'");
}

namespace {

SamplingMask line_mask(MaskSpec const &spec, Grid grid, Index band)
{
  Index const nx = grid.nx;
  Index const m = Index(std::llround(spec.fraction * double(nx)));
  if (m < band) {
    throw ConfigError("sampling fraction " + std::to_string(spec.fraction) + " is too small for a center band of " +
                      std::to_string(band) + " lines");
  }
  std::vector<uint8_t> rows(static_cast<size_t>(nx), 0);
  Index const first = nx / 2 - band / 2;
  for (Index i = first; i < first + band; ++i) { rows[size_t(i)] = 1; }

  // Rows are drawn in centered order (DC at nx / 2) and shifted to DFT order at the end.
  // Weighted sampling without replacement, density falling off quadratically from the center.
  Rng rng(spec.seed);
  std::vector<double> w(static_cast<size_t>(nx));
  for (Index i = 0; i < nx; ++i) {
    double const d = std::abs(double(i) - double(nx / 2)) / (0.5 * double(nx));
    w[size_t(i)] = rows[size_t(i)] ? 0.0 : std::pow(std::max(0.0, 1.0 - d), 2) + 0.05;
  }
  for (Index picked = band; picked < m; ++picked) {
    double total = 0;
    for (double x : w) { total += x; }
    double t = rng.uniform() * total;
    size_t chosen = 0;
    for (size_t i = 0; i < w.size(); ++i) {
      if (w[i] <= 0) { continue; }
      chosen = i;
      if (t < w[i]) { break; }
      t -= w[i];
    }
    rows[chosen] = 1;
    w[chosen] = 0;
  }

  std::vector<uint8_t> keep(size_t(grid.size()), 0);
  for (Index i = 0; i < nx; ++i) {
    if (rows[size_t(i)]) {
      Index const row = (i + nx - nx / 2) % nx;
      for (Index j = 0; j < grid.ny; ++j) { keep[size_t(grid.flat(row, j))] = 1; }
    }
  }
  return SamplingMask(grid, std::move(keep));
}

// Dart throwing in centered coordinates with a fixed random visiting order; the center square is always sampled.
std::vector<uint8_t> dart_throw(Grid grid, std::vector<Index> const &order, std::vector<uint8_t> const &center, double radius)
{
  std::vector<uint8_t> keep = center;
  Index const reach = Index(std::ceil(radius));
  double const r2 = radius * radius;
  for (Index p : order) {
    Index const i = p / grid.ny;
    Index const j = p % grid.ny;
    bool ok = true;
    for (Index di = -reach; di <= reach && ok; ++di) {
      for (Index dj = -reach; dj <= reach; ++dj) {
        Index const a = i + di;
        Index const b = j + dj;
        if (a < 0 || b < 0 || a >= grid.nx || b >= grid.ny || (di == 0 && dj == 0)) { continue; }
        if (double(di * di + dj * dj) < r2 && keep[size_t(grid.flat(a, b))] && !center[size_t(grid.flat(a, b))]) {
          ok = false;
          break;
        }
      }
    }
    if (ok) { keep[size_t(p)] = 1; }
  }
  return keep;
}

SamplingMask poisson_mask(MaskSpec const &spec, Grid grid, Index band)
{
  Index const N = grid.size();
  Index const target = Index(std::llround(spec.fraction * double(N)));
  band = std::min({band, grid.nx, grid.ny});
  if (target < band * band) { throw ConfigError("sampling fraction is too small for the fully sampled center"); }

  std::vector<uint8_t> center(static_cast<size_t>(N), 0);
  for (Index i = grid.nx / 2 - band / 2; i < grid.nx / 2 - band / 2 + band; ++i) {
    for (Index j = grid.ny / 2 - band / 2; j < grid.ny / 2 - band / 2 + band; ++j) { center[size_t(grid.flat(i, j))] = 1; }
  }
  Rng rng(spec.seed);
  std::vector<Index> order(static_cast<size_t>(N));
  for (Index k = 0; k < N; ++k) { order[size_t(k)] = k; }
  for (size_t k = order.size(); k > 1; --k) { std::swap(order[k - 1], order[size_t(rng.below(k))]); }

  auto count = [](std::vector<uint8_t> const &v) { return Index(std::count(v.begin(), v.end(), uint8_t{1})); };
  double lo = 0.5;
  double hi = std::max(double(grid.nx), double(grid.ny));
  std::vector<uint8_t> best = dart_throw(grid, order, center, lo);
  for (int it = 0; it < 40; ++it) {
    double const mid = 0.5 * (lo + hi);
    std::vector<uint8_t> k = dart_throw(grid, order, center, mid);
    if (count(k) >= target) {
      lo = mid;
      best = std::move(k);
    } else {
      hi = mid;
    }
  }
  // Trim the excess in visiting order (outside the center) to hit the target count exactly.
  Index excess = count(best) - target;
  for (auto it = order.rbegin(); it != order.rend() && excess > 0; ++it) {
    if (best[size_t(*it)] && !center[size_t(*it)]) {
      best[size_t(*it)] = 0;
      --excess;
    }
  }
  std::vector<uint8_t> keep(best.size(), 0);
  for (Index i = 0; i < grid.nx; ++i) {
    for (Index j = 0; j < grid.ny; ++j) {
      keep[size_t(grid.flat((i + grid.nx - grid.nx / 2) % grid.nx, (j + grid.ny - grid.ny / 2) % grid.ny))] =
        best[size_t(grid.flat(i, j))];
    }
  }
  return SamplingMask(grid, std::move(keep));
}

} // namespace

SamplingMask make_mask(MaskSpec const &spec, Grid grid)
{
  Index const band = spec.center_band >= 0 ? spec.center_band : std::max<Index>(1, grid.nx / 8);
  switch (spec.kind) {
    case MaskSpec::Kind::full: return SamplingMask::full(grid);
    case MaskSpec::Kind::every_nth: {
      if (spec.n < 1) { throw ConfigError("every_nth needs n >= 1"); }
      std::vector<uint8_t> keep(size_t(grid.size()), 0);
      for (Index i = 0; i < grid.nx; i += spec.n) {
        for (Index j = 0; j < grid.ny; ++j) { keep[size_t(grid.flat(i, j))] = 1; }
      }
      return SamplingMask(grid, std::move(keep));
    }
    case MaskSpec::Kind::variable_density_lines:
    case MaskSpec::Kind::poisson_disc:
      if (!(spec.fraction > 0 && spec.fraction <= 1)) { throw ConfigError("sampling fraction must be in (0, 1]"); }
      return spec.kind == MaskSpec::Kind::variable_density_lines ? line_mask(spec, grid, band) : poisson_mask(spec, grid, band);
  }
  throw ConfigError("unknown mask kind");
}

SensitivityMaps synthetic_maps(Grid grid, Index ncoils, uint64_t seed)
{
  if (ncoils < 1) { throw ConfigError("need at least one coil"); }
  Rng rng(seed);
  CMatrix maps(grid.size(), ncoils);
  for (Index l = 0; l < ncoils; ++l) {
    double const angle = 2.0 * std::numbers::pi * double(l) / double(ncoils) + 0.1 * rng.uniform(-1, 1);
    double const cv = 0.6 * std::cos(angle);
    double const cu = 0.6 * std::sin(angle);
    double const width = 0.7;
    double const pv = rng.uniform(-1, 1);
    double const pu = rng.uniform(-1, 1);
    for (Index i = 0; i < grid.nx; ++i) {
      double const v = 1.0 - 2.0 * (double(i) + 0.5) / double(grid.nx);
      for (Index j = 0; j < grid.ny; ++j) {
        double const u = 2.0 * (double(j) + 0.5) / double(grid.ny) - 1.0;
        double const r2 = (v - cv) * (v - cv) + (u - cu) * (u - cu);
        double const mag = std::exp(-r2 / (2.0 * width * width));
        maps(grid.flat(i, j), l) = std::polar(mag, 0.5 * (pv * v + pu * u) + double(l));
      }
    }
  }
  return SensitivityMaps(grid, std::move(maps)).normalized();
}

KSpaceData simulate(SystemOperator const &op, Image const &truth, double snr_db, uint64_t seed)
{
  KSpaceData y = op.forward(truth);
  if (std::isinf(snr_db) && snr_db > 0) { return y; }
  if (!std::isfinite(snr_db)) { throw ConfigError("snr must be finite or +inf"); }
  double const signal = y.samples.squaredNorm();
  double const sigma = std::sqrt(signal / (double(y.samples.size()) * std::pow(10.0, snr_db / 10.0)));
  Rng rng(seed);
  for (Index l = 0; l < y.samples.cols(); ++l) {
    for (Index m = 0; m < y.samples.rows(); ++m) { y.samples(m, l) += sigma * rng.complex_normal(); }
  }
  return y;
}

double measured_snr_db(KSpaceData const &clean, KSpaceData const &noisy)
{
  return 10.0 * std::log10(clean.samples.squaredNorm() / (noisy.samples - clean.samples).squaredNorm());
}

double nrmse(CVector const &x, CVector const &ref)
{
  if (x.size() != ref.size()) { throw DimensionError("nrmse: size mismatch"); }
  double const r = ref.norm();
  if (!(r > 0)) { throw ConfigError("nrmse needs a nonzero reference"); }
  return (x - ref).norm() / r;
}

double nrmse(Image const &x, Image const &ref)
{
  require_grid(ref.grid(), x.grid(), "nrmse");
  return nrmse(x.vec(), ref.vec());
}

Image zero_filled_image(SystemOperator const &op, KSpaceData const &y)
{
  Image x = op.adjoint(y);
  x.vec() /= double(op.grid().size());
  return x;
}

double lambda_heuristic(SystemOperator const &op, KSpaceData const &y, double scale)
{
  return scale * op.adjoint(y).vec().cwiseAbs().maxCoeff();
}

} // namespace pmri
