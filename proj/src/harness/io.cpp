#include "pmri/harness/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pmri {

namespace {

constexpr char kCplxMagic[6] = {'C', 'P', 'L', 'X', '1', '\0'};
constexpr char kMaskMagic[6] = {'M', 'A', 'S', 'K', '1', '\0'};

static_assert(std::endian::native == std::endian::little, "file formats assume a little-endian host");

std::ofstream open_out(std::string const &path)
{
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) { throw IoError("cannot open '" + path + "' for writing"); }
  return f;
}

std::ifstream open_in(std::string const &path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f) { throw IoError("cannot open '" + path + "'"); }
  return f;
}

template<typename T>
void put(std::ostream &f, T v)
{
  f.write(reinterpret_cast<char const *>(&v), sizeof(T));
}

template<typename T>
T get(std::istream &f, std::string const &path)
{
  T v{};
  if (!f.read(reinterpret_cast<char *>(&v), sizeof(T))) { throw IoError("truncated file '" + path + "'"); }
  return v;
}

std::vector<uint32_t> read_header(std::istream &f, char const (&magic)[6], std::string const &path, size_t &count)
{
  char m[6];
  if (!f.read(m, 6) || std::memcmp(m, magic, 6) != 0) { throw IoError("'" + path + "' has the wrong magic bytes"); }
  uint32_t const ndim = get<uint32_t>(f, path);
  if (ndim > 16) { throw IoError("'" + path + "' has an implausible rank"); }
  std::vector<uint32_t> dims(ndim);
  count = 1;
  for (auto &d : dims) {
    d = get<uint32_t>(f, path);
    count *= d;
  }
  return dims;
}

void write_header(std::ostream &f, char const (&magic)[6], std::vector<uint32_t> const &dims)
{
  f.write(magic, 6);
  put<uint32_t>(f, uint32_t(dims.size()));
  for (uint32_t d : dims) { put<uint32_t>(f, d); }
}

} // namespace

void write_cplx(std::string const &path, ComplexArray const &a)
{
  size_t n = 1;
  for (uint32_t d : a.dims) { n *= d; }
  if (n != size_t(a.data.size())) { throw DimensionError("CPLX1 dims do not match the data length"); }
  std::ofstream f = open_out(path);
  write_header(f, kCplxMagic, a.dims);
  for (Index k = 0; k < a.data.size(); ++k) {
    put<double>(f, a.data[k].real());
    put<double>(f, a.data[k].imag());
  }
  if (!f) { throw IoError("failed writing '" + path + "'"); }
}

ComplexArray read_cplx(std::string const &path)
{
  std::ifstream f = open_in(path);
  size_t n = 0;
  ComplexArray a;
  a.dims = read_header(f, kCplxMagic, path, n);
  a.data.resize(Index(n));
  for (size_t k = 0; k < n; ++k) {
    double const re = get<double>(f, path);
    double const im = get<double>(f, path);
    a.data[Index(k)] = Complex{re, im};
  }
  return a;
}

void write_image(std::string const &path, Image const &x)
{
  write_cplx(path, ComplexArray{{uint32_t(x.grid().nx), uint32_t(x.grid().ny)}, x.vec()});
}

Image read_image(std::string const &path)
{
  ComplexArray a = read_cplx(path);
  if (a.dims.size() != 2) { throw IoError("'" + path + "' is not a 2D image"); }
  return Image(Grid{a.dims[0], a.dims[1]}, std::move(a.data));
}

void write_maps(std::string const &path, SensitivityMaps const &maps)
{
  CMatrix const &m = maps.maps();
  write_cplx(path, ComplexArray{{uint32_t(m.cols()), uint32_t(maps.grid().nx), uint32_t(maps.grid().ny)},
                                Eigen::Map<CVector const>(m.data(), m.size())});
}

SensitivityMaps read_maps(std::string const &path)
{
  ComplexArray a = read_cplx(path);
  if (a.dims.size() != 3) { throw IoError("'" + path + "' is not an (L, nx, ny) map stack"); }
  Grid const grid{a.dims[1], a.dims[2]};
  CMatrix m = Eigen::Map<CMatrix>(a.data.data(), grid.size(), a.dims[0]);
  // Normalized maps are recognized so they keep the fast majorizer path.
  RVector const ss = m.cwiseAbs2().rowwise().sum();
  bool const normalized = ((ss.array() - 1.0).abs() <= SensitivityMaps::kNormalizedTolerance).all();
  return SensitivityMaps(grid, std::move(m), normalized);
}

void write_mask(std::string const &path, SamplingMask const &mask)
{
  std::ofstream f = open_out(path);
  write_header(f, kMaskMagic, {uint32_t(mask.grid().nx), uint32_t(mask.grid().ny)});
  f.write(reinterpret_cast<char const *>(mask.keep().data()), std::streamsize(mask.keep().size()));
  if (!f) { throw IoError("failed writing '" + path + "'"); }
}

SamplingMask read_mask(std::string const &path)
{
  std::ifstream f = open_in(path);
  size_t n = 0;
  std::vector<uint32_t> const dims = read_header(f, kMaskMagic, path, n);
  if (dims.size() != 2) { throw IoError("'" + path + "' is not a 2D mask"); }
  std::vector<uint8_t> keep(n);
  if (!f.read(reinterpret_cast<char *>(keep.data()), std::streamsize(n))) { throw IoError("truncated file '" + path + "'"); }
  for (uint8_t b : keep) {
    if (b > 1) { throw IoError("'" + path + "' has mask entries other than 0/1"); }
  }
  return SamplingMask(Grid{dims[0], dims[1]}, std::move(keep));
}

void write_kspace(std::string const &stem, KSpaceData const &y)
{
  write_mask(stem + ".mask", y.mask);
  CVector flat(y.samples.size());
  for (Index m = 0; m < y.samples.rows(); ++m) {
    for (Index l = 0; l < y.samples.cols(); ++l) { flat[m * y.samples.cols() + l] = y.samples(m, l); }
  }
  write_cplx(stem + ".cplx", ComplexArray{{uint32_t(y.samples.rows()), uint32_t(y.samples.cols())}, std::move(flat)});
}

KSpaceData read_kspace(std::string const &stem)
{
  SamplingMask mask = read_mask(stem + ".mask");
  ComplexArray a = read_cplx(stem + ".cplx");
  if (a.dims.size() != 2) { throw IoError("'" + stem + ".cplx' is not an (M, L) sample matrix"); }
  CMatrix s(a.dims[0], a.dims[1]);
  for (Index m = 0; m < s.rows(); ++m) {
    for (Index l = 0; l < s.cols(); ++l) { s(m, l) = a.data[m * s.cols() + l]; }
  }
  return KSpaceData(std::move(mask), std::move(s));
}

void write_pgm(std::string const &path, Image const &x)
{
  std::ofstream f = open_out(path);
  f << "P5\n" << x.grid().ny << ' ' << x.grid().nx << "\n255\n";
  double const mx = x.vec().cwiseAbs().maxCoeff();
  for (Index k = 0; k < x.vec().size(); ++k) {
    double const v = mx > 0 ? std::abs(x.vec()[k]) / mx : 0.0;
    f.put(char(uint8_t(std::lround(255.0 * v))));
  }
  if (!f) { throw IoError("failed writing '" + path + "'"); }
}

std::string format_trace_csv(SolverTrace const &trace, bool with_timing)
{
  std::ostringstream os;
  os << "iter,cost,nrmse,seconds\n";
  char buf[128];
  for (TraceRecord const &r : trace.records) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.6f\n", r.iter, r.cost, r.nrmse, with_timing ? r.seconds : 0.0);
    os << buf;
  }
  return os.str();
}

void write_trace_csv(std::string const &path, SolverTrace const &trace, bool with_timing)
{
  std::ofstream f = open_out(path);
  f << format_trace_csv(trace, with_timing);
  if (!f) { throw IoError("failed writing '" + path + "'"); }
}

std::string detect_format(std::string const &path)
{
  std::ifstream f = open_in(path);
  char m[6] = {};
  f.read(m, 6);
  if (std::memcmp(m, kCplxMagic, 6) == 0) { return "CPLX1"; }
  if (std::memcmp(m, kMaskMagic, 6) == 0) { return "MASK1"; }
  if (m[0] == 'P' && m[1] == '5') { return "PGM"; }
  return "unknown";
}

} // namespace pmri
