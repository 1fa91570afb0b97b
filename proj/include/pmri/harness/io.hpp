#pragma once

#include "pmri/core/model.hpp"
#include "pmri/solvers/trace.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pmri {

/// N-dimensional complex array as stored in CPLX1 files (row-major).
struct ComplexArray
{
  std::vector<uint32_t> dims;
  CVector data;
};

/// Error reading or writing a data file.
struct IoError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

void write_cplx(std::string const &path, ComplexArray const &a);
ComplexArray read_cplx(std::string const &path);

void write_image(std::string const &path, Image const &x);
Image read_image(std::string const &path);

/// Columns of an N x L matrix stored as an (L, nx, ny) array.
void write_maps(std::string const &path, SensitivityMaps const &maps);
SensitivityMaps read_maps(std::string const &path);

void write_mask(std::string const &path, SamplingMask const &mask);
SamplingMask read_mask(std::string const &path);

/// Mask at `stem`.mask plus samples (M, L) at `stem`.cplx.
void write_kspace(std::string const &stem, KSpaceData const &y);
KSpaceData read_kspace(std::string const &stem);

/// 8-bit binary PGM of |x| scaled so the maximum maps to 255.
void write_pgm(std::string const &path, Image const &x);

/// `iter,cost,nrmse,seconds`; seconds are written only when `with_timing` is set, otherwise 0.
void write_trace_csv(std::string const &path, SolverTrace const &trace, bool with_timing);
std::string format_trace_csv(SolverTrace const &trace, bool with_timing);

/// Reads the magic bytes of a file: "CPLX1", "MASK1", "PGM" or "unknown".
std::string detect_format(std::string const &path);

} // namespace pmri
