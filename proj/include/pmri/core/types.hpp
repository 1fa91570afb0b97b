#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pmri {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// Error taxonomy. Callers (the CLI in particular) map these onto exit codes.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct UnsupportedError : std::logic_error {
  using std::logic_error::logic_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvariantViolation : SolverError {
  using SolverError::SolverError;
};

/// Cartesian pixel grid. Pixel (i, j) lives at flat index i * ny + j.
struct Grid {
  Index nx = 0;
  Index ny = 0;

  Index size() const { return nx * ny; }
  Index flat(Index i, Index j) const { return i * ny + j; }
  bool operator==(Grid const &) const = default;
};

inline std::string to_string(Grid const &g)
{
  return std::to_string(g.nx) + "x" + std::to_string(g.ny);
}

/// Complex-valued 2D image stored row-major in a flat vector.
class Image
{
public:
  Image() = default;
  explicit Image(Grid grid)
    : grid_{grid}
    , data_{CVector::Zero(grid.size())}
  {
    if (grid.nx < 1 || grid.ny < 1) { throw DimensionError("image grid must be at least 1x1"); }
  }
  Image(Grid grid, CVector data)
    : grid_{grid}
    , data_{std::move(data)}
  {
    if (grid.nx < 1 || grid.ny < 1) { throw DimensionError("image grid must be at least 1x1"); }
    if (data_.size() != grid.size()) {
      throw DimensionError("image data length " + std::to_string(data_.size()) + " does not match grid " +
                           to_string(grid));
    }
  }

  Grid const &grid() const { return grid_; }
  Index nx() const { return grid_.nx; }
  Index ny() const { return grid_.ny; }
  Index size() const { return grid_.size(); }

  CVector const &vec() const { return data_; }
  CVector &vec() { return data_; }

  Complex operator()(Index i, Index j) const { return data_[grid_.flat(i, j)]; }
  Complex &operator()(Index i, Index j) { return data_[grid_.flat(i, j)]; }

private:
  Grid grid_;
  CVector data_;
};

inline void require_grid(Grid const &expected, Grid const &actual, char const *what)
{
  if (!(expected == actual)) {
    throw DimensionError(std::string(what) + ": grid " + to_string(actual) + " does not match " + to_string(expected));
  }
}

/// Real part of the canonical inner product <a, b> = a^H b.
inline double re_dot(CVector const &a, CVector const &b) { return a.dot(b).real(); }

} // namespace pmri
