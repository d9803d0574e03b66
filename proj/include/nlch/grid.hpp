#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace nlch {

/// Uniform cell-centred rectangle [0,Lx] (x [0,Ly]) with homogeneous Neumann
/// boundary. Storage is row-major: index(i, j) = j * nx + i.
class Grid {
 public:
  Grid() = default;
  static Grid make_1d(double length, int cells);
  static Grid make_2d(double length_x, double length_y, int cells_x, int cells_y);

  int dim() const { return dim_; }
  double length(int axis) const { return lengths_[axis]; }
  int cells(int axis) const { return cells_[axis]; }
  double spacing(int axis) const { return lengths_[axis] / cells_[axis]; }
  int nx() const { return cells_[0]; }
  int ny() const { return cells_[1]; }

  std::size_t size() const { return static_cast<std::size_t>(cells_[0]) * cells_[1]; }
  double cell_volume() const;
  double measure() const { return lengths_[0] * lengths_[1]; }

  double center(int axis, int idx) const { return (idx + 0.5) * spacing(axis); }
  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * cells_[0] + i;
  }

  bool operator==(const Grid&) const = default;

 private:
  int dim_ = 1;
  // Unused second axis of a 1-D grid has length 1 and a single cell.
  std::array<double, 2> lengths_{1.0, 1.0};
  std::array<int, 2> cells_{4, 1};
};

/// Cell-centred scalar field on a Grid.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& grid, double value = 0.0);
  /// Throws ShapeError when values.size() != grid.size().
  Field(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double min() const;
  double max() const;
  bool all_finite() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  Field& operator+=(double s);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Throws ShapeError naming `what` if the fields live on different grids.
void require_same_grid(const Field& a, const Field& b, const char* what);

/// Pointwise u -> f(u).
template <class F>
Field map(const Field& u, F&& f) {
  Field out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = f(u[i]);
  return out;
}

}  // namespace nlch
