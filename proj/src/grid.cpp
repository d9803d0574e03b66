#include "nlch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlch/errors.hpp"

namespace nlch {

namespace {

void check_axis(double length, int cells, const char* axis) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    std::ostringstream os;
    os << "grid length along " << axis << " must be positive, got " << length;
    throw ConfigError(os.str());
  }
  if (cells < 4) {
    std::ostringstream os;
    os << "grid needs at least 4 cells along " << axis << ", got " << cells;
    throw ConfigError(os.str());
  }
}

}  // namespace

Grid Grid::make_1d(double length, int cells) {
  check_axis(length, cells, "x");
  Grid g;
  g.dim_ = 1;
  g.lengths_ = {length, 1.0};
  g.cells_ = {cells, 1};
  return g;
}

Grid Grid::make_2d(double length_x, double length_y, int cells_x, int cells_y) {
  check_axis(length_x, cells_x, "x");
  check_axis(length_y, cells_y, "y");
  Grid g;
  g.dim_ = 2;
  g.lengths_ = {length_x, length_y};
  g.cells_ = {cells_x, cells_y};
  return g;
}

double Grid::cell_volume() const {
  return dim_ == 1 ? spacing(0) : spacing(0) * spacing(1);
}

Field::Field(const Grid& grid, double value) : grid_(grid), values_(grid.size(), value) {}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    std::ostringstream os;
    os << "field has " << values_.size() << " values but grid has " << grid_.size() << " cells";
    throw ShapeError(os.str());
  }
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o, "field +=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o, "field -=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::operator+=(double s) {
  for (double& v : values_) v += s;
  return *this;
}

void require_same_grid(const Field& a, const Field& b, const char* what) {
  if (!(a.grid() == b.grid()) || a.size() != b.size()) {
    throw ShapeError(std::string(what) + ": fields live on different grids");
  }
}

}  // namespace nlch
