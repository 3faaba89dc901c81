#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "psoed/error.hpp"

namespace psoed {

using Vec3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using RowsX3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

inline constexpr double kUnitTolerance = 1e-12;
inline constexpr double kRankTolerance = 1e-9;
inline constexpr double kMapUnitTolerance = 1e-9;

/// A direction in R^3 with norm 1 (within 1e-12).
class UnitVector3 {
 public:
  /// Throws DegenerateVector unless |v| is 1 within 1e-12. Use normalize() for
  /// arbitrary input.
  explicit UnitVector3(const Vec3& v);
  UnitVector3(double x, double y, double z) : UnitVector3(Vec3(x, y, z)) {}

  const Vec3& vec() const noexcept { return v_; }
  double x() const noexcept { return v_.x(); }
  double y() const noexcept { return v_.y(); }
  double z() const noexcept { return v_.z(); }
  double dot(const UnitVector3& o) const noexcept { return v_.dot(o.v_); }

 private:
  Vec3 v_;
};

struct Normalized {
  UnitVector3 vector;
  double norm;
};

/// Splits v into direction and length. Throws DegenerateVector when |v| <= 1e-12.
Normalized normalize(const Vec3& v);

enum class NormMode { Unit, Free };

/// Light directions stacked as rows of an m x 3 matrix. Always full rank;
/// rows are unit length unless built in free-norm mode.
class LightConfig {
 public:
  explicit LightConfig(RowsX3 rows, NormMode mode = NormMode::Unit);

  /// Normalizes each row first, then validates.
  static LightConfig from_directions(const RowsX3& directions);
  static LightConfig identity_triad();

  const RowsX3& rows() const noexcept { return rows_; }
  Eigen::Index m() const noexcept { return rows_.rows(); }
  Vec3 row(Eigen::Index i) const { return rows_.row(i).transpose(); }
  NormMode mode() const noexcept { return mode_; }
  Matrix3 gram() const { return rows_.transpose() * rows_; }

 private:
  RowsX3 rows_;
  NormMode mode_;
};

/// Smallest over largest singular value of an m x 3 matrix.
double inverse_condition(const RowsX3& rows);

/// Row-major H x W grid.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, const T& fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {
    if (width < 0 || height < 0) throw Error(ErrorCode::InvalidArgument, "negative grid size");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }
  bool same_shape(int w, int h) const noexcept { return w == width_ && h == height_; }
  template <typename U>
  bool same_shape(const Grid<U>& o) const noexcept {
    return o.width() == width_ && o.height() == height_;
  }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Unit normals on a pixel grid. Camera looks along -Z, so valid normals
/// have n_z > 0. Invalid pixels hold the zero vector.
class NormalMap {
 public:
  NormalMap() = default;
  NormalMap(Grid<Vec3> normals, Grid<std::uint8_t> mask);

  int width() const noexcept { return normals_.width(); }
  int height() const noexcept { return normals_.height(); }
  std::size_t size() const noexcept { return normals_.size(); }
  const Vec3& normal(std::size_t i) const { return normals_[i]; }
  const Vec3& normal(int x, int y) const { return normals_(x, y); }
  bool valid(std::size_t i) const { return mask_[i] != 0; }
  bool valid(int x, int y) const { return mask_(x, y) != 0; }
  std::size_t valid_count() const;

  const Grid<Vec3>& normals() const noexcept { return normals_; }
  const Grid<std::uint8_t>& mask() const noexcept { return mask_; }

 private:
  Grid<Vec3> normals_;
  Grid<std::uint8_t> mask_;
};

/// Per-pixel albedo. Ground-truth maps satisfy 0 < rho <= 1 on valid pixels;
/// estimates may exceed 1 under noise.
struct AlbedoMap {
  Grid<double> values;

  int width() const noexcept { return values.width(); }
  int height() const noexcept { return values.height(); }
  /// Throws InvalidSpec if any pixel valid in `mask` is outside (0, 1].
  void check_range(const Grid<std::uint8_t>& mask) const;
};

/// One image per light plus the noise level of each image.
struct IntensityStack {
  std::vector<Grid<double>> images;
  std::vector<double> sigmas;

  std::size_t m() const noexcept { return images.size(); }
  int width() const noexcept { return images.empty() ? 0 : images.front().width(); }
  int height() const noexcept { return images.empty() ? 0 : images.front().height(); }
};

}  // namespace psoed
