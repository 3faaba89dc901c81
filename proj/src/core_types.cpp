#include "psoed/core_types.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

namespace psoed {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateVector: return "DegenerateVector";
    case ErrorCode::InvalidLightConfig: return "InvalidLightConfig";
    case ErrorCode::NonUnitRows: return "NonUnitRows";
    case ErrorCode::SingularLightMatrix: return "SingularLightMatrix";
    case ErrorCode::RankCollapse: return "RankCollapse";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FileFormatError: return "FileFormatError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

UnitVector3::UnitVector3(const Vec3& v) : v_(v) {
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > kUnitTolerance) {
    throw Error(ErrorCode::DegenerateVector, "vector is not unit length");
  }
}

Normalized normalize(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 1e-12) || !std::isfinite(n)) {
    throw Error(ErrorCode::DegenerateVector, "cannot normalize a vector of norm " + std::to_string(n));
  }
  return {UnitVector3(v / n), n};
}

double inverse_condition(const RowsX3& rows) {
  const Eigen::MatrixXd a = rows;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() < 3 || sv(0) <= 0.0) return 0.0;
  return sv(2) / sv(0);
}

LightConfig::LightConfig(RowsX3 rows, NormMode mode) : rows_(std::move(rows)), mode_(mode) {
  if (rows_.rows() < 3) {
    throw Error(ErrorCode::InvalidLightConfig,
                "need at least 3 lights, got " + std::to_string(rows_.rows()));
  }
  if (!rows_.allFinite()) throw Error(ErrorCode::InvalidLightConfig, "non-finite light direction");
  if (mode_ == NormMode::Unit) {
    for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
      if (std::abs(rows_.row(i).norm() - 1.0) > kUnitTolerance) {
        throw Error(ErrorCode::NonUnitRows, "light " + std::to_string(i) + " is not unit length");
      }
    }
  }
  if (!(inverse_condition(rows_) > kRankTolerance)) {
    throw Error(ErrorCode::SingularLightMatrix, "light directions do not span R^3");
  }
}

LightConfig LightConfig::from_directions(const RowsX3& directions) {
  RowsX3 rows = directions;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double n = rows.row(i).norm();
    if (!(n > 1e-12)) throw Error(ErrorCode::DegenerateVector, "zero light direction");
    rows.row(i) /= n;
  }
  return LightConfig(std::move(rows));
}

LightConfig LightConfig::identity_triad() { return LightConfig(RowsX3::Identity(3, 3)); }

NormalMap::NormalMap(Grid<Vec3> normals, Grid<std::uint8_t> mask)
    : normals_(std::move(normals)), mask_(std::move(mask)) {
  if (!normals_.same_shape(mask_)) {
    throw Error(ErrorCode::DimensionMismatch, "normal grid and mask differ in size");
  }
  for (std::size_t i = 0; i < normals_.size(); ++i) {
    if (!mask_[i]) continue;
    const Vec3& n = normals_[i];
    if (!n.allFinite() || std::abs(n.norm() - 1.0) > kMapUnitTolerance) {
      throw Error(ErrorCode::DegenerateVector, "valid normal at pixel " + std::to_string(i) + " is not unit");
    }
    if (!(n.z() > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "valid normal at pixel " + std::to_string(i) + " faces away from the camera");
    }
  }
}

std::size_t NormalMap::valid_count() const {
  std::size_t c = 0;
  for (auto v : mask_.data()) c += v ? 1 : 0;
  return c;
}

void AlbedoMap::check_range(const Grid<std::uint8_t>& mask) const {
  if (!values.same_shape(mask)) throw Error(ErrorCode::DimensionMismatch, "albedo and mask differ in size");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask[i] && !(values[i] > 0.0 && values[i] <= 1.0)) {
      throw Error(ErrorCode::InvalidSpec, "albedo outside (0, 1] at pixel " + std::to_string(i));
    }
  }
}

}  // namespace psoed
