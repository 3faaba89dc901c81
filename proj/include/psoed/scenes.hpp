#pragma once

#include <filesystem>
#include <string>

#include "psoed/core_types.hpp"

namespace psoed {

enum class SceneKind { Sphere, Paraboloid, Plane, FromFile };

struct AlbedoSpec {
  enum class Kind { Constant, Checkerboard } kind = Kind::Constant;
  double c1 = 1.0;
  double c2 = 1.0;
  int cell = 8;
};

/// Analytic ground-truth scene on the image frame [-1, 1]^2 (x right, y up),
/// sampled at pixel centers.
struct SceneSpec {
  SceneKind kind = SceneKind::Sphere;
  int width = 64;
  int height = 64;
  double radius = 1.0;     // sphere radius as a fraction of the half-frame
  double curvature = 0.5;  // paraboloid z = -a (x^2 + y^2)
  double p = 0.0;          // plane gradient df/dx
  double q = 0.0;          // plane gradient df/dy
  std::filesystem::path path;  // normal map for FromFile
  AlbedoSpec albedo;

  void validate() const;
};

struct Scene {
  NormalMap normals;
  AlbedoMap albedo;
};

/// Normal-space x of pixel column i (pixel centers mapped to [-1, 1]).
double frame_x(int i, int width);
/// Normal-space y of pixel row j; row 0 is the top of the image.
double frame_y(int j, int height);

/// Camera-facing normal of the surface z = f(x, y) with gradient (p, q):
/// (-p, -q, 1) / |(-p, -q, 1)|.
Vec3 normal_from_gradient(double p, double q);

Scene generate(const SceneSpec& spec);

/// Reads a 3-channel PFM of normals. Non-finite, near-zero or back-facing
/// (z <= 0) pixels are masked; the rest are normalized. If a sibling
/// "<stem>.mask.pfm" exists, its zero pixels are masked too.
NormalMap ingest_normal_map(const std::filesystem::path& path);

}  // namespace psoed
