#include "psoed/scenes.hpp"

#include <cmath>
#include <string>

#include "psoed/pfm.hpp"

namespace psoed {

void SceneSpec::validate() const {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidSpec, "scene width and height must be >= 1");
  const auto in_range = [](double a) { return a > 0.0 && a <= 1.0; };
  if (!in_range(albedo.c1) || (albedo.kind == AlbedoSpec::Kind::Checkerboard && !in_range(albedo.c2))) {
    throw Error(ErrorCode::InvalidSpec, "albedo values must lie in (0, 1]");
  }
  if (albedo.kind == AlbedoSpec::Kind::Checkerboard && albedo.cell < 1) {
    throw Error(ErrorCode::InvalidSpec, "checkerboard cell must be >= 1 pixel");
  }
  if (kind == SceneKind::Sphere && !(radius > 0.0)) throw Error(ErrorCode::InvalidSpec, "sphere radius must be > 0");
  if (kind == SceneKind::Paraboloid && !std::isfinite(curvature)) throw Error(ErrorCode::InvalidSpec, "bad curvature");
  if (kind == SceneKind::Plane && !(std::isfinite(p) && std::isfinite(q))) throw Error(ErrorCode::InvalidSpec, "bad plane gradient");
  if (kind == SceneKind::FromFile && path.empty()) throw Error(ErrorCode::InvalidSpec, "from_file scene needs a path");
}

double frame_x(int i, int width) { return (i + 0.5) / width * 2.0 - 1.0; }
double frame_y(int j, int height) { return 1.0 - (j + 0.5) / height * 2.0; }

Vec3 normal_from_gradient(double p, double q) { return Vec3(-p, -q, 1.0).normalized(); }

namespace {

Grid<double> make_albedo(const AlbedoSpec& a, int w, int h) {
  Grid<double> g(w, h, a.c1);
  if (a.kind == AlbedoSpec::Kind::Checkerboard) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) g(x, y) = ((x / a.cell + y / a.cell) % 2 == 0) ? a.c1 : a.c2;
  }
  return g;
}

}  // namespace

Scene generate(const SceneSpec& spec) {
  spec.validate();
  if (spec.kind == SceneKind::FromFile) {
    NormalMap nm = ingest_normal_map(spec.path);
    AlbedoMap am{make_albedo(spec.albedo, nm.width(), nm.height())};
    return Scene{std::move(nm), std::move(am)};
  }
  const int w = spec.width;
  const int h = spec.height;
  Grid<Vec3> normals(w, h, Vec3::Zero());
  Grid<std::uint8_t> mask(w, h, 0);

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const double fy = frame_y(y, h);
    for (int x = 0; x < w; ++x) {
      const double fx = frame_x(x, w);
      switch (spec.kind) {
        case SceneKind::Sphere: {
          const double r2 = spec.radius * spec.radius;
          const double d2 = fx * fx + fy * fy;
          if (d2 < r2) {
            const double nx = fx / spec.radius;
            const double ny = fy / spec.radius;
            const double nz = std::sqrt(std::max(0.0, 1.0 - nx * nx - ny * ny));
            const Vec3 n = Vec3(nx, ny, nz).normalized();
            if (n.z() > 0.0) {
              normals(x, y) = n;
              mask(x, y) = 1;
            }
          }
          break;
        }
        case SceneKind::Paraboloid:
          normals(x, y) = normal_from_gradient(-2.0 * spec.curvature * fx, -2.0 * spec.curvature * fy);
          mask(x, y) = 1;
          break;
        case SceneKind::Plane:
          normals(x, y) = normal_from_gradient(spec.p, spec.q);
          mask(x, y) = 1;
          break;
        case SceneKind::FromFile:
          break;
      }
    }
  }
  return Scene{NormalMap(std::move(normals), std::move(mask)), AlbedoMap{make_albedo(spec.albedo, w, h)}};
}

NormalMap ingest_normal_map(const std::filesystem::path& path) {
  const PfmImage img = read_pfm(path);
  if (img.channels != 3) throw Error(ErrorCode::FileFormatError, path.string() + ": normal map must have 3 channels");
  Grid<std::uint8_t> extra(img.width, img.height, 1);
  const auto mpath = mask_path_for(path);
  if (std::filesystem::exists(mpath)) {
    const PfmImage m = read_pfm(mpath);
    if (m.channels != 1 || m.width != img.width || m.height != img.height) {
      throw Error(ErrorCode::FileFormatError, mpath.string() + ": mask does not match the normal map");
    }
    for (std::size_t i = 0; i < extra.size(); ++i) extra[i] = m.data[i] != 0.0f ? 1 : 0;
  }
  Grid<Vec3> normals(img.width, img.height, Vec3::Zero());
  Grid<std::uint8_t> mask(img.width, img.height, 0);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (!extra(x, y)) continue;
      const Vec3 v(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
      const double n = v.norm();
      if (!v.allFinite() || !(n > 1e-6)) continue;
      const Vec3 u = v / n;
      if (!(u.z() > 0.0)) continue;
      normals(x, y) = u;
      mask(x, y) = 1;
    }
  }
  NormalMap out(std::move(normals), std::move(mask));
  if (out.valid_count() == 0) throw Error(ErrorCode::EmptyMask, path.string() + " has no valid normal");
  return out;
}

}  // namespace psoed
