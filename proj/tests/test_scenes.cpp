#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "psoed/pfm.hpp"
#include "psoed/scenes.hpp"

using namespace psoed;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("psoed_scenes_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Scenes, FrontalPlane) {
  SceneSpec spec;
  spec.kind = SceneKind::Plane;
  spec.width = 8;
  spec.height = 6;
  const Scene s = generate(spec);
  EXPECT_EQ(s.normals.valid_count(), 48u);
  for (std::size_t i = 0; i < s.normals.size(); ++i) EXPECT_EQ(s.normals.normal(i), Vec3(0, 0, 1));
}

TEST(Scenes, TiltedPlane) {
  SceneSpec spec;
  spec.kind = SceneKind::Plane;
  spec.p = 0.5;
  spec.q = -0.25;
  const Scene s = generate(spec);
  const Vec3 expect = Vec3(-0.5, 0.25, 1.0).normalized();
  EXPECT_LT((s.normals.normal(3, 7) - expect).norm(), 1e-15);
}

TEST(Scenes, SphereCenterAndRim) {
  SceneSpec spec;
  spec.width = spec.height = 65;
  const Scene s = generate(spec);
  EXPECT_TRUE(s.normals.valid(32, 32));
  EXPECT_LT((s.normals.normal(32, 32) - Vec3(0, 0, 1)).norm(), 1e-15);
  EXPECT_FALSE(s.normals.valid(0, 0));
  EXPECT_FALSE(s.normals.valid(64, 64));
  EXPECT_EQ(s.normals.normal(0, 0), Vec3::Zero());
}

TEST(Scenes, SphereMaskRule) {
  SceneSpec spec;
  spec.width = 37;
  spec.height = 29;
  spec.radius = 0.8;
  const Scene s = generate(spec);
  for (int j = 0; j < spec.height; ++j)
    for (int i = 0; i < spec.width; ++i) {
      const double x = frame_x(i, spec.width), y = frame_y(j, spec.height);
      EXPECT_EQ(s.normals.valid(i, j), x * x + y * y < 0.64) << i << "," << j;
      if (s.normals.valid(i, j)) {
        EXPECT_NEAR(s.normals.normal(i, j).norm(), 1.0, 1e-12);
        EXPECT_GT(s.normals.normal(i, j).z(), 0.0);
      }
    }
}

TEST(Scenes, SphereYPointsUp) {
  SceneSpec spec;
  spec.width = spec.height = 65;
  const Scene s = generate(spec);
  EXPECT_GT(s.normals.normal(32, 5).y(), 0.5);
  EXPECT_LT(s.normals.normal(32, 60).y(), -0.5);
  EXPECT_GT(s.normals.normal(60, 32).x(), 0.5);
}

TEST(Scenes, ParaboloidNormal) {
  SceneSpec spec;
  spec.kind = SceneKind::Paraboloid;
  spec.curvature = 0.5;
  spec.width = spec.height = 5;
  const Scene s = generate(spec);
  ASSERT_NEAR(frame_x(3, 5), 0.4, 1e-15);
  ASSERT_NEAR(frame_y(2, 5), 0.0, 1e-15);
  const Vec3 n = s.normals.normal(3, 2);
  EXPECT_NEAR(n.x(), 0.3714, 1e-4);
  EXPECT_NEAR(n.y(), 0.0, 1e-15);
  EXPECT_NEAR(n.z(), 0.9285, 1e-4);
  EXPECT_LT((n - Vec3(0.4, 0, 1).normalized()).norm(), 1e-15);
}

TEST(Scenes, CheckerboardAlbedo) {
  SceneSpec spec;
  spec.kind = SceneKind::Plane;
  spec.width = spec.height = 16;
  spec.albedo = {AlbedoSpec::Kind::Checkerboard, 0.9, 0.3, 4};
  const Scene s = generate(spec);
  EXPECT_EQ(s.albedo.values(0, 0), 0.9);
  EXPECT_EQ(s.albedo.values(4, 0), 0.3);
  EXPECT_EQ(s.albedo.values(4, 4), 0.9);
  EXPECT_NO_THROW(s.albedo.check_range(s.normals.mask()));
}

TEST(Scenes, InvalidSpecs) {
  SceneSpec spec;
  spec.width = 0;
  EXPECT_THROW(generate(spec), Error);
  spec = {};
  spec.albedo.c1 = 0.0;
  EXPECT_THROW(generate(spec), Error);
  spec = {};
  spec.albedo.c1 = 1.5;
  EXPECT_THROW(spec.validate(), Error);
  spec = {};
  spec.radius = -1.0;
  EXPECT_THROW(spec.validate(), Error);
}

TEST(Ingest, RoundTripIsExactOnValidPixels) {
  const fs::path dir = temp_dir("roundtrip");
  for (SceneKind kind : {SceneKind::Sphere, SceneKind::Paraboloid, SceneKind::Plane}) {
    SceneSpec spec;
    spec.kind = kind;
    spec.width = 40;
    spec.height = 30;
    spec.p = 0.2;
    const Scene s = generate(spec);
    write_normal_map(dir / "n.pfm", s.normals);
    const NormalMap back = ingest_normal_map(dir / "n.pfm");
    ASSERT_EQ(back.valid_count(), s.normals.valid_count());
    const PfmImage stored = read_pfm(dir / "n.pfm");
    for (std::size_t i = 0; i < back.size(); ++i) {
      ASSERT_EQ(back.valid(i), s.normals.valid(i));
      if (!back.valid(i)) continue;
      for (std::size_t c = 0; c < 3; ++c) {
        // Ingested values reproduce the stored float32 bits exactly.
        EXPECT_EQ(static_cast<float>(back.normal(i)(static_cast<int>(c))), stored.data[3 * i + c]);
        EXPECT_NEAR(stored.data[3 * i + c], s.normals.normal(i)(static_cast<int>(c)), 1.2e-7);
      }
      EXPECT_NEAR(back.normal(i).norm(), 1.0, 1e-12);
    }
    // A second round trip is a fixed point.
    write_normal_map(dir / "n2.pfm", back);
    EXPECT_EQ(read_pfm(dir / "n.pfm").data, read_pfm(dir / "n2.pfm").data);
  }
}

TEST(Ingest, ZeroVectorMaskedAndUnnormalizedFixed) {
  const fs::path dir = temp_dir("degenerate");
  PfmImage img;
  img.width = 3;
  img.height = 1;
  img.channels = 3;
  img.data = {0, 0, 0, 0, 0, 2, 0, 0, -1};
  write_pfm(dir / "n.pfm", img);
  const NormalMap n = ingest_normal_map(dir / "n.pfm");
  EXPECT_FALSE(n.valid(0, 0));
  EXPECT_TRUE(n.valid(1, 0));
  EXPECT_EQ(n.normal(1, 0), Vec3(0, 0, 1));
  EXPECT_FALSE(n.valid(2, 0));
}

TEST(Ingest, NonFiniteMasked) {
  const fs::path dir = temp_dir("nonfinite");
  PfmImage img;
  img.width = 2;
  img.height = 1;
  img.channels = 3;
  img.data = {std::nanf(""), 0, 1, 0, 0, 1};
  write_pfm(dir / "n.pfm", img);
  const NormalMap n = ingest_normal_map(dir / "n.pfm");
  EXPECT_FALSE(n.valid(0, 0));
  EXPECT_TRUE(n.valid(1, 0));
}

TEST(Ingest, SiblingMaskApplies) {
  const fs::path dir = temp_dir("mask");
  PfmImage img;
  img.width = 2;
  img.height = 1;
  img.channels = 3;
  img.data = {0, 0, 1, 0, 0, 1};
  write_pfm(dir / "n.pfm", img);
  Grid<std::uint8_t> m(2, 1, 1);
  m(0, 0) = 0;
  write_pfm(mask_path_for(dir / "n.pfm"), mask_to_pfm(m));
  const NormalMap n = ingest_normal_map(dir / "n.pfm");
  EXPECT_FALSE(n.valid(0, 0));
  EXPECT_TRUE(n.valid(1, 0));
}

TEST(Ingest, Errors) {
  const fs::path dir = temp_dir("errors");
  PfmImage img;
  img.width = 1;
  img.height = 1;
  img.channels = 3;
  img.data = {0, 0, 0};
  write_pfm(dir / "empty.pfm", img);
  try {
    ingest_normal_map(dir / "empty.pfm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyMask);
  }
  img.channels = 1;
  img.data = {1};
  write_pfm(dir / "gray.pfm", img);
  try {
    ingest_normal_map(dir / "gray.pfm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FileFormatError);
  }
  EXPECT_THROW(ingest_normal_map(dir / "missing.pfm"), Error);
}

TEST(Scenes, FromFile) {
  const fs::path dir = temp_dir("fromfile");
  SceneSpec sphere;
  sphere.width = sphere.height = 20;
  write_normal_map(dir / "n.pfm", generate(sphere).normals);
  SceneSpec spec;
  spec.kind = SceneKind::FromFile;
  spec.path = dir / "n.pfm";
  const Scene s = generate(spec);
  EXPECT_EQ(s.normals.width(), 20);
  EXPECT_EQ(s.normals.valid_count(), generate(sphere).normals.valid_count());
}
