#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "psoed/evaluation.hpp"
#include "psoed/forward_model.hpp"
#include "psoed/optimizer.hpp"
#include "psoed/scenes.hpp"

namespace psoed {

/// Either explicit directions or a named generator.
struct LightSpec {
  enum class Kind { Rows, OrthogonalTriad, HeuristicSpread, Random } kind = Kind::Random;
  RowsX3 rows;
  int m = 3;
  std::uint64_t seed = 1;
};

struct RunConfig {
  SceneSpec scene;
  LightSpec lights;
  /// One value for every light, or one per light.
  std::vector<double> sigmas{0.0};
  std::uint64_t noise_seed = 0;
  OptimizerConfig optimizer;
  EvaluationSetup evaluation;
  std::filesystem::path output = "out";
  double alpha = 0.05;

  /// Sigmas expanded to m lights.
  NoiseSpec noise_for(std::size_t m) const;
  void validate() const;
};

/// Relative scene paths are resolved against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

/// Explicit rows are normalized; random configurations are flipped to face
/// the camera. HeuristicSpread throws SingularLightMatrix when the spread is
/// coplanar (m = 3).
LightConfig resolve_lights(const LightSpec& spec);

std::string_view to_string(SceneKind kind);
std::string_view to_string(LightSpec::Kind kind);

nlohmann::json rows_to_json(const RowsX3& rows);
RowsX3 rows_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AngularErrorStats& s);

}  // namespace psoed
