#include "psoed/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include <cmath>

namespace psoed {

using nlohmann::json;

std::string_view to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::Sphere: return "sphere";
    case SceneKind::Paraboloid: return "paraboloid";
    case SceneKind::Plane: return "plane";
    case SceneKind::FromFile: return "from_file";
  }
  return "sphere";
}

std::string_view to_string(LightSpec::Kind kind) {
  switch (kind) {
    case LightSpec::Kind::Rows: return "rows";
    case LightSpec::Kind::OrthogonalTriad: return "orthogonal_triad";
    case LightSpec::Kind::HeuristicSpread: return "heuristic_spread";
    case LightSpec::Kind::Random: return "random";
  }
  return "random";
}

json rows_to_json(const RowsX3& rows) {
  json out = json::array();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out.push_back({rows(i, 0), rows(i, 1), rows(i, 2)});
  return out;
}

RowsX3 rows_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidArgument, "light rows must be an array of [x, y, z]");
  RowsX3 rows(static_cast<Eigen::Index>(j.size()), 3);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != 3) throw Error(ErrorCode::InvalidArgument, "light row must have 3 entries");
    for (std::size_t c = 0; c < 3; ++c) rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
  }
  return rows;
}

json to_json(const AngularErrorStats& s) {
  const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return json{{"mean_deg", num(s.mean_deg)},
              {"median_deg", num(s.median_deg)},
              {"p90_deg", num(s.p90_deg)},
              {"max_deg", num(s.max_deg)},
              {"count", s.count},
              {"histogram",
               {{"bin_width", s.histogram.spec.bin_width},
                {"range_max", s.histogram.spec.range_max},
                {"counts", s.histogram.counts}}}};
}

NoiseSpec RunConfig::noise_for(std::size_t m) const {
  if (sigmas.size() == 1) return NoiseSpec::uniform(m, sigmas.front(), noise_seed);
  if (sigmas.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(sigmas.size()) + " sigmas for " + std::to_string(m) + " lights");
  }
  return NoiseSpec{sigmas, noise_seed};
}

void RunConfig::validate() const {
  scene.validate();
  optimizer.validate();
  if (sigmas.empty()) throw Error(ErrorCode::InvalidArgument, "noise needs at least one sigma");
  NoiseSpec{sigmas, noise_seed}.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 1)");
  if (evaluation.trials < 1) throw Error(ErrorCode::InvalidArgument, "evaluation.trials must be >= 1");
  if (lights.m < 3) throw Error(ErrorCode::InvalidLightConfig, "need at least 3 lights");
}

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  try {
    if (j.contains("scene")) {
      const json& s = j.at("scene");
      const std::string kind = s.value("kind", "sphere");
      if (kind == "sphere") cfg.scene.kind = SceneKind::Sphere;
      else if (kind == "paraboloid") cfg.scene.kind = SceneKind::Paraboloid;
      else if (kind == "plane") cfg.scene.kind = SceneKind::Plane;
      else if (kind == "from_file") cfg.scene.kind = SceneKind::FromFile;
      else throw Error(ErrorCode::InvalidSpec, "unknown scene kind '" + kind + "'");
      cfg.scene.width = s.value("width", cfg.scene.width);
      cfg.scene.height = s.value("height", cfg.scene.height);
      cfg.scene.radius = s.value("radius", cfg.scene.radius);
      cfg.scene.curvature = s.value("curvature", cfg.scene.curvature);
      cfg.scene.p = s.value("p", cfg.scene.p);
      cfg.scene.q = s.value("q", cfg.scene.q);
      if (s.contains("path")) {
        std::filesystem::path p = s.at("path").get<std::string>();
        cfg.scene.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      }
      if (s.contains("albedo")) {
        const json& a = s.at("albedo");
        const std::string ak = a.value("kind", "constant");
        if (ak == "constant") {
          cfg.scene.albedo.kind = AlbedoSpec::Kind::Constant;
          cfg.scene.albedo.c1 = cfg.scene.albedo.c2 = a.value("value", 1.0);
        } else if (ak == "checkerboard") {
          cfg.scene.albedo.kind = AlbedoSpec::Kind::Checkerboard;
          cfg.scene.albedo.c1 = a.value("c1", 1.0);
          cfg.scene.albedo.c2 = a.value("c2", 0.5);
          cfg.scene.albedo.cell = a.value("cell", 8);
        } else {
          throw Error(ErrorCode::InvalidSpec, "unknown albedo kind '" + ak + "'");
        }
      }
    }
    if (j.contains("lights")) {
      const json& l = j.at("lights");
      if (l.contains("rows")) {
        cfg.lights.kind = LightSpec::Kind::Rows;
        cfg.lights.rows = rows_from_json(l.at("rows"));
        cfg.lights.m = static_cast<int>(cfg.lights.rows.rows());
      } else {
        const std::string b = l.value("baseline", "random");
        if (b == "random") cfg.lights.kind = LightSpec::Kind::Random;
        else if (b == "orthogonal_triad") cfg.lights.kind = LightSpec::Kind::OrthogonalTriad;
        else if (b == "heuristic_spread") cfg.lights.kind = LightSpec::Kind::HeuristicSpread;
        else throw Error(ErrorCode::InvalidArgument, "unknown light baseline '" + b + "'");
        cfg.lights.m = cfg.lights.kind == LightSpec::Kind::OrthogonalTriad ? 3 : l.value("m", 3);
        cfg.lights.seed = l.value("seed", cfg.lights.seed);
      }
    }
    if (j.contains("noise")) {
      const json& n = j.at("noise");
      if (n.contains("sigmas")) cfg.sigmas = n.at("sigmas").get<std::vector<double>>();
      else cfg.sigmas = {n.value("sigma", 0.0)};
      cfg.noise_seed = n.value("seed", cfg.noise_seed);
    }
    if (j.contains("optimizer")) {
      const json& o = j.at("optimizer");
      auto& oc = cfg.optimizer;
      oc.max_iters = o.value("max_iters", oc.max_iters);
      oc.step_size = o.value("step_size", oc.step_size);
      oc.armijo_shrink = o.value("armijo_shrink", oc.armijo_shrink);
      oc.armijo_c = o.value("armijo_c", oc.armijo_c);
      oc.grad_tol = o.value("grad_tol", oc.grad_tol);
      oc.restarts = o.value("restarts", oc.restarts);
      oc.seed = o.value("seed", oc.seed);
    }
    if (j.contains("evaluation")) {
      const json& e = j.at("evaluation");
      cfg.evaluation.trials = e.value("trials", cfg.evaluation.trials);
      cfg.evaluation.seed = e.value("seed", cfg.evaluation.seed);
      cfg.evaluation.histogram.bin_width = e.value("bin_width", cfg.evaluation.histogram.bin_width);
      cfg.evaluation.histogram.range_max = e.value("range_max", cfg.evaluation.histogram.range_max);
    }
    cfg.output = j.value("output", cfg.output.string());
    cfg.alpha = j.value("alpha", cfg.alpha);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad config: ") + e.what());
  }
  cfg.evaluation.sigma = cfg.sigmas.empty() ? 0.0 : *std::max_element(cfg.sigmas.begin(), cfg.sigmas.end());
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

json to_json(const RunConfig& cfg) {
  json scene{{"kind", to_string(cfg.scene.kind)},
             {"width", cfg.scene.width},
             {"height", cfg.scene.height},
             {"radius", cfg.scene.radius},
             {"curvature", cfg.scene.curvature},
             {"p", cfg.scene.p},
             {"q", cfg.scene.q}};
  if (cfg.scene.kind == SceneKind::FromFile) scene["path"] = cfg.scene.path.string();
  if (cfg.scene.albedo.kind == AlbedoSpec::Kind::Constant) {
    scene["albedo"] = {{"kind", "constant"}, {"value", cfg.scene.albedo.c1}};
  } else {
    scene["albedo"] = {{"kind", "checkerboard"}, {"c1", cfg.scene.albedo.c1}, {"c2", cfg.scene.albedo.c2}, {"cell", cfg.scene.albedo.cell}};
  }
  json lights;
  if (cfg.lights.kind == LightSpec::Kind::Rows) {
    lights = {{"rows", rows_to_json(cfg.lights.rows)}};
  } else {
    lights = {{"baseline", to_string(cfg.lights.kind)}, {"m", cfg.lights.m}, {"seed", cfg.lights.seed}};
  }
  const auto& o = cfg.optimizer;
  return json{{"scene", scene},
              {"lights", lights},
              {"noise", {{"sigmas", cfg.sigmas}, {"seed", cfg.noise_seed}}},
              {"optimizer",
               {{"max_iters", o.max_iters}, {"step_size", o.step_size}, {"armijo_shrink", o.armijo_shrink},
                {"armijo_c", o.armijo_c}, {"grad_tol", o.grad_tol}, {"restarts", o.restarts}, {"seed", o.seed}}},
              {"evaluation",
               {{"trials", cfg.evaluation.trials}, {"seed", cfg.evaluation.seed},
                {"bin_width", cfg.evaluation.histogram.bin_width}, {"range_max", cfg.evaluation.histogram.range_max}}},
              {"output", cfg.output.string()},
              {"alpha", cfg.alpha}};
}

LightConfig resolve_lights(const LightSpec& spec) {
  switch (spec.kind) {
    case LightSpec::Kind::Rows: return LightConfig::from_directions(spec.rows);
    case LightSpec::Kind::OrthogonalTriad: return baseline_orthogonal_triad();
    case LightSpec::Kind::HeuristicSpread: {
      RowsX3 rows = baseline_heuristic_spread(spec.m, spec.seed);
      return face_camera(LightConfig(std::move(rows)));
    }
    case LightSpec::Kind::Random: return face_camera(random_unit_config(spec.m, spec.seed));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown light spec");
}

}  // namespace psoed
