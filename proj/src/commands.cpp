#include "psoed/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"

#include "psoed/chi_square.hpp"
#include "psoed/forward_model.hpp"
#include "psoed/oed.hpp"
#include "psoed/pfm.hpp"
#include "psoed/ps_solver.hpp"

namespace psoed {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularLightMatrix:
    case ErrorCode::RankCollapse:
    case ErrorCode::DegenerateVector:
    case ErrorCode::EmptyMask:
      return kExitNumerical;
    case ErrorCode::IoError:
    case ErrorCode::FileFormatError:
      return kExitIo;
    default:
      return kExitUsage;
  }
}

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json matrix_json(const Matrix3& m) {
  json out = json::array();
  for (int r = 0; r < 3; ++r) out.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return out;
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream os;
  os << "lower_deg,upper_deg,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const bool overflow = b + 1 == h.counts.size();
    os << fmt_double(overflow ? h.spec.range_max : h.lower_edge(b)) << ','
       << (overflow ? std::string("inf") : fmt_double(h.lower_edge(b + 1))) << ',' << h.counts[b] << '\n';
  }
  return os.str();
}

json report_json(const OptimizationReport& rep) {
  return json{{"initial_lights", rows_to_json(rep.initial_s.rows())},
              {"final_lights", rows_to_json(rep.final_s.rows())},
              {"phi_trajectory", rep.phi_trajectory},
              {"final_phi", rep.phi_trajectory.back()},
              {"iterations_used", rep.iterations_used},
              {"converged", rep.converged},
              {"gradient_norm_final", rep.gradient_norm_final},
              {"best_restart", rep.best_restart},
              {"restart_phis", [&] {
                 json a = json::array();
                 for (double v : rep.restart_phis) a.push_back(num_or_null(v));
                 return a;
               }()}};
}

json confidence_json(const LightConfig& lights, double sigma, double alpha) {
  if (!(sigma > 0.0)) return nullptr;
  const std::vector<double> sig(static_cast<std::size_t>(lights.m()), sigma);
  const EstimateCovariance cov = covariance(lights, sig);
  PixelEstimate centre;
  centre.n_tilde = Vec3::UnitZ();
  const ConfidenceRegion cr = confidence_region(centre, cov, alpha);
  return json{{"a_criterion", a_criterion(cov)},
              {"covariance", matrix_json(cov.matrix())},
              {"semiaxes", {cr.semiaxes[0], cr.semiaxes[1], cr.semiaxes[2]}}};
}

double max_sigma(const std::vector<double>& s) {
  double v = 0.0;
  for (double x : s) v = std::max(v, x);
  return v;
}

}  // namespace

json cmd_render(const RunConfig& cfg) {
  const Scene scene = generate(cfg.scene);
  const LightConfig lights = resolve_lights(cfg.lights);
  const NoiseSpec noise = cfg.noise_for(static_cast<std::size_t>(lights.m()));
  const IntensityStack stack = add_noise(render_stack(scene.normals, scene.albedo, lights), noise);

  ensure_dir(cfg.output);
  json images = json::array();
  for (std::size_t i = 0; i < stack.m(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "image_%03zu.pfm", i);
    write_pfm(cfg.output / name, to_pfm(stack.images[i]));
    images.push_back(name);
  }
  write_normal_map(cfg.output / "gt_normals.pfm", scene.normals);
  write_pfm(cfg.output / "gt_albedo.pfm", to_pfm(scene.albedo.values));
  json sidecar{{"lights", rows_to_json(lights.rows())},
               {"sigmas", noise.sigmas},
               {"seed", noise.seed},
               {"width", stack.width()},
               {"height", stack.height()},
               {"images", images}};
  write_json(cfg.output / "stack.json", sidecar);
  return sidecar;
}

json cmd_solve(const fs::path& lights_file, const std::vector<fs::path>& images, const fs::path& out_dir) {
  std::ifstream in(lights_file);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + lights_file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, lights_file.string() + ": " + e.what());
  }
  if (!j.contains("lights")) throw Error(ErrorCode::InvalidArgument, lights_file.string() + " has no \"lights\" entry");
  const LightConfig lights = LightConfig::from_directions(rows_from_json(j.at("lights")));
  const auto m = static_cast<std::size_t>(lights.m());

  std::vector<fs::path> paths = images;
  if (paths.empty()) {
    if (!j.contains("images")) throw Error(ErrorCode::InvalidArgument, "no images given and none listed in " + lights_file.string());
    for (const auto& name : j.at("images")) paths.push_back(lights_file.parent_path() / name.get<std::string>());
  }
  if (paths.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(paths.size()) + " images for " + std::to_string(m) + " lights");
  }
  IntensityStack stack;
  for (const auto& p : paths) stack.images.push_back(grid_from_pfm(read_pfm(p)));
  for (const auto& img : stack.images) {
    if (!img.same_shape(stack.images.front())) throw Error(ErrorCode::DimensionMismatch, "input images differ in size");
  }
  stack.sigmas = j.contains("sigmas") ? j.at("sigmas").get<std::vector<double>>() : std::vector<double>(m, 0.0);
  if (stack.sigmas.size() == 1) stack.sigmas.assign(m, stack.sigmas.front());

  const SolvedMaps sol = solve_map(stack, lights);
  ensure_dir(out_dir);
  write_normal_map(out_dir / "normals.pfm", sol.normals);
  write_pfm(out_dir / "albedo.pfm", to_pfm(sol.albedo.values));
  json summary{{"width", stack.width()}, {"height", stack.height()}, {"valid_pixels", sol.normals.valid_count()},
               {"normals", "normals.pfm"}, {"mask", "normals.mask.pfm"}, {"albedo", "albedo.pfm"}};
  write_json(out_dir / "solve.json", summary);
  return summary;
}

json cmd_optimize(const RunConfig& cfg, bool shape_agnostic, const fs::path& prior_map) {
  const LightConfig initial = resolve_lights(cfg.lights);
  ShapePrior prior = ShapePrior::identity();
  std::string prior_source = "identity";
  if (!shape_agnostic) {
    if (!prior_map.empty()) {
      prior = build_shape_prior(ingest_normal_map(prior_map));
      prior_source = prior_map.string();
    } else {
      prior = build_shape_prior(generate(cfg.scene).normals);
      prior_source = "scene";
    }
  }
  const OptimizationReport rep = optimize_lights(initial, prior, cfg.optimizer);
  ensure_dir(cfg.output);
  json lights{{"lights", rows_to_json(rep.final_s.rows())}, {"phi", rep.phi_trajectory.back()}};
  write_json(cfg.output / "optimized_lights.json", lights);
  json report = report_json(rep);
  report["shape_prior"] = {{"source", prior_source}, {"m_agg", matrix_json(prior.m_agg())}, {"pixel_count", prior.pixel_count()}};
  write_json(cfg.output / "optimization_report.json", report);
  return report;
}

json cmd_baseline(const RunConfig& cfg, int count, bool shape_agnostic) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "--count must be >= 1");
  const ShapePrior prior = shape_agnostic ? ShapePrior::identity() : build_shape_prior(generate(cfg.scene).normals);
  const std::uint64_t seed = cfg.lights.seed;
  const auto samples = baseline_random(count, cfg.lights.m, prior, seed);
  std::ostringstream os;
  os << "index,phi\n";
  double min_phi = std::numeric_limits<double>::infinity();
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    os << i << ',' << fmt_double(samples[i].phi) << '\n';
    if (samples[i].phi < min_phi) {
      min_phi = samples[i].phi;
      argmin = i;
    }
  }
  ensure_dir(cfg.output);
  write_text(cfg.output / "baseline_phi.csv", os.str());
  return json{{"count", count}, {"m", cfg.lights.m}, {"seed", seed}, {"min_phi", min_phi}, {"argmin", argmin},
              {"min_lights", rows_to_json(samples[argmin].lights.rows())}, {"csv", "baseline_phi.csv"}};
}

json cmd_evaluate(const fs::path& estimate, const fs::path& truth, const fs::path& out_dir) {
  const NormalMap est = ingest_normal_map(estimate);
  const NormalMap gt = ingest_normal_map(truth);
  const AngularErrorStats s = compare_maps(est, gt);
  ensure_dir(out_dir);
  write_text(out_dir / "histogram.csv", histogram_csv(s.histogram));
  write_pfm(out_dir / "error_map.pfm", to_pfm(s.error_map));
  json j = to_json(s);
  write_json(out_dir / "evaluation.json", j);
  return j;
}

json cmd_pipeline(const RunConfig& cfg) {
  const Scene scene = generate(cfg.scene);
  const LightConfig initial = resolve_lights(cfg.lights);
  const auto m = static_cast<std::size_t>(initial.m());
  const NoiseSpec noise = cfg.noise_for(m);
  const double sigma = max_sigma(noise.sigmas);

  ensure_dir(cfg.output);
  write_normal_map(cfg.output / "gt_normals.pfm", scene.normals);

  // Classic photometric stereo with the initial lights.
  const SolvedMaps classic = solve_map(add_noise(render_stack(scene.normals, scene.albedo, initial), noise), initial);
  write_normal_map(cfg.output / "normals_initial.pfm", classic.normals);
  const AngularErrorStats classic_stats = compare_maps(classic.normals, scene.normals, cfg.evaluation.histogram);

  // The shape prior comes from the estimate, not the ground truth.
  const ShapePrior prior = build_shape_prior(classic.normals);
  const OptimizationReport rep = optimize_lights(initial, prior, cfg.optimizer);
  const LightConfig& optimized = rep.final_s;

  const SolvedMaps oed = solve_map(add_noise(render_stack(scene.normals, scene.albedo, optimized), noise), optimized);
  write_normal_map(cfg.output / "normals_optimized.pfm", oed.normals);
  const AngularErrorStats oed_stats = compare_maps(oed.normals, scene.normals, cfg.evaluation.histogram);

  const RowsX3 spread = baseline_heuristic_spread(static_cast<int>(m), cfg.lights.seed);
  json heuristic{{"lights", rows_to_json(spread)}, {"min_pairwise_angle_deg", min_pairwise_angle_deg(spread)}};
  std::vector<NamedConfig> configs{{"initial", initial}};
  const double spread_phi = phi_or_infinity(spread, prior);
  if (std::isfinite(spread_phi)) {
    heuristic["status"] = "ok";
    heuristic["phi"] = spread_phi;
    configs.push_back({"heuristic_spread", face_camera(LightConfig(spread))});
  } else {
    heuristic["status"] = "singular";
    heuristic["phi"] = nullptr;
  }
  configs.push_back({"orthogonal_triad", baseline_orthogonal_triad()});
  configs.push_back({"optimized", optimized});

  EvaluationSetup setup = cfg.evaluation;
  setup.sigma = sigma;
  const auto evals = compare_configs(scene, configs, setup);
  json comparison = json::array();
  for (const auto& ev : evals) {
    write_text(cfg.output / ("histogram_" + ev.name + ".csv"), histogram_csv(ev.stats.histogram));
    write_pfm(cfg.output / ("error_" + ev.name + ".pfm"), to_pfm(ev.stats.error_map));
    comparison.push_back(json{{"name", ev.name},
                              {"lights", rows_to_json(ev.lights.rows())},
                              {"phi", ev.phi},
                              {"stats", to_json(ev.stats)},
                              {"n_tilde_mse", ev.n_tilde_mse},
                              {"predicted_mse", ev.predicted_mse},
                              {"valid_fraction", ev.valid_fraction}});
  }

  std::ostringstream traj;
  traj << "iteration,phi\n";
  for (std::size_t i = 0; i < rep.phi_trajectory.size(); ++i) traj << i << ',' << fmt_double(rep.phi_trajectory[i]) << '\n';
  write_text(cfg.output / "phi_trajectory.csv", traj.str());

  json report{{"schema_version", 1},
              {"command", "pipeline"},
              {"config", to_json(cfg)},
              {"shape_prior", {{"source", "classic_ps_estimate"}, {"m_agg", matrix_json(prior.m_agg())}, {"pixel_count", prior.pixel_count()}}},
              {"classic_ps", {{"lights", rows_to_json(initial.rows())}, {"phi", phi_shape_aware(initial, prior)}, {"stats", to_json(classic_stats)}}},
              {"optimization", report_json(rep)},
              {"optimized_ps", {{"lights", rows_to_json(optimized.rows())}, {"phi", phi_shape_aware(optimized, prior)}, {"stats", to_json(oed_stats)}}},
              {"confidence", {{"alpha", cfg.alpha},
                              {"kappa", chi_square_quantile(1.0 - cfg.alpha, 3.0)},
                              {"initial", confidence_json(initial, sigma, cfg.alpha)},
                              {"optimized", confidence_json(optimized, sigma, cfg.alpha)}}},
              {"heuristic", heuristic},
              {"comparison", comparison},
              {"files", {{"ground_truth", "gt_normals.pfm"}, {"normals_initial", "normals_initial.pfm"},
                         {"normals_optimized", "normals_optimized.pfm"}, {"phi_trajectory", "phi_trajectory.csv"}}}};
  write_json(cfg.output / "report.json", report);
  return report;
}

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma;
  std::string out;
};

RunConfig load_with_overrides(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? parse_run_config(json::object()) : load_run_config(o.config);
  if (o.seed) {
    cfg.noise_seed = *o.seed;
    cfg.optimizer.seed = *o.seed;
    cfg.evaluation.seed = *o.seed;
    cfg.lights.seed = *o.seed;
  }
  if (o.sigma) {
    cfg.sigmas = {*o.sigma};
    cfg.evaluation.sigma = *o.sigma;
  }
  if (!o.out.empty()) cfg.output = o.out;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON run configuration");
  sub->add_option("--seed", o.seed, "Override every seed in the configuration");
  sub->add_option("--sigma", o.sigma, "Override the noise level of every image");
  sub->add_option("--out", o.out, "Output directory");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photometric stereo with optimally designed light configurations"};
  app.require_subcommand(1);

  Overrides render_o, optimize_o, pipeline_o, baseline_o;
  auto* render = app.add_subcommand("render", "Render a scene into one PFM per light");
  add_common(render, render_o);

  std::string lights_file;
  std::vector<std::string> images;
  std::string solve_out = "out";
  auto* solve = app.add_subcommand("solve", "Recover normals and albedo from rendered images");
  solve->add_option("--lights", lights_file, "JSON with \"lights\" rows (a render sidecar works)")->required();
  solve->add_option("--images", images, "Input PFM images, one per light");
  solve->add_option("--out", solve_out, "Output directory");

  bool shape_agnostic = false;
  std::string prior_map;
  auto* optimize = app.add_subcommand("optimize", "Optimize light directions for a shape prior");
  add_common(optimize, optimize_o);
  optimize->add_flag("--shape-agnostic", shape_agnostic, "Use M = I (trace of the inverse Gram matrix)");
  optimize->add_option("--prior", prior_map, "Normal map PFM to build the shape prior from");

  auto* pipeline = app.add_subcommand("pipeline", "Render, solve, optimize, re-solve and compare");
  add_common(pipeline, pipeline_o);

  int count = -1;
  bool baseline_agnostic = false;
  auto* baseline = app.add_subcommand("baseline", "Score random light configurations");
  add_common(baseline, baseline_o);
  baseline->add_option("--count", count, "Number of random configurations")->required();
  baseline->add_flag("--shape-agnostic", baseline_agnostic, "Use M = I");

  std::string estimate, truth, eval_out = "out";
  auto* evaluate = app.add_subcommand("evaluate", "Angular error between two normal maps");
  evaluate->add_option("--estimate", estimate, "Estimated normal map PFM")->required();
  evaluate->add_option("--truth", truth, "Ground-truth normal map PFM")->required();
  evaluate->add_option("--out", eval_out, "Output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    json result;
    if (render->parsed()) {
      result = cmd_render(load_with_overrides(render_o));
    } else if (solve->parsed()) {
      std::vector<fs::path> paths(images.begin(), images.end());
      result = cmd_solve(lights_file, paths, solve_out);
    } else if (optimize->parsed()) {
      result = cmd_optimize(load_with_overrides(optimize_o), shape_agnostic, prior_map);
      result.erase("phi_trajectory");
    } else if (pipeline->parsed()) {
      const json rep = cmd_pipeline(load_with_overrides(pipeline_o));
      result = json{{"comparison", json::array()}};
      for (const auto& c : rep.at("comparison")) {
        result["comparison"].push_back({{"name", c.at("name")}, {"phi", c.at("phi")}, {"mean_deg", c.at("stats").at("mean_deg")}});
      }
    } else if (baseline->parsed()) {
      if (count < 1) throw Error(ErrorCode::InvalidArgument, "--count must be >= 1");
      result = cmd_baseline(load_with_overrides(baseline_o), count, baseline_agnostic);
      result.erase("min_lights");
    } else if (evaluate->parsed()) {
      result = cmd_evaluate(estimate, truth, eval_out);
      result.erase("histogram");
    }
    out << result.dump(2) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace psoed
