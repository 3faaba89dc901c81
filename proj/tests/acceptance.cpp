// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//
//   psoed_acceptance [--workdir DIR] [--only N[,N...]]

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "psoed/chi_square.hpp"
#include "psoed/commands.hpp"
#include "psoed/evaluation.hpp"
#include "psoed/forward_model.hpp"
#include "psoed/oed.hpp"
#include "psoed/optimizer.hpp"
#include "psoed/pfm.hpp"
#include "psoed/ps_solver.hpp"
#include "psoed/scenes.hpp"

using namespace psoed;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;  // <= 0: no runtime bound
  std::function<Outcome()> run;
};

fs::path g_workdir = fs::temp_directory_path() / "psoed_acceptance";

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vec3 random_unit(std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  for (;;) {
    Vec3 v(nd(gen), nd(gen), nd(gen));
    if (v.norm() > 1e-6) return v.normalized();
  }
}

RowsX3 random_rows(std::mt19937_64& gen, int m, double min_ratio) {
  for (;;) {
    RowsX3 s(m, 3);
    for (int i = 0; i < m; ++i) s.row(i) = random_unit(gen).transpose();
    if (inverse_condition(s) > min_ratio) return s;
  }
}

ShapePrior sphere_prior() {
  SceneSpec spec;
  spec.width = spec.height = 64;
  return build_shape_prior(generate(spec).normals);
}

// 1. b_matrix lemma.
Outcome lemma_suite() {
  std::mt19937_64 gen(1);
  double sym = 0, idem = 0, tr = 0, eig = 0;
  int rank_bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const Matrix3 b = b_matrix(random_unit(gen));
    sym = std::max(sym, (b - b.transpose()).cwiseAbs().maxCoeff());
    idem = std::max(idem, (b * b - b).cwiseAbs().maxCoeff());
    tr = std::max(tr, std::abs(b.trace() - 2.0));
    Eigen::SelfAdjointEigenSolver<Matrix3> es(b);
    const Vec3 ev = es.eigenvalues();
    eig = std::max({eig, std::abs(ev(0)), std::abs(ev(1) - 1.0), std::abs(ev(2) - 1.0)});
    Eigen::JacobiSVD<Matrix3> svd(b);
    svd.setThreshold(1e-9);
    if (svd.rank() != 2) ++rank_bad;
  }
  Outcome o;
  o.pass = sym <= 1e-12 && idem <= 1e-12 && tr <= 1e-12 && eig <= 1e-9 && rank_bad == 0;
  o.detail = fmt("max |B-B^T|=%.1e |B^2-B|=%.1e |tr-2|=%.1e eig dev=%.1e rank!=2: %d", sym, idem, tr, eig, rank_bad);
  return o;
}

// 2. Gradient against central differences of the objective.
Outcome gradient_suite() {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> nd;
  const double h = 1e-6;
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const RowsX3 s = random_rows(gen, 3 + k % 4, 0.3);
    Matrix3 a;
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = nd(gen);
    const Matrix3 m = a * a.transpose() / 3.0 + 0.1 * Matrix3::Identity();
    const ShapePrior prior(m, 1);
    const RowsX3 g = phi_gradient(s, m);
    RowsX3 fd(s.rows(), 3);
    for (Eigen::Index i = 0; i < s.rows(); ++i)
      for (int c = 0; c < 3; ++c) {
        RowsX3 p = s, q = s;
        p(i, c) += h;
        q(i, c) -= h;
        fd(i, c) = (phi_shape_aware(LightConfig(p, NormMode::Free), prior) -
                    phi_shape_aware(LightConfig(q, NormMode::Free), prior)) / (2 * h);
      }
    // Entries far below the gradient's scale are compared against a 1e-3 floor.
    const double floor = 1e-3 * fd.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < s.rows(); ++i)
      for (int c = 0; c < 3; ++c)
        worst = std::max(worst, std::abs(g(i, c) - fd(i, c)) / std::max(std::abs(fd(i, c)), floor));
  }
  return {worst <= 1e-6, fmt("worst relative entry error %.2e over 100 pairs (bound 1e-6)", worst)};
}

// 3. Covariance via Monte Carlo.
Outcome covariance_mc() {
  std::mt19937_64 gen(3);
  const double sigma = 0.01;
  const int trials = 10000;
  Outcome o;
  std::ostringstream d;
  for (int c = 0; c < 3; ++c) {
    const LightConfig lc(random_rows(gen, 3, 0.1));
    const Vec3 n_true = 0.8 * random_unit(gen);
    const std::vector<double> sig(3, sigma);
    const PixelSolver solver(lc, sig);
    const Eigen::VectorXd clean = lc.rows() * n_true;
    std::normal_distribution<double> nd(0.0, sigma);
    std::vector<Vec3> samples(trials);
    Vec3 mean = Vec3::Zero();
    for (int t = 0; t < trials; ++t) {
      std::vector<double> I(3);
      for (int i = 0; i < 3; ++i) I[static_cast<std::size_t>(i)] = clean(i) + nd(gen);
      samples[static_cast<std::size_t>(t)] = solver.solve(I).n_tilde;
      mean += samples[static_cast<std::size_t>(t)];
    }
    mean /= trials;
    Matrix3 emp = Matrix3::Zero();
    for (const Vec3& s : samples) emp += (s - mean) * (s - mean).transpose();
    emp /= trials - 1;
    const Matrix3 model = covariance(lc, sig).matrix();
    const double rel = (emp - model).norm() / model.norm();
    o.pass = o.pass && rel <= 0.05;
    d << fmt("config %d: rel Frobenius %.4f; ", c, rel);
  }
  o.detail = d.str() + "bound 0.05";
  return o;
}

// 4. Confidence-region coverage.
Outcome coverage_mc() {
  std::mt19937_64 gen(4);
  const double sigma = 0.02;
  const LightConfig lc(random_rows(gen, 4, 0.2));
  const std::vector<double> sig(4, sigma);
  const PixelSolver solver(lc, sig);
  const EstimateCovariance cov = covariance(lc, sig);
  const Vec3 n_true = 0.7 * Vec3(0.2, -0.3, 0.9).normalized();
  const Eigen::VectorXd clean = lc.rows() * n_true;
  std::normal_distribution<double> nd(0.0, sigma);
  const int trials = 10000;
  int inside = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> I(4);
    for (int i = 0; i < 4; ++i) I[static_cast<std::size_t>(i)] = clean(i) + nd(gen);
    const ConfidenceRegion cr = confidence_region(solver.solve(I), cov, 0.05);
    inside += cr.contains(n_true);
  }
  const double rate = static_cast<double>(inside) / trials;
  return {std::abs(rate - 0.95) <= 0.02,
          fmt("coverage %.4f over %d trials (target 0.95 +- 0.02), kappa %.9f", rate, trials, chi_square_quantile(0.95, 3))};
}

// 5. Shape-agnostic optimum from seeded random starts.
Outcome shape_agnostic_optimum() {
  double worst_phi = 0, worst_gram = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto rep = optimize_lights(random_unit_config(3, seed), ShapePrior::identity(), OptimizerConfig{});
    worst_phi = std::max(worst_phi, std::abs(rep.phi_trajectory.back() - 3.0));
    worst_gram = std::max(worst_gram, (rep.final_s.gram() - Matrix3::Identity()).cwiseAbs().maxCoeff());
  }
  return {worst_phi <= 1e-6 && worst_gram <= 1e-4,
          fmt("10 starts: max |phi-3| %.2e (1e-6), max |S^T S - I| %.2e (1e-4)", worst_phi, worst_gram)};
}

// 6. Optimizer vs random search and the heuristic spread on the sphere prior.
Outcome search_protocol() {
  const ShapePrior prior = sphere_prior();
  Outcome o;
  std::ostringstream d;
  for (int m : {3, 4}) {
    const RowsX3 spread = baseline_heuristic_spread(m);
    const double spread_phi = phi_or_infinity(spread, prior);
    double worst_margin = -1e300;
    double opt_phi = 0, rand_min = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      OptimizerConfig cfg;
      cfg.restarts = 4;
      cfg.seed = seed;
      const auto rep = optimize_lights(random_unit_config(m, seed), prior, cfg);
      const auto samples = baseline_random(100000, m, prior, 1000 + seed);
      double mn = 1e300;
      for (const auto& s : samples) mn = std::min(mn, s.phi);
      opt_phi = rep.phi_trajectory.back();
      rand_min = mn;
      worst_margin = std::max(worst_margin, opt_phi - std::min(mn, spread_phi));
      o.pass = o.pass && opt_phi <= mn && opt_phi <= spread_phi;
    }
    d << fmt("m=%d: phi_opt %.6f, random min %.6f, spread %s; ", m, opt_phi, rand_min,
             std::isfinite(spread_phi) ? fmt("%.6f", spread_phi).c_str() : "singular (coplanar)");
  }
  o.detail = d.str() + "3 seeds each";
  return o;
}

// 7. Error ordering and Spearman correlation.
Outcome error_ordering_protocol() {
  SceneSpec spec;
  spec.width = spec.height = 64;
  const Scene scene = generate(spec);
  const ShapePrior prior = build_shape_prior(scene.normals);
  OptimizerConfig oc;
  oc.restarts = 8;
  oc.seed = 1;
  const auto rep = optimize_lights(random_unit_config(3, 1), prior, oc);
  std::vector<NamedConfig> cfgs{{"optimized", rep.final_s}, {"orthogonal_triad", baseline_orthogonal_triad()}};
  for (int k = 0; k < 50; ++k) cfgs.push_back({"random_" + std::to_string(k), face_camera(random_unit_config(3, 5000 + k))});
  EvaluationSetup setup;
  setup.sigma = 0.02;
  setup.trials = 100;
  setup.seed = 7;
  const auto ev = compare_configs(scene, cfgs, setup);
  std::vector<double> phi, err;
  for (std::size_t i = 2; i < ev.size(); ++i) {
    phi.push_back(ev[i].phi);
    err.push_back(ev[i].stats.mean_deg);
  }
  std::vector<double> sorted = err;
  std::sort(sorted.begin(), sorted.end());
  const double median = quantile_sorted(sorted, 0.5);
  const double rho = spearman(phi, err);
  const double e_opt = ev[0].stats.mean_deg, e_tri = ev[1].stats.mean_deg;
  return {e_opt <= e_tri && e_tri <= median && rho > 0.8,
          fmt("mean error: optimized %.4f (valid %.2f) <= triad %.4f (valid %.2f) <= random median %.4f; spearman %.4f (> 0.8)",
              e_opt, ev[0].valid_fraction, e_tri, ev[1].valid_fraction, median, rho)};
}

// 8. Noiseless render -> solve.
Outcome round_trip() {
  Outcome o;
  std::ostringstream d;
  RowsX3 four(4, 3);
  four << 0.3, 0.2, 0.93, -0.3, 0.25, 0.92, 0.05, -0.35, 0.93, 0.4, -0.1, 0.9;
  const std::vector<LightConfig> light_sets{baseline_orthogonal_triad(), LightConfig::from_directions(four)};
  for (SceneKind kind : {SceneKind::Plane, SceneKind::Sphere, SceneKind::Paraboloid}) {
    SceneSpec spec;
    spec.kind = kind;
    spec.width = spec.height = 96;
    spec.p = 0.3;
    spec.q = -0.2;
    spec.albedo = {AlbedoSpec::Kind::Checkerboard, 0.95, 0.35, 8};
    const Scene scene = generate(spec);
    double n_err = 0, rho_err = 0;
    std::size_t checked = 0, missing = 0;
    for (const LightConfig& lights : light_sets) {
      const IntensityStack st = render_stack(scene.normals, scene.albedo, lights);
      const SolvedMaps sol = solve_map(st, lights);
      const double tau = shadow_threshold(st.sigmas);
      for (std::size_t p = 0; p < scene.normals.size(); ++p) {
        if (!scene.normals.valid(p)) continue;
        bool lit = true;
        for (const auto& img : st.images) lit = lit && img[p] >= tau;
        if (!lit) continue;
        if (!sol.normals.valid(p)) {
          ++missing;
          continue;
        }
        n_err = std::max(n_err, (sol.normals.normal(p) - scene.normals.normal(p)).cwiseAbs().maxCoeff());
        rho_err = std::max(rho_err, std::abs(sol.albedo.values[p] - scene.albedo.values[p]));
        ++checked;
      }
    }
    o.pass = o.pass && n_err <= 1e-10 && rho_err <= 1e-10 && missing == 0 && checked > 0;
    d << fmt("%s: %zu px, max|dN| %.1e, max|drho| %.1e; ", kind == SceneKind::Plane ? "plane"
                                                          : kind == SceneKind::Sphere ? "sphere" : "paraboloid",
             checked, n_err, rho_err);
  }
  o.detail = d.str() + "bound 1e-10";
  return o;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[fs::relative(e.path(), dir).string()] = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return files;
}

// 9. PFM fidelity, schema validation, determinism.
Outcome io_fidelity() {
  Outcome o;
  std::ostringstream d;
  fs::create_directories(g_workdir);

  // Every finite float32 bit pattern, in chunks.
  const std::uint64_t chunk = 1u << 24;
  const fs::path pfm = g_workdir / "allfloats.pfm";
  std::uint64_t finite = 0, mismatched = 0;
  PfmImage img;
  img.channels = 1;
  img.width = 4096;
  for (std::uint64_t start = 0; start < (1ull << 32); start += chunk) {
    img.data.clear();
    for (std::uint64_t b = start; b < start + chunk; ++b) {
      const float f = std::bit_cast<float>(static_cast<std::uint32_t>(b));
      if (std::isfinite(f)) img.data.push_back(f);
    }
    finite += img.data.size();
    while (img.data.size() % 4096 != 0) img.data.push_back(0.0f);
    img.height = static_cast<int>(img.data.size() / 4096);
    if (img.height == 0) continue;
    write_pfm(pfm, img);
    const PfmImage back = read_pfm(pfm);
    for (std::size_t i = 0; i < img.data.size(); ++i)
      mismatched += std::bit_cast<std::uint32_t>(back.data[i]) != std::bit_cast<std::uint32_t>(img.data[i]);
  }
  fs::remove(pfm);
  o.pass = mismatched == 0 && finite == (1ull << 32) - 2 * ((1u << 23));
  d << fmt("PFM: %llu finite floats, %llu mismatches; ", static_cast<unsigned long long>(finite),
           static_cast<unsigned long long>(mismatched));

  // Pipeline twice with identical seeds; every output byte-identical.
  RunConfig cfg = parse_run_config(nlohmann::json::parse(R"({
    "scene": {"kind": "sphere", "width": 32, "height": 32},
    "lights": {"baseline": "random", "m": 4, "seed": 11},
    "noise": {"sigma": 0.02, "seed": 3},
    "optimizer": {"max_iters": 300, "restarts": 2, "seed": 5},
    "evaluation": {"trials": 4, "seed": 9}
  })"));
  cfg.output = g_workdir / "pipeline";
  fs::remove_all(cfg.output);
  cmd_pipeline(cfg);
  const auto first = snapshot(cfg.output);
  cmd_pipeline(cfg);
  const auto second = snapshot(cfg.output);
  const bool same = first == second && !first.empty();
  o.pass = o.pass && same;
  d << fmt("pipeline rerun: %zu files %s; ", first.size(), same ? "byte-identical" : "DIFFER");

  // Schema validation with the Python jsonschema package.
  const std::string cmd = "python3 \"" PSOED_VALIDATOR_PATH "\" \"" PSOED_SCHEMA_PATH "\" \"" +
                          (cfg.output / "report.json").string() + "\" > \"" + (g_workdir / "schema.log").string() +
                          "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  o.pass = o.pass && rc == 0;
  d << (rc == 0 ? "report.json validates against schema" : "schema validation FAILED (see schema.log)");
  o.detail = d.str();
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--workdir" && i + 1 < argc) {
      g_workdir = argv[++i];
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string t; std::getline(ss, t, ',');) only.insert(std::stoi(t));
    } else {
      std::fprintf(stderr, "usage: %s [--workdir DIR] [--only N[,N...]]\n", argv[0]);
      return 1;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "b_matrix projector lemma (1000 unit vectors)", 1.0, lemma_suite},
      {2, "phi_gradient vs central differences (100 pairs)", 5.0, gradient_suite},
      {3, "covariance vs Monte Carlo (3 configs, 1e4 solves)", 30.0, covariance_mc},
      {4, "confidence region coverage (alpha 0.05, 1e4 trials)", 30.0, coverage_mc},
      {5, "shape-agnostic optimum phi = 3, S^T S = I (10 starts)", 10.0, shape_agnostic_optimum},
      {6, "optimizer beats 1e5 random configs and heuristic spread", 120.0, search_protocol},
      {7, "error ordering optimized <= triad <= random median, spearman > 0.8", 300.0, error_ordering_protocol},
      {8, "noiseless render -> solve round trip to 1e-10", 10.0, round_trip},
      {9, "PFM bit exactness, report schema, byte-identical reruns", 0.0, io_fidelity},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s <= 0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("[%s] %d. %s | %s | %.2f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(), secs,
                c.limit_s > 0 ? fmt(" (limit %.0f s)", c.limit_s).c_str() : "");
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
