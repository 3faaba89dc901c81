#pragma once

// Single-threaded reference versions of the OpenMP kernels. They follow the
// same per-pixel contracts and exist for cross-checking and benchmarking.

#include <cstdint>
#include <vector>

#include "psoed/core_types.hpp"
#include "psoed/forward_model.hpp"
#include "psoed/oed.hpp"
#include "psoed/optimizer.hpp"
#include "psoed/ps_solver.hpp"

namespace psoed::serial {

IntensityStack render_stack(const NormalMap& nmap, const AlbedoMap& amap, const LightConfig& lights);
IntensityStack add_noise(const IntensityStack& stack, const NoiseSpec& noise);
SolvedMaps solve_map(const IntensityStack& stack, const LightConfig& lights);
/// Plain running sum in pixel order.
ShapePrior build_shape_prior(const NormalMap& nmap);
std::vector<RandomSample> baseline_random(int count, int m, const ShapePrior& prior, std::uint64_t seed);

}  // namespace psoed::serial
