#pragma once

#include <filesystem>
#include <vector>

#include "psoed/core_types.hpp"

namespace psoed {

/// Float image with 1 or 3 interleaved channels, row 0 at the top.
struct PfmImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> data;

  float& at(int x, int y, int c = 0) { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
  float at(int x, int y, int c = 0) const { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
};

/// Writes "PF"/"Pf", "<w> <h>", "-1.0" (little-endian), then rows bottom to top.
void write_pfm(const std::filesystem::path& path, const PfmImage& img);
/// Accepts either endianness.
PfmImage read_pfm(const std::filesystem::path& path);

PfmImage to_pfm(const Grid<double>& g);
PfmImage to_pfm(const NormalMap& nmap);
PfmImage mask_to_pfm(const Grid<std::uint8_t>& mask);
Grid<double> grid_from_pfm(const PfmImage& img);

/// "<dir>/<stem>.mask.pfm" next to "<dir>/<stem>.pfm".
std::filesystem::path mask_path_for(const std::filesystem::path& normal_map_path);

/// Writes the normal map and its mask side by side.
void write_normal_map(const std::filesystem::path& path, const NormalMap& nmap);

}  // namespace psoed
