#include "psoed/pfm.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace psoed {

namespace {

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xFF00u) | ((v << 8) & 0xFF0000u) | (v << 24);
}

std::string read_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) return tok;
    } else {
      tok.push_back(c);
    }
  }
  return tok;
}

}  // namespace

void write_pfm(const std::filesystem::path& path, const PfmImage& img) {
  if (img.channels != 1 && img.channels != 3) throw Error(ErrorCode::InvalidArgument, "PFM needs 1 or 3 channels");
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    throw Error(ErrorCode::DimensionMismatch, "PFM data size does not match its header");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << (img.channels == 3 ? "PF" : "Pf") << '\n' << img.width << ' ' << img.height << '\n' << "-1.0\n";
  const std::size_t row_len = static_cast<std::size_t>(img.width) * img.channels;
  std::vector<std::uint32_t> row(row_len);
  for (int y = img.height - 1; y >= 0; --y) {
    std::memcpy(row.data(), img.data.data() + static_cast<std::size_t>(y) * row_len, row_len * sizeof(float));
    if constexpr (std::endian::native == std::endian::big) {
      for (auto& v : row) v = byteswap32(v);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row_len * sizeof(float)));
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

PfmImage read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  PfmImage img;
  const std::string magic = read_token(in);
  if (magic == "PF") {
    img.channels = 3;
  } else if (magic == "Pf") {
    img.channels = 1;
  } else {
    throw Error(ErrorCode::FileFormatError, path.string() + ": not a PFM file");
  }
  try {
    img.width = std::stoi(read_token(in));
    img.height = std::stoi(read_token(in));
  } catch (const std::exception&) {
    throw Error(ErrorCode::FileFormatError, path.string() + ": bad PFM dimensions");
  }
  // read_token consumed exactly one whitespace byte after the scale.
  const std::string scale_tok = read_token(in);
  double scale = 0.0;
  try {
    scale = std::stod(scale_tok);
  } catch (const std::exception&) {
    throw Error(ErrorCode::FileFormatError, path.string() + ": bad PFM scale");
  }
  if (img.width <= 0 || img.height <= 0 || scale == 0.0) {
    throw Error(ErrorCode::FileFormatError, path.string() + ": bad PFM header");
  }
  const bool little = scale < 0.0;
  const bool swap = little != (std::endian::native == std::endian::little);
  const std::size_t row_len = static_cast<std::size_t>(img.width) * img.channels;
  img.data.resize(row_len * img.height);
  std::vector<std::uint32_t> row(row_len);
  for (int y = img.height - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row_len * sizeof(float)));
    if (!in) throw Error(ErrorCode::FileFormatError, path.string() + ": truncated PFM data");
    if (swap) {
      for (auto& v : row) v = byteswap32(v);
    }
    std::memcpy(img.data.data() + static_cast<std::size_t>(y) * row_len, row.data(), row_len * sizeof(float));
  }
  return img;
}

PfmImage to_pfm(const Grid<double>& g) {
  PfmImage img{g.width(), g.height(), 1, {}};
  img.data.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) img.data[i] = static_cast<float>(g[i]);
  return img;
}

namespace {

Eigen::Vector3f storable_unit(const Vec3& n) {
  // Prefer a float triple that reading back and renormalizing maps onto
  // itself, so export -> ingest -> export is byte-identical.
  const auto fixed = [](const Eigen::Vector3f& f) {
    const Vec3 v = f.cast<double>();
    return (v / v.norm()).cast<float>() == f;
  };
  const Eigen::Vector3f base = n.cast<float>();
  if (fixed(base)) return base;
  const auto step = [](float f, int d) {
    if (d == 0) return f;
    return std::nextafter(f, d > 0 ? std::numeric_limits<float>::infinity() : -std::numeric_limits<float>::infinity());
  };
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dz = -1; dz <= 1; ++dz) {
        const Eigen::Vector3f f(step(base.x(), dx), step(base.y(), dy), step(base.z(), dz));
        if (fixed(f)) return f;
      }
  return base;
}

}  // namespace

PfmImage to_pfm(const NormalMap& nmap) {
  PfmImage img{nmap.width(), nmap.height(), 3, {}};
  img.data.resize(nmap.size() * 3);
  for (std::size_t i = 0; i < nmap.size(); ++i) {
    if (!nmap.valid(i)) continue;
    const auto f = storable_unit(nmap.normal(i));
    for (int c = 0; c < 3; ++c) img.data[3 * i + static_cast<std::size_t>(c)] = f(c);
  }
  return img;
}

PfmImage mask_to_pfm(const Grid<std::uint8_t>& mask) {
  PfmImage img{mask.width(), mask.height(), 1, {}};
  img.data.resize(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) img.data[i] = mask[i] ? 1.0f : 0.0f;
  return img;
}

Grid<double> grid_from_pfm(const PfmImage& img) {
  if (img.channels != 1) throw Error(ErrorCode::FileFormatError, "expected a 1-channel PFM");
  Grid<double> g(img.width, img.height);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = img.data[i];
  return g;
}

std::filesystem::path mask_path_for(const std::filesystem::path& normal_map_path) {
  auto p = normal_map_path;
  return p.replace_filename(normal_map_path.stem().string() + ".mask.pfm");
}

void write_normal_map(const std::filesystem::path& path, const NormalMap& nmap) {
  write_pfm(path, to_pfm(nmap));
  write_pfm(mask_path_for(path), mask_to_pfm(nmap.mask()));
}

}  // namespace psoed
