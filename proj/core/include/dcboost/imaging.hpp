#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dcboost/image_grid.hpp"

namespace dcboost {

struct NoiseSpec {
  double gamma = 3.0;
  std::uint64_t seed = 0;
  // Clip the observation to the 8-bit range [0, 255] after adding noise.
  bool clamp_to_range = true;
};

/// f = u + gamma * v1 / v2 with v1, v2 independent standard normals keyed by
/// (seed, pixel index). Draws with |v2| < 1e-300 are redrawn. gamma = 0
/// returns u unchanged.
ImageGrid add_cauchy_noise(const ImageGrid& u, const NoiseSpec& spec);

/// 20 log10(255 sqrt(m1 m2) / |u_star - u|_F). Returns +inf for identical
/// images.
double psnr(const ImageGrid& u_star, const ImageGrid& u);

/// |u_star - u|^2 / |u|^2. u must not be all zero.
double re_err(const ImageGrid& u_star, const ImageGrid& u);

class PgmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary (P5) 8-bit PGM. Header comments are accepted.
ImageGrid read_pgm(std::istream& in);
ImageGrid read_pgm(const std::filesystem::path& path);

/// Clamps to [0, 255] and rounds half to even.
void write_pgm(std::ostream& out, const ImageGrid& image);
void write_pgm(const std::filesystem::path& path, const ImageGrid& image);

/// Background 32 with three axis-aligned rectangles at 96, 160 and 224,
/// placed at fixed fractions of the frame. Requires rows, cols >= 16.
ImageGrid make_squares_image(Eigen::Index rows, Eigen::Index cols);

}  // namespace dcboost
