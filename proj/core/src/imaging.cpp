#include "dcboost/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

#include "dcboost/counter_rng.hpp"

namespace dcboost {

ImageGrid add_cauchy_noise(const ImageGrid& u, const NoiseSpec& spec) {
  if (!(spec.gamma >= 0.0)) throw std::invalid_argument("noise gamma must be nonnegative");
  ImageGrid f = u;
  if (spec.gamma == 0.0) return f;
  double* px = f.data().data();
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const auto stream = static_cast<std::uint64_t>(i);
    for (std::uint64_t attempt = 0;; ++attempt) {
      const auto [v1, v2] = counter_normal_pair(spec.seed, stream, attempt);
      if (std::abs(v2) >= 1e-300) {
        px[i] += spec.gamma * v1 / v2;
        if (spec.clamp_to_range) px[i] = std::clamp(px[i], 0.0, 255.0);
        break;
      }
    }
  }
  return f;
}

double psnr(const ImageGrid& u_star, const ImageGrid& u) {
  if (!u_star.same_shape(u)) throw std::invalid_argument("psnr: image shapes differ");
  const double err = std::sqrt((u_star.data() - u.data()).square().sum());
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(255.0 * std::sqrt(static_cast<double>(u.size())) / err);
}

double re_err(const ImageGrid& u_star, const ImageGrid& u) {
  if (!u_star.same_shape(u)) throw std::invalid_argument("re_err: image shapes differ");
  const double ref = u.data().square().sum();
  if (ref == 0.0) throw std::invalid_argument("re_err: reference image is all zero");
  return (u_star.data() - u.data()).square().sum() / ref;
}

// ---------------------------------------------------------------------------
// PGM

namespace {

void skip_space_and_comments(std::istream& in) {
  for (;;) {
    const int ch = in.peek();
    if (ch == '#') {
      in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    } else if (ch != EOF && std::isspace(ch)) {
      in.get();
    } else {
      return;
    }
  }
}

long read_header_int(std::istream& in, const char* field) {
  skip_space_and_comments(in);
  long value = -1;
  if (!(in >> value) || value <= 0) {
    throw PgmError(std::string("malformed PGM header: bad ") + field);
  }
  return value;
}

}  // namespace

ImageGrid read_pgm(std::istream& in) {
  char magic[2] = {0, 0};
  if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '5') {
    throw PgmError("not a binary PGM (expected magic P5)");
  }
  const long width = read_header_int(in, "width");
  const long height = read_header_int(in, "height");
  const long maxval = read_header_int(in, "maxval");
  if (maxval != 255) {
    throw PgmError("unsupported PGM maxval " + std::to_string(maxval) + " (only 255)");
  }
  // exactly one whitespace byte separates the header from the raster
  if (!std::isspace(in.get())) throw PgmError("malformed PGM header: missing separator");

  std::vector<unsigned char> raster(static_cast<std::size_t>(width * height));
  if (!in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()))) {
    throw PgmError("truncated PGM payload: expected " + std::to_string(raster.size()) +
                   " bytes, got " + std::to_string(in.gcount()));
  }
  if (width < 2 || height < 2) throw PgmError("PGM image smaller than 2x2");
  ImageData data(height, width);
  std::transform(raster.begin(), raster.end(), data.data(),
                 [](unsigned char b) { return static_cast<double>(b); });
  return ImageGrid(std::move(data));
}

ImageGrid read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PgmError("cannot open " + path.string());
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const ImageGrid& image) {
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  std::vector<unsigned char> raster(static_cast<std::size_t>(image.size()));
  const double* px = image.data().data();
  for (std::size_t i = 0; i < raster.size(); ++i) {
    // nearbyint honours the default round-to-nearest-even mode
    raster[i] = static_cast<unsigned char>(std::nearbyint(std::clamp(px[i], 0.0, 255.0)));
  }
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
}

void write_pgm(const std::filesystem::path& path, const ImageGrid& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PgmError("cannot write " + path.string());
  write_pgm(out, image);
  if (!out) throw PgmError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------

ImageGrid make_squares_image(Eigen::Index rows, Eigen::Index cols) {
  if (rows < 16 || cols < 16) throw std::invalid_argument("squares image needs at least 16x16");
  ImageGrid img(rows, cols, 32.0);
  auto fill = [&](double r0, double r1, double c0, double c1, double value) {
    const auto i0 = static_cast<Eigen::Index>(r0 * rows), i1 = static_cast<Eigen::Index>(r1 * rows);
    const auto j0 = static_cast<Eigen::Index>(c0 * cols), j1 = static_cast<Eigen::Index>(c1 * cols);
    img.data().block(i0, j0, i1 - i0, j1 - j0) = value;
  };
  fill(0.125, 0.375, 0.125, 0.625, 96.0);
  fill(0.5, 0.875, 0.125, 0.375, 160.0);
  fill(0.5, 0.875, 0.5, 0.875, 224.0);
  return img;
}

}  // namespace dcboost
