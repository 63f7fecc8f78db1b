#include "dcboost/image_grid.hpp"

#include <stdexcept>
#include <string>

namespace dcboost {

namespace {

void check_grid(const ImageData& data) {
  if (data.rows() < 2 || data.cols() < 2) {
    throw std::invalid_argument("image must be at least 2x2, got " + std::to_string(data.rows()) +
                                "x" + std::to_string(data.cols()));
  }
  if (!data.allFinite()) throw std::invalid_argument("image contains non-finite values");
}

}  // namespace

ImageGrid::ImageGrid(Eigen::Index rows, Eigen::Index cols, double fill)
    : data_(ImageData::Constant(rows, cols, fill)) {
  check_grid(data_);
}

ImageGrid::ImageGrid(ImageData data) : data_(std::move(data)) { check_grid(data_); }

ImageGrid ImageGrid::from_vector(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw std::invalid_argument("vector size does not match shape");
  return ImageGrid(ImageData(Eigen::Map<const ImageData>(v.data(), rows, cols)));
}

Vector ImageGrid::to_vector() const { return Eigen::Map<const Vector>(data_.data(), data_.size()); }

}  // namespace dcboost
