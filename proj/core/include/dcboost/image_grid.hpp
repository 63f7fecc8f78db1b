#pragma once

#include <Eigen/Core>

#include "dcboost/dc_model.hpp"

namespace dcboost {

using ImageData = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Row-major grayscale raster, nominally on the [0, 255] scale. At least 2x2
/// with finite entries.
class ImageGrid {
 public:
  ImageGrid(Eigen::Index rows, Eigen::Index cols, double fill = 0.0);
  explicit ImageGrid(ImageData data);

  /// Reshapes a flat row-major vector.
  static ImageGrid from_vector(const Vector& v, Eigen::Index rows, Eigen::Index cols);

  Eigen::Index rows() const { return data_.rows(); }
  Eigen::Index cols() const { return data_.cols(); }
  Eigen::Index size() const { return data_.size(); }

  double operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }
  double& operator()(Eigen::Index i, Eigen::Index j) { return data_(i, j); }

  const ImageData& data() const { return data_; }
  ImageData& data() { return data_; }

  Vector to_vector() const;

  bool same_shape(const ImageGrid& other) const {
    return rows() == other.rows() && cols() == other.cols();
  }

 private:
  ImageData data_;
};

/// Horizontal (px) and vertical (py) forward differences, same shape as the
/// image. Also used for the dual variable of the TV-prox solver.
struct GradientField {
  ImageData px;
  ImageData py;
};

}  // namespace dcboost
