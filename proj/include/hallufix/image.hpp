#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "hallufix/errors.hpp"

namespace hallufix {

using Vec3 = Eigen::Vector3d;

// Row-major W x H buffer; row 0 is the top image row.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, const T& fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

  void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const Image& o) const { return width_ == o.width_ && height_ == o.height_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ImageF = Image<double>;
using Image3 = Image<Vec3>;
using ImageI = Image<int>;

inline void require_same_shape(const ImageF& a, const ImageF& b, const char* what) {
  if (!a.same_shape(b)) throw ShapeMismatch(std::string(what) + ": image shapes differ");
}

inline void require_same_shape(const Image3& a, const Image3& b, const char* what) {
  if (!a.same_shape(b)) throw ShapeMismatch(std::string(what) + ": image shapes differ");
}

}  // namespace hallufix
