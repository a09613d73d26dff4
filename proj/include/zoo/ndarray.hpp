#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "zoo/errors.hpp"

namespace zoo {

// Dense row-major n-dimensional array of 64-bit floats.
struct Ndarray {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Ndarray() = default;
  Ndarray(std::vector<std::size_t> shape_, std::vector<double> data_)
      : shape(std::move(shape_)), data(std::move(data_)) {
    validate();
  }

  static Ndarray zeros(std::vector<std::size_t> shape) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return Ndarray(std::move(shape), std::vector<double>(n, 0.0));
  }

  static Ndarray filled(std::vector<std::size_t> shape, double value) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return Ndarray(std::move(shape), std::vector<double>(n, value));
  }

  // 1-d array [0, 1, ..., n-1].
  static Ndarray arange(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
    return Ndarray({n}, std::move(v));
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }

  double& at2(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
  double at2(std::size_t i, std::size_t j) const {
    return data[i * shape[1] + j];
  }

  void validate() const {
    if (shape.empty()) throw ShapeMismatchError("ndarray shape is empty");
    std::size_t n = 1;
    for (auto d : shape) {
      if (d == 0) throw ShapeMismatchError("ndarray dimension is zero");
      n *= d;
    }
    if (n != data.size())
      throw ShapeMismatchError("shape product " + std::to_string(n) +
                               " != buffer length " +
                               std::to_string(data.size()));
  }

  friend bool operator==(const Ndarray& a, const Ndarray& b) {
    return a.shape == b.shape && a.data == b.data;
  }
};

// Elementwise map, preserving shape.
template <class F>
Ndarray nd_map(F f, const Ndarray& a) {
  Ndarray out = a;
  for (auto& x : out.data) x = f(x);
  return out;
}

// Left fold over the flat row-major buffer, starting from init.
template <class F>
double nd_fold(F f, double init, const Ndarray& a) {
  double acc = init;
  for (double x : a.data) acc = f(acc, x);
  return acc;
}

// Valid cross-correlation of a 2-d input with a 2-d kernel:
// out[i,j] = sum_{u,v} input[i+u, j+v] * kernel[u,v].
inline Ndarray conv2d_valid(const Ndarray& input, const Ndarray& kernel) {
  if (input.rank() != 2 || kernel.rank() != 2)
    throw ShapeMismatchError("conv2d_valid expects 2-d input and kernel");
  std::size_t h = input.shape[0], w = input.shape[1];
  std::size_t kh = kernel.shape[0], kw = kernel.shape[1];
  if (kh > h || kw > w)
    throw ShapeMismatchError("kernel " + std::to_string(kh) + "x" +
                             std::to_string(kw) + " larger than input " +
                             std::to_string(h) + "x" + std::to_string(w));
  Ndarray out = Ndarray::zeros({h - kh + 1, w - kw + 1});
  for (std::size_t i = 0; i + kh <= h; ++i)
    for (std::size_t j = 0; j + kw <= w; ++j) {
      double acc = 0.0;
      for (std::size_t u = 0; u < kh; ++u)
        for (std::size_t v = 0; v < kw; ++v)
          acc += input.at2(i + u, j + v) * kernel.at2(u, v);
      out.at2(i, j) = acc;
    }
  return out;
}

}  // namespace zoo
