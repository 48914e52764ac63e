#pragma once

#include <cmath>
#include <cstddef>
#include <new>
#include <numeric>
#include <string>
#include <vector>

#include "intexp/common.hpp"

namespace intexp::nn {

using Shape = std::vector<int>;

// Eigen picks its vectorized peeling from the runtime address, so buffers get
// a fixed alignment to keep results independent of where the heap puts them.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};
  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}
  T* allocate(size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, size_t) { ::operator delete(p, kAlign); }
  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

template <typename T>
using Buffer = std::vector<T, AlignedAllocator<T>>;

inline size_t numel(const Shape& s) {
  size_t n = 1;
  for (int d : s) n *= static_cast<size_t>(d);
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

// Dense row-major tensor. Layout conventions: images are NCHW, vectors NxF.
template <typename T>
struct Tensor {
  Shape shape;
  Buffer<T> data;

  Tensor() = default;
  explicit Tensor(Shape s, T fill = T(0)) : shape(std::move(s)), data(numel(shape), fill) {}
  Tensor(Shape s, Buffer<T> values) : shape(std::move(s)), data(std::move(values)) {
    if (data.size() != numel(shape)) throw DimensionError("tensor data does not match shape " + shape_str(shape));
  }
  Tensor(Shape s, const std::vector<T>& values) : shape(std::move(s)), data(values.begin(), values.end()) {
    if (data.size() != numel(shape)) throw DimensionError("tensor data does not match shape " + shape_str(shape));
  }

  size_t size() const { return data.size(); }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape.at(static_cast<size_t>(i)); }
  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }
  T& operator[](size_t i) { return data[i]; }
  const T& operator[](size_t i) const { return data[i]; }

  void zero() { std::fill(data.begin(), data.end(), T(0)); }

  Tensor reshaped(Shape s) const {
    if (numel(s) != size()) throw DimensionError("cannot reshape " + shape_str(shape) + " to " + shape_str(s));
    return Tensor(std::move(s), data);
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(shape);
    for (size_t i = 0; i < size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }

  bool all_finite() const {
    for (const T& v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool operator==(const Tensor&) const = default;
};

// Rows [begin, end) of the leading dimension.
template <typename T>
Tensor<T> slice_rows(const Tensor<T>& t, int begin, int end) {
  Shape s = t.shape;
  s[0] = end - begin;
  const size_t row = t.size() / static_cast<size_t>(t.dim(0));
  Tensor<T> out(s);
  std::copy(t.data.begin() + begin * row, t.data.begin() + end * row, out.data.begin());
  return out;
}

// Concatenate NCHW tensors along channels.
template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 4 || b.rank() != 4 || a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2) || a.dim(3) != b.dim(3))
    throw DimensionError("concat_channels: incompatible shapes " + shape_str(a.shape) + " and " + shape_str(b.shape));
  const int n = a.dim(0), ca = a.dim(1), cb = b.dim(1);
  const size_t hw = static_cast<size_t>(a.dim(2)) * a.dim(3);
  Tensor<T> out({n, ca + cb, a.dim(2), a.dim(3)});
  for (int i = 0; i < n; ++i) {
    std::copy_n(a.ptr() + i * ca * hw, ca * hw, out.ptr() + i * (ca + cb) * hw);
    std::copy_n(b.ptr() + i * cb * hw, cb * hw, out.ptr() + (i * (ca + cb) + ca) * hw);
  }
  return out;
}

// Inverse of concat_channels for gradients: splits off the first `ca` channels.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> split_channels(const Tensor<T>& g, int ca) {
  const int n = g.dim(0), c = g.dim(1), cb = c - ca;
  const size_t hw = static_cast<size_t>(g.dim(2)) * g.dim(3);
  Tensor<T> a({n, ca, g.dim(2), g.dim(3)}), b({n, cb, g.dim(2), g.dim(3)});
  for (int i = 0; i < n; ++i) {
    std::copy_n(g.ptr() + i * c * hw, ca * hw, a.ptr() + i * ca * hw);
    std::copy_n(g.ptr() + (i * c + ca) * hw, cb * hw, b.ptr() + i * cb * hw);
  }
  return {std::move(a), std::move(b)};
}

template <typename T>
void add_into(Tensor<T>& dst, const Tensor<T>& src) {
  if (dst.shape != src.shape) throw DimensionError("add_into: " + shape_str(dst.shape) + " vs " + shape_str(src.shape));
  for (size_t i = 0; i < dst.size(); ++i) dst.data[i] += src.data[i];
}

}  // namespace intexp::nn
