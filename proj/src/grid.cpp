// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#include "malab/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>

#include "malab/error.hpp"

namespace malab {

TorusGrid::TorusGrid(int n, int resolution) : n_(n), resolution_(resolution) {
  if (n != 1 && n != 2) fail(ErrorKind::Domain, "torus dimension must be 1 or 2, got " + std::to_string(n));
  if (resolution < 4 || !std::has_single_bit(static_cast<unsigned>(resolution)))
    fail(ErrorKind::Resolution, "resolution must be a power of two >= 4, got " + std::to_string(resolution));
  size_ = 1;
  for (int d = 0; d < real_dims(); ++d) size_ *= static_cast<std::size_t>(resolution);
}

TorusGrid::Index TorusGrid::unflatten(std::size_t flat) const {
  Index idx{};
  for (int d = real_dims() - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % resolution_);
    flat /= resolution_;
  }
  return idx;
}

std::size_t TorusGrid::flatten(const Index& idx) const {
  std::size_t flat = 0;
  for (int d = 0; d < real_dims(); ++d) {
    int i = idx[d] % resolution_;
    if (i < 0) i += resolution_;
    flat = flat * resolution_ + static_cast<std::size_t>(i);
  }
  return flat;
}

TorusGrid::Point TorusGrid::coords(std::size_t flat) const {
  const Index idx = unflatten(flat);
  Point p{};
  for (int d = 0; d < real_dims(); ++d) p[d] = idx[d] * spacing();
  return p;
}

std::size_t TorusGrid::shifted(std::size_t flat, const Index& offset) const {
  Index idx = unflatten(flat);
  for (int d = 0; d < real_dims(); ++d) idx[d] += offset[d];
  return flatten(idx);
}

GridFunction::GridFunction(TorusGrid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

GridFunction::GridFunction(TorusGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    fail(ErrorKind::Dimension, "grid function has " + std::to_string(values_.size()) +
                                   " values, grid expects " + std::to_string(grid_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorKind::Contract, "grid function values must be finite");
}

GridFunction GridFunction::sample(const TorusGrid& grid,
                                  const std::function<double(const TorusGrid::Point&)>& fn) {
  GridFunction out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out.values_[i] = fn(grid.coords(i));
  return out;
}

double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }
double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

GridFunction& GridFunction::operator+=(double c) {
  for (double& v : values_) v += c;
  psh_defect_.reset();
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (double& v : values_) v *= c;
  psh_defect_.reset();
  return *this;
}

namespace {
void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid())) fail(ErrorKind::Dimension, "grid functions live on different grids");
}
}  // namespace

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  GridFunction out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  GridFunction out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

GridFunction operator*(double c, const GridFunction& a) {
  GridFunction out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
  return out;
}

double sup_distance(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l1_distance(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

double interpolate(const GridFunction& f, std::span<const double> point) {
  const TorusGrid& grid = f.grid();
  const int dims = grid.real_dims();
  if (static_cast<int>(point.size()) != dims) fail(ErrorKind::Dimension, "interpolation point has wrong dimension");
  const int N = grid.resolution();
  TorusGrid::Index base{};
  std::array<double, TorusGrid::kMaxRealDims> frac{};
  for (int d = 0; d < dims; ++d) {
    const double u = point[d] * N;
    const double fl = std::floor(u);
    frac[d] = u - fl;
    base[d] = static_cast<int>(std::fmod(fl, static_cast<double>(N)));
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << dims); ++corner) {
    double w = 1.0;
    TorusGrid::Index idx = base;
    for (int d = 0; d < dims; ++d) {
      if (corner & (1 << d)) {
        w *= frac[d];
        idx[d] += 1;
      } else {
        w *= 1.0 - frac[d];
      }
    }
    if (w != 0.0) acc += w * f[grid.flatten(idx)];
  }
  return acc;
}

GridFunction translate(const GridFunction& f, const TorusGrid::Index& offset) {
  GridFunction out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[f.grid().shifted(i, offset)];
  return out;
}

namespace {

constexpr std::size_t kHeaderBytes = 16;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<std::uint8_t, sizeof(T)> raw{};
  std::memcpy(raw.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  out.insert(out.end(), raw.begin(), raw.end());
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::array<std::uint8_t, sizeof(T)> raw{};
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(offset), sizeof(T), raw.begin());
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  T value;
  std::memcpy(&value, raw.data(), sizeof(T));
  return value;
}

}  // namespace

std::vector<std::uint8_t> encode_grid(const GridFunction& f) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + f.size() * sizeof(double));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().n()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().resolution()));
  put_le<std::uint64_t>(out, 0);
  for (double v : f.values()) put_le<double>(out, v);
  return out;
}

GridFunction decode_grid(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) fail(ErrorKind::Io, "grid file shorter than its header");
  const auto n = get_le<std::uint32_t>(bytes, 0);
  const auto resolution = get_le<std::uint32_t>(bytes, 4);
  if (n < 1 || n > 2 || resolution > (1u << 16)) fail(ErrorKind::Io, "grid header is malformed");
  const TorusGrid grid(static_cast<int>(n), static_cast<int>(resolution));
  if (bytes.size() != kHeaderBytes + grid.size() * sizeof(double))
    fail(ErrorKind::Io, "grid payload size does not match header");
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = get_le<double>(bytes, kHeaderBytes + i * sizeof(double));
  return GridFunction(grid, std::move(values));
}

void write_grid(const GridFunction& f, const std::filesystem::path& path) {
  const auto bytes = encode_grid(f);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) fail(ErrorKind::Io, "short write to " + path.string());
}

GridFunction read_grid(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_grid(bytes);
}

}  // namespace malab
