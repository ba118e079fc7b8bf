// Copyright 2026 The malab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace malab {

/// Uniform periodic grid over the flat torus C^n / Z^{2n}, n in {1, 2}.
///
/// Real axes are ordered (x1, y1, x2, y2) with z_j = x_j + i y_j. Points are
/// stored row-major with the last axis fastest.
class TorusGrid {
 public:
  static constexpr int kMaxRealDims = 4;
  using Point = std::array<double, kMaxRealDims>;
  using Index = std::array<int, kMaxRealDims>;

  TorusGrid(int n, int resolution);

  int n() const { return n_; }
  int resolution() const { return resolution_; }
  int real_dims() const { return 2 * n_; }
  double spacing() const { return 1.0 / resolution_; }
  std::size_t size() const { return size_; }

  Index unflatten(std::size_t flat) const;
  std::size_t flatten(const Index& idx) const;  // wraps every component
  Point coords(std::size_t flat) const;

  // Flat index of `flat` translated by `offset` grid steps (periodic).
  std::size_t shifted(std::size_t flat, const Index& offset) const;

  bool operator==(const TorusGrid&) const = default;

 private:
  int n_;
  int resolution_;
  std::size_t size_;
};

class GridFunction {
 public:
  explicit GridFunction(TorusGrid grid, double fill = 0.0);
  GridFunction(TorusGrid grid, std::vector<double> values);

  static GridFunction sample(const TorusGrid& grid,
                             const std::function<double(const TorusGrid::Point&)>& fn);

  const TorusGrid& grid() const { return grid_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  double max() const;
  double min() const;
  double mean() const;

  // Cached min eigenvalue of I + H(phi); reset by any mutation through
  // this class's helpers.
  const std::optional<double>& psh_defect() const { return psh_defect_; }
  void set_psh_defect(double value) { psh_defect_ = value; }

  GridFunction& operator+=(double c);
  GridFunction& operator*=(double c);

 private:
  TorusGrid grid_;
  std::vector<double> values_;
  std::optional<double> psh_defect_;
};

GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double c, const GridFunction& a);

double sup_distance(const GridFunction& a, const GridFunction& b);
// Grid quadrature of |a - b| over the unit-volume torus.
double l1_distance(const GridFunction& a, const GridFunction& b);

// Periodic multilinear interpolation at an arbitrary point (2n real coordinates).
double interpolate(const GridFunction& f, std::span<const double> point);

// Circular shift by whole grid steps: result(z) = f(z + offset * h).
GridFunction translate(const GridFunction& f, const TorusGrid::Index& offset);

// Binary format: 16-byte little-endian header (uint32 n, uint32 resolution,
// uint64 reserved = 0) followed by N^{2n} little-endian IEEE-754 doubles.
std::vector<std::uint8_t> encode_grid(const GridFunction& f);
GridFunction decode_grid(std::span<const std::uint8_t> bytes);
void write_grid(const GridFunction& f, const std::filesystem::path& path);
GridFunction read_grid(const std::filesystem::path& path);

}  // namespace malab
