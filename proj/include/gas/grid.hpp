#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace gas {

/// Periodic grid of Lagrangian mass-coordinate labels m^1..m^n.
/// Index arithmetic wraps in every direction; storage is C order with the
/// last axis contiguous.
struct LabelGrid {
  int n = 2;                              // spatial dimension, 2 or 3
  std::array<int, 3> sizes{8, 8, 1};      // points per dimension (unused = 1)
  std::array<double, 3> dm{0.125, 0.125, 1.0};  // label spacing per dimension
  int fd_order = 4;                       // finite-difference order, 2 or 4

  LabelGrid() = default;
  LabelGrid(int n_, std::array<int, 3> sizes_, std::array<double, 3> dm_,
            int fd_order_ = 4)
      : n(n_), sizes(sizes_), dm(dm_), fd_order(fd_order_) {
    validate();
  }

  /// Uniform cube: N points and spacing h in each of the n directions.
  static LabelGrid cube(int n_, int npts, double h, int fd_order_ = 4) {
    std::array<int, 3> s{1, 1, 1};
    std::array<double, 3> d{1.0, 1.0, 1.0};
    for (int a = 0; a < n_; ++a) {
      s[a] = npts;
      d[a] = h;
    }
    return LabelGrid(n_, s, d, fd_order_);
  }

  /// Unit periodic box [0,1)^n with N points per direction.
  static LabelGrid unit_box(int n_, int npts, int fd_order_ = 4) {
    return cube(n_, npts, 1.0 / npts, fd_order_);
  }

  void validate() const {
    if (n != 2 && n != 3) throw std::invalid_argument("LabelGrid: n must be 2 or 3");
    if (fd_order != 2 && fd_order != 4)
      throw std::invalid_argument("LabelGrid: fd_order must be 2 or 4");
    for (int a = 0; a < n; ++a) {
      if (sizes[a] < 8)
        throw std::invalid_argument("LabelGrid: need at least 8 points per dimension");
      if (!(dm[a] > 0.0)) throw std::invalid_argument("LabelGrid: dm must be positive");
    }
    for (int a = n; a < 3; ++a)
      if (sizes[a] != 1)
        throw std::invalid_argument("LabelGrid: unused dimensions must have size 1");
  }

  std::size_t point_count() const {
    return std::size_t(sizes[0]) * std::size_t(sizes[1]) * std::size_t(sizes[2]);
  }

  std::size_t stride(int axis) const {
    switch (axis) {
      case 0: return std::size_t(sizes[1]) * std::size_t(sizes[2]);
      case 1: return std::size_t(sizes[2]);
      default: return 1;
    }
  }

  double length(int axis) const { return sizes[axis] * dm[axis]; }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < n; ++a) v *= dm[a];
    return v;
  }

  std::array<int, 3> coords(std::size_t idx) const {
    std::array<int, 3> c{};
    c[2] = int(idx % std::size_t(sizes[2]));
    idx /= std::size_t(sizes[2]);
    c[1] = int(idx % std::size_t(sizes[1]));
    c[0] = int(idx / std::size_t(sizes[1]));
    return c;
  }

  std::size_t index(const std::array<int, 3>& c) const {
    return (std::size_t(c[0]) * sizes[1] + c[1]) * sizes[2] + c[2];
  }

  /// Label coordinates of a grid point.
  std::array<double, 3> label(std::size_t idx) const {
    auto c = coords(idx);
    return {c[0] * dm[0], c[1] * dm[1], c[2] * dm[2]};
  }

  /// Flat index of the point shifted by `shift` along `axis`, wrapping
  /// periodically. |shift| must be < sizes[axis].
  std::size_t shifted(std::size_t idx, int axis, int shift) const {
    const std::size_t st = stride(axis);
    int c = int((idx / st) % std::size_t(sizes[axis]));
    int cc = c + shift;
    if (cc < 0) cc += sizes[axis];
    if (cc >= sizes[axis]) cc -= sizes[axis];
    return idx + std::size_t(cc - c) * st;
  }

  bool operator==(const LabelGrid& o) const {
    return n == o.n && sizes == o.sizes && dm == o.dm && fd_order == o.fd_order;
  }
  bool operator!=(const LabelGrid& o) const { return !(*this == o); }
};

}  // namespace gas
