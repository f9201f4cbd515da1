#pragma once

#include <cstddef>
#include <vector>

namespace weylbc {

// Lower-triangular array over grid points (i, j) with 0 <= j <= i <= n.
// Storage is level-major (fixed j contiguous), which is the order the
// marching solvers write.
class TriangularGrid {
 public:
  TriangularGrid() = default;

  explicit TriangularGrid(std::size_t n) : n_(n), offsets_(n + 2, 0) {
    for (std::size_t j = 0; j <= n; ++j) {
      offsets_[j + 1] = offsets_[j] + (n - j + 1);
    }
    data_.assign(offsets_[n + 1], 0.0);
  }

  std::size_t n() const { return n_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[offsets_[j] + (i - j)];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[offsets_[j] + (i - j)];
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
  std::vector<std::size_t> offsets_;
};

}  // namespace weylbc
