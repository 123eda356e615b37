#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sharpbench {

// Dense row-major tensor of 64-bit floats. Only the handful of shapes the
// library actually uses (vectors and matrices) get convenience accessors.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::vector<std::size_t> shape_, std::vector<double> data_);

  static Tensor zeros(std::vector<std::size_t> shape_);

  std::size_t size() const { return data.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  double& at(std::size_t r, std::size_t c);
  double at(std::size_t r, std::size_t c) const;

  bool all_finite() const;
  // Throws std::invalid_argument naming `what` if any entry is NaN/Inf.
  void require_finite(const std::string& what) const;
};

}  // namespace sharpbench
