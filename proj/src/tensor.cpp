#include "sharpbench/tensor.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sharpbench {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape_, std::vector<double> data_)
    : shape(std::move(shape_)), data(std::move(data_)) {
  if (shape_product(shape) != data.size()) {
    throw std::invalid_argument("Tensor: shape product " +
                                std::to_string(shape_product(shape)) +
                                " does not match data length " +
                                std::to_string(data.size()));
  }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape_) {
  std::size_t n = shape_product(shape_);
  return Tensor(std::move(shape_), std::vector<double>(n, 0.0));
}

std::size_t Tensor::rows() const {
  if (shape.size() != 2) throw std::logic_error("Tensor::rows: not a matrix");
  return shape[0];
}

std::size_t Tensor::cols() const {
  if (shape.size() != 2) throw std::logic_error("Tensor::cols: not a matrix");
  return shape[1];
}

double& Tensor::at(std::size_t r, std::size_t c) {
  return data[r * cols() + c];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return data[r * cols() + c];
}

bool Tensor::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::require_finite(const std::string& what) const {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw std::invalid_argument(what + ": non-finite value at index " +
                                  std::to_string(i));
    }
  }
}

}  // namespace sharpbench
