#include "sharpbench/param_vector.hpp"

#include <cmath>
#include <stdexcept>

namespace sharpbench {

namespace {

std::size_t entry_size(const LayoutEntry& e) {
  std::size_t n = 1;
  for (std::size_t d : e.shape) n *= d;
  return n;
}

void require_same_layout(const ParamVector& x, const ParamVector& y,
                         const char* op) {
  if (!x.same_layout(y)) {
    throw std::invalid_argument(std::string(op) + ": layout mismatch");
  }
}

}  // namespace

ParamVector::ParamVector(std::vector<LayoutEntry> layout,
                         std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  std::size_t expected = 0;
  for (const auto& e : layout_) {
    if (e.offset != expected) {
      throw std::invalid_argument("ParamVector: block '" + e.name +
                                  "' offset " + std::to_string(e.offset) +
                                  " breaks contiguity (expected " +
                                  std::to_string(expected) + ")");
    }
    if (e.size != entry_size(e)) {
      throw std::invalid_argument("ParamVector: block '" + e.name +
                                  "' size does not match its shape");
    }
    expected += e.size;
  }
  if (expected != values_.size()) {
    throw std::invalid_argument(
        "ParamVector: layout covers " + std::to_string(expected) +
        " values but storage holds " + std::to_string(values_.size()));
  }
}

ParamVector ParamVector::zeros_like(const ParamVector& other) {
  return ParamVector(other.layout_, std::vector<double>(other.size(), 0.0));
}

std::span<double> ParamVector::block(std::size_t idx) {
  const auto& e = layout_.at(idx);
  return {values_.data() + e.offset, e.size};
}

std::span<const double> ParamVector::block(std::size_t idx) const {
  const auto& e = layout_.at(idx);
  return {values_.data() + e.offset, e.size};
}

bool ParamVector::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string ParamVector::first_non_finite() const {
  for (const auto& e : layout_) {
    for (std::size_t i = 0; i < e.size; ++i) {
      if (!std::isfinite(values_[e.offset + i])) {
        return e.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return {};
}

ParamVector param_axpy(double a, const ParamVector& x, const ParamVector& y) {
  ParamVector out = param_clone(y);
  param_axpy_inplace(a, x, out);
  return out;
}

void param_axpy_inplace(double a, const ParamVector& x, ParamVector& y) {
  require_same_layout(x, y, "param_axpy");
  const auto& xv = x.values();
  auto& yv = y.values();
  for (std::size_t i = 0; i < xv.size(); ++i) yv[i] += a * xv[i];
}

double param_dot(const ParamVector& x, const ParamVector& y) {
  require_same_layout(x, y, "param_dot");
  double acc = 0.0;
  const auto& xv = x.values();
  const auto& yv = y.values();
  for (std::size_t i = 0; i < xv.size(); ++i) acc += xv[i] * yv[i];
  return acc;
}

double param_norm2(const ParamVector& x) {
  double acc = 0.0;
  for (double v : x.values()) acc += v * v;
  return std::sqrt(acc);
}

ParamVector param_clone(const ParamVector& x) { return x; }

ParamVector param_scale(double a, const ParamVector& x) {
  ParamVector out = param_clone(x);
  param_scale_inplace(a, out);
  return out;
}

void param_scale_inplace(double a, ParamVector& x) {
  for (double& v : x.values()) v *= a;
}

}  // namespace sharpbench
