#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sharpbench {

// One named block of a flattened parameter vector.
struct LayoutEntry {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t size = 0;

  bool operator==(const LayoutEntry&) const = default;
};

// Flat view of all trainable weights. Perturbations, gradients and optimizer
// moments share the same layout, which makes them element-wise comparable
// and lets the vector algebra below stay layout-checked.
class ParamVector {
 public:
  ParamVector() = default;
  ParamVector(std::vector<LayoutEntry> layout, std::vector<double> values);

  static ParamVector zeros_like(const ParamVector& other);

  std::size_t size() const { return values_.size(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<LayoutEntry>& layout() const { return layout_; }

  bool same_layout(const ParamVector& other) const {
    return layout_ == other.layout_;
  }

  std::span<double> block(std::size_t idx);
  std::span<const double> block(std::size_t idx) const;

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool all_finite() const;
  // Returns "<block>[i]" for the first non-finite coordinate, empty if none.
  std::string first_non_finite() const;

 private:
  std::vector<LayoutEntry> layout_;
  std::vector<double> values_;
};

// BLAS-1 style helpers, 64-bit throughout. All throw on layout mismatch.
ParamVector param_axpy(double a, const ParamVector& x, const ParamVector& y);
void param_axpy_inplace(double a, const ParamVector& x, ParamVector& y);
double param_dot(const ParamVector& x, const ParamVector& y);
double param_norm2(const ParamVector& x);
ParamVector param_clone(const ParamVector& x);
ParamVector param_scale(double a, const ParamVector& x);
void param_scale_inplace(double a, ParamVector& x);

}  // namespace sharpbench
