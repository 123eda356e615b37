#include "sharpbench/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sharpbench/rng.hpp"

namespace sharpbench {

Batch::Batch(Tensor features_, std::vector<int> labels_)
    : features(std::move(features_)), labels(std::move(labels_)) {
  if (features.shape.size() != 2) {
    throw std::invalid_argument("Batch: features must be 2-D (m, d)");
  }
  if (features.rows() != labels.size()) {
    throw std::invalid_argument(
        "Batch: feature rows " + std::to_string(features.rows()) +
        " != label count " + std::to_string(labels.size()));
  }
  if (labels.empty()) {
    throw std::invalid_argument("Batch: empty batch");
  }
  features.require_finite("Batch features");
  for (int y : labels) {
    if (y != kBonaFide && y != kSpoof) {
      throw std::invalid_argument("Batch: label must be 0 or 1, got " +
                                  std::to_string(y));
    }
  }
}

Dataset::Dataset(Tensor features, std::vector<int> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.shape.size() != 2) {
    throw std::invalid_argument("Dataset: features must be 2-D (n, d)");
  }
  if (features_.rows() != labels_.size()) {
    throw std::invalid_argument("Dataset: feature rows != label count");
  }
  features_.require_finite("Dataset features");
}

Batch Dataset::subset(const std::vector<std::size_t>& indices) const {
  const std::size_t d = feature_dim();
  Tensor f = Tensor::zeros({indices.size(), d});
  std::vector<int> y(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t src = indices[i];
    if (src >= size()) throw std::out_of_range("Dataset::subset: index");
    for (std::size_t j = 0; j < d; ++j) f.at(i, j) = features_.at(src, j);
    y[i] = labels_[src];
  }
  return Batch(std::move(f), std::move(y));
}

namespace {

std::vector<Batch> batches_from_order(const Dataset& ds,
                                      const std::vector<std::size_t>& order,
                                      std::size_t batch_size) {
  if (batch_size == 0) {
    throw std::invalid_argument("batches: batch_size must be >= 1");
  }
  std::vector<Batch> out;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(start + batch_size, order.size());
    std::vector<std::size_t> idx(order.begin() + start, order.begin() + end);
    out.push_back(ds.subset(idx));
  }
  return out;
}

}  // namespace

std::vector<Batch> Dataset::batches(std::size_t batch_size) const {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), 0);
  return batches_from_order(*this, order, batch_size);
}

std::vector<Batch> Dataset::shuffled_batches(std::size_t batch_size,
                                             std::uint64_t seed) const {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
  return batches_from_order(*this, order, batch_size);
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  const std::size_t d = ds.feature_dim();
  for (std::size_t j = 0; j < d; ++j) out << "feature_" << j << ",";
  out << "label\n";
  char buf[40];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features().at(i, j));
      out << buf << ",";
    }
    out << ds.labels()[i] << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("empty dataset file: " + path);
  }
  std::size_t d = 0;
  {
    std::stringstream ss(header);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.empty() || cols.back() != "label") {
      throw std::runtime_error("dataset CSV must end with a 'label' column: " +
                               path);
    }
    d = cols.size() - 1;
  }
  std::vector<double> values;
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != d + 1) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(d + 1) +
                               " columns, got " + std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < d; ++j) {
      values.push_back(std::stod(cells[j]));
    }
    labels.push_back(std::stoi(cells[d]));
  }
  Tensor f({labels.size(), d}, std::move(values));
  return Dataset(std::move(f), std::move(labels));
}

}  // namespace sharpbench
