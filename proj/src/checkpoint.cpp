#include "sharpbench/checkpoint.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sharpbench {

namespace {
constexpr const char* kMagic = "sharpbench-checkpoint v1";
}

std::string checkpoint_to_string(const MlpModel& model) {
  std::ostringstream out;
  out << kMagic << "\n";
  out << "layer_dims";
  for (std::size_t d : model.layer_dims) out << " " << d;
  out << "\n";
  out << "activation " << to_string(model.activation) << "\n";
  out << "param_count " << model.params.size() << "\n";
  char buf[40];
  for (double v : model.params.values()) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << "\n";
  }
  return out.str();
}

MlpModel checkpoint_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw std::runtime_error("checkpoint: bad or missing header");
  }

  std::vector<std::size_t> dims;
  {
    if (!std::getline(in, line)) throw std::runtime_error("checkpoint: truncated");
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key != "layer_dims") throw std::runtime_error("checkpoint: expected layer_dims");
    std::size_t d;
    while (ss >> d) dims.push_back(d);
    if (dims.size() < 2) throw std::runtime_error("checkpoint: bad layer_dims");
  }

  Activation act;
  {
    if (!std::getline(in, line)) throw std::runtime_error("checkpoint: truncated");
    std::istringstream ss(line);
    std::string key, name;
    ss >> key >> name;
    if (key != "activation") throw std::runtime_error("checkpoint: expected activation");
    act = activation_from_string(name);
  }

  std::size_t count = 0;
  {
    if (!std::getline(in, line)) throw std::runtime_error("checkpoint: truncated");
    std::istringstream ss(line);
    std::string key;
    ss >> key >> count;
    if (key != "param_count") throw std::runtime_error("checkpoint: expected param_count");
  }

  ParamVector params = MlpModel::make_layout(dims);
  if (params.size() != count) {
    throw std::runtime_error("checkpoint: param_count " + std::to_string(count) +
                             " does not match layer_dims (expected " +
                             std::to_string(params.size()) + ")");
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("checkpoint: truncated at value " +
                               std::to_string(i));
    }
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) {
      throw std::runtime_error("checkpoint: unparsable value at line " +
                               std::to_string(i + 5));
    }
    if (!std::isfinite(v)) {
      throw std::runtime_error("checkpoint: non-finite parameter at index " +
                               std::to_string(i));
    }
    params.values()[i] = v;
  }
  return MlpModel{std::move(dims), act, std::move(params)};
}

void save_checkpoint(const MlpModel& model, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + tmp);
    out << checkpoint_to_string(model);
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("rename failed: " + path);
  }
}

MlpModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace sharpbench
