#include "sharpbench/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sharpbench {

OptimizerKind optimizer_kind_from_string(const std::string& s) {
  if (s == "adam") return OptimizerKind::kAdam;
  if (s == "sam") return OptimizerKind::kSam;
  throw std::invalid_argument("unknown optimizer: " + s);
}

std::string to_string(OptimizerKind k) {
  return k == OptimizerKind::kAdam ? "adam" : "sam";
}

void ExperimentConfig::validate() const {
  task.validate();
  if (hidden_dims.empty()) {
    throw std::invalid_argument("config: need at least one hidden layer");
  }
  adam.validate();
  if (optimizer == OptimizerKind::kSam && (!(rho > 0.0) || rho > 1.0)) {
    throw std::invalid_argument("config: sam rho must be in (0, 1]");
  }
  if (epochs == 0 && seeds.empty()) {
    throw std::invalid_argument("config: nothing to do");
  }
  if (batch_size == 0) {
    throw std::invalid_argument("config: batch_size must be >= 1");
  }
  if (seeds.empty()) {
    throw std::invalid_argument("config: need at least one seed");
  }
  if (task.n_train < 2 * batch_size || task.n_eval < 2 * batch_size) {
    throw std::invalid_argument(
        "config: task sizes must be at least twice the batch size");
  }
  class_weights.validate();
  sharpness.validate();
  for (const auto& s : shifts) s.validate();
  for (const auto& c : curves) {
    for (int level : c.levels) {
      make_shift(c.axis, level).validate();
    }
  }
}

ShiftSpec ExperimentConfig::make_shift(ShiftAxis axis, int level) const {
  ShiftSpec s = shift_defaults;
  s.axis = axis;
  s.level = level;
  return s;
}

std::vector<std::size_t> ExperimentConfig::layer_dims() const {
  std::vector<std::size_t> dims;
  dims.push_back(task.feature_dim);
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(2);
  return dims;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number '" + s + "' for " + key);
  }
}

std::uint64_t to_u64(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer '" + s + "' for " + key);
  }
}

void need(const std::vector<std::string>& toks, std::size_t n,
          const std::string& key) {
  if (toks.size() != n + 1) {
    throw std::invalid_argument("config: key " + key + " expects " +
                                std::to_string(n) + " value(s)");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  cfg.shifts.clear();
  std::istringstream in(text);
  std::string line;
  bool saw_version = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::vector<std::string> toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& key = toks[0];
    try {
      if (key == "version") {
        need(toks, 1, key);
        if (toks[1] != "1") {
          throw std::invalid_argument("config: unsupported version " + toks[1]);
        }
        saw_version = true;
      } else if (key == "task.feature_dim") {
        need(toks, 1, key);
        cfg.task.feature_dim = to_u64(toks[1], key);
      } else if (key == "task.n_train") {
        need(toks, 1, key);
        cfg.task.n_train = to_u64(toks[1], key);
      } else if (key == "task.n_eval") {
        need(toks, 1, key);
        cfg.task.n_eval = to_u64(toks[1], key);
      } else if (key == "task.n_train_attacks") {
        need(toks, 1, key);
        cfg.task.n_train_attacks = to_u64(toks[1], key);
      } else if (key == "task.class_balance") {
        need(toks, 1, key);
        cfg.task.class_balance = to_double(toks[1], key);
      } else if (key == "task.base_seed") {
        need(toks, 1, key);
        cfg.task.base_seed = to_u64(toks[1], key);
      } else if (key == "model.hidden") {
        cfg.hidden_dims.clear();
        for (std::size_t i = 1; i < toks.size(); ++i) {
          cfg.hidden_dims.push_back(to_u64(toks[i], key));
        }
      } else if (key == "model.activation") {
        need(toks, 1, key);
        cfg.activation = activation_from_string(toks[1]);
      } else if (key == "optimizer.kind") {
        need(toks, 1, key);
        cfg.optimizer = optimizer_kind_from_string(toks[1]);
      } else if (key == "optimizer.lr_max") {
        need(toks, 1, key);
        cfg.adam.lr_max = to_double(toks[1], key);
      } else if (key == "optimizer.lr_min") {
        need(toks, 1, key);
        cfg.adam.lr_min = to_double(toks[1], key);
      } else if (key == "optimizer.beta1") {
        need(toks, 1, key);
        cfg.adam.beta1 = to_double(toks[1], key);
      } else if (key == "optimizer.beta2") {
        need(toks, 1, key);
        cfg.adam.beta2 = to_double(toks[1], key);
      } else if (key == "optimizer.eps") {
        need(toks, 1, key);
        cfg.adam.eps = to_double(toks[1], key);
      } else if (key == "optimizer.weight_decay") {
        need(toks, 1, key);
        cfg.adam.weight_decay = to_double(toks[1], key);
      } else if (key == "optimizer.rho") {
        need(toks, 1, key);
        cfg.rho = to_double(toks[1], key);
      } else if (key == "optimizer.force_zero_perturbation") {
        need(toks, 1, key);
        cfg.force_zero_perturbation = to_u64(toks[1], key) != 0;
      } else if (key == "train.epochs") {
        need(toks, 1, key);
        cfg.epochs = to_u64(toks[1], key);
      } else if (key == "train.batch_size") {
        need(toks, 1, key);
        cfg.batch_size = to_u64(toks[1], key);
      } else if (key == "train.seeds") {
        cfg.seeds.clear();
        for (std::size_t i = 1; i < toks.size(); ++i) {
          cfg.seeds.push_back(to_u64(toks[i], key));
        }
      } else if (key == "loss.class_weight_bona") {
        need(toks, 1, key);
        cfg.class_weights.bona = to_double(toks[1], key);
      } else if (key == "loss.class_weight_spoof") {
        need(toks, 1, key);
        cfg.class_weights.spoof = to_double(toks[1], key);
      } else if (key == "sharpness.rho") {
        need(toks, 1, key);
        cfg.sharpness.rho = to_double(toks[1], key);
      } else if (key == "sharpness.batch_size") {
        need(toks, 1, key);
        cfg.sharpness.batch_size = to_u64(toks[1], key);
      } else if (key == "sharpness.ascent_steps") {
        need(toks, 1, key);
        cfg.sharpness.ascent_steps = to_u64(toks[1], key);
      } else if (key == "sharpness.ascent_lr") {
        need(toks, 1, key);
        cfg.sharpness.ascent_lr = to_double(toks[1], key);
      } else if (key == "sharpness.restarts") {
        need(toks, 1, key);
        cfg.sharpness.restarts = to_u64(toks[1], key);
      } else if (key == "sharpness.seed") {
        need(toks, 1, key);
        cfg.sharpness.seed = to_u64(toks[1], key);
      } else if (key == "shift") {
        need(toks, 2, key);
        cfg.shifts.push_back(ShiftSpec{});  // axis/level patched below
        cfg.shifts.back().axis = shift_axis_from_string(toks[1]);
        cfg.shifts.back().level = static_cast<int>(to_u64(toks[2], key));
      } else if (key == "curve") {
        if (toks.size() < 3) {
          throw std::invalid_argument("config: curve needs axis and levels");
        }
        ExperimentConfig::Curve c;
        c.axis = shift_axis_from_string(toks[1]);
        for (std::size_t i = 2; i < toks.size(); ++i) {
          c.levels.push_back(static_cast<int>(to_u64(toks[i], key)));
        }
        cfg.curves.push_back(std::move(c));
      } else if (key == "shift_params.language_magnitude") {
        need(toks, 1, key);
        cfg.shift_defaults.language_magnitude = to_double(toks[1], key);
      } else if (key == "shift_params.channel_strength") {
        need(toks, 1, key);
        cfg.shift_defaults.channel_strength = to_double(toks[1], key);
      } else if (key == "shift_params.channel_noise") {
        need(toks, 1, key);
        cfg.shift_defaults.channel_noise = to_double(toks[1], key);
      } else if (key == "shift_params.speaker_spread") {
        need(toks, 1, key);
        cfg.shift_defaults.speaker_spread = to_double(toks[1], key);
      } else if (key == "shift_params.max_level") {
        need(toks, 1, key);
        cfg.shift_defaults.max_level = static_cast<int>(to_u64(toks[1], key));
      } else if (key == "output_dir") {
        need(toks, 1, key);
        cfg.output_dir = toks[1];
      } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(e.what()) + " (line " +
                                  std::to_string(lineno) + ")");
    }
  }
  if (!saw_version) {
    throw std::invalid_argument("config: missing 'version 1' line");
  }
  // Propagate shared shift parameters onto the parsed shift list.
  for (auto& s : cfg.shifts) {
    ShiftSpec patched = cfg.shift_defaults;
    patched.axis = s.axis;
    patched.level = s.level;
    s = patched;
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "version 1\n";
  out << "task.feature_dim " << cfg.task.feature_dim << "\n";
  out << "task.n_train " << cfg.task.n_train << "\n";
  out << "task.n_eval " << cfg.task.n_eval << "\n";
  out << "task.n_train_attacks " << cfg.task.n_train_attacks << "\n";
  out << "task.class_balance " << fmt(cfg.task.class_balance) << "\n";
  out << "task.base_seed " << cfg.task.base_seed << "\n";
  out << "model.hidden";
  for (std::size_t h : cfg.hidden_dims) out << " " << h;
  out << "\n";
  out << "model.activation " << to_string(cfg.activation) << "\n";
  out << "optimizer.kind " << to_string(cfg.optimizer) << "\n";
  out << "optimizer.lr_max " << fmt(cfg.adam.lr_max) << "\n";
  out << "optimizer.lr_min " << fmt(cfg.adam.lr_min) << "\n";
  out << "optimizer.beta1 " << fmt(cfg.adam.beta1) << "\n";
  out << "optimizer.beta2 " << fmt(cfg.adam.beta2) << "\n";
  out << "optimizer.eps " << fmt(cfg.adam.eps) << "\n";
  out << "optimizer.weight_decay " << fmt(cfg.adam.weight_decay) << "\n";
  if (cfg.optimizer == OptimizerKind::kSam) {
    out << "optimizer.rho " << fmt(cfg.rho) << "\n";
    out << "optimizer.force_zero_perturbation "
        << (cfg.force_zero_perturbation ? 1 : 0) << "\n";
  }
  out << "train.epochs " << cfg.epochs << "\n";
  out << "train.batch_size " << cfg.batch_size << "\n";
  out << "train.seeds";
  for (std::uint64_t s : cfg.seeds) out << " " << s;
  out << "\n";
  out << "loss.class_weight_bona " << fmt(cfg.class_weights.bona) << "\n";
  out << "loss.class_weight_spoof " << fmt(cfg.class_weights.spoof) << "\n";
  out << "sharpness.rho " << fmt(cfg.sharpness.rho) << "\n";
  out << "sharpness.batch_size " << cfg.sharpness.batch_size << "\n";
  out << "sharpness.ascent_steps " << cfg.sharpness.ascent_steps << "\n";
  out << "sharpness.ascent_lr " << fmt(cfg.sharpness.ascent_lr) << "\n";
  out << "sharpness.restarts " << cfg.sharpness.restarts << "\n";
  out << "sharpness.seed " << cfg.sharpness.seed << "\n";
  out << "shift_params.language_magnitude "
      << fmt(cfg.shift_defaults.language_magnitude) << "\n";
  out << "shift_params.channel_strength "
      << fmt(cfg.shift_defaults.channel_strength) << "\n";
  out << "shift_params.channel_noise " << fmt(cfg.shift_defaults.channel_noise)
      << "\n";
  out << "shift_params.speaker_spread "
      << fmt(cfg.shift_defaults.speaker_spread) << "\n";
  out << "shift_params.max_level " << cfg.shift_defaults.max_level << "\n";
  for (const auto& s : cfg.shifts) {
    out << "shift " << to_string(s.axis) << " " << s.level << "\n";
  }
  for (const auto& c : cfg.curves) {
    out << "curve " << to_string(c.axis);
    for (int l : c.levels) out << " " << l;
    out << "\n";
  }
  return out.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = canonical_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void write_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << "# sharpbench experiment config\n" << canonical_config(cfg);
  out << "output_dir " << cfg.output_dir << "\n";
}

}  // namespace sharpbench
