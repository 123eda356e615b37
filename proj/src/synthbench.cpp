#include "sharpbench/synthbench.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "sharpbench/rng.hpp"

#include "nlohmann/json.hpp"

namespace sharpbench {

void TaskSpec::validate() const {
  if (feature_dim < 2) {
    throw std::invalid_argument("TaskSpec: feature_dim must be >= 2");
  }
  // Sized against the m=32 evaluation protocol.
  if (n_train < 64 || n_eval < 64) {
    throw std::invalid_argument("TaskSpec: n_train and n_eval must be >= 64");
  }
  if (n_train_attacks < 1) {
    throw std::invalid_argument("TaskSpec: n_train_attacks must be >= 1");
  }
  if (!(class_balance > 0.0) || !(class_balance < 1.0)) {
    throw std::invalid_argument("TaskSpec: class_balance must be in (0, 1)");
  }
}

ShiftAxis shift_axis_from_string(const std::string& s) {
  if (s == "language") return ShiftAxis::kLanguage;
  if (s == "attack") return ShiftAxis::kAttack;
  if (s == "channel") return ShiftAxis::kChannel;
  if (s == "speaker") return ShiftAxis::kSpeaker;
  throw std::invalid_argument("unknown shift axis: " + s);
}

std::string to_string(ShiftAxis axis) {
  switch (axis) {
    case ShiftAxis::kLanguage: return "language";
    case ShiftAxis::kAttack: return "attack";
    case ShiftAxis::kChannel: return "channel";
    default: return "speaker";
  }
}

void ShiftSpec::validate() const {
  if (level < 0) throw std::invalid_argument("ShiftSpec: level must be >= 0");
  if (level > max_level) {
    throw std::invalid_argument("ShiftSpec: level " + std::to_string(level) +
                                " exceeds max_level " +
                                std::to_string(max_level));
  }
  if (!(language_magnitude > 0.0) || !(channel_strength > 0.0) ||
      !(channel_noise > 0.0)) {
    throw std::invalid_argument("ShiftSpec: axis magnitudes must be > 0");
  }
  if (!(speaker_spread > 0.0) || !(speaker_spread < 1.0)) {
    throw std::invalid_argument("ShiftSpec: speaker_spread must be in (0, 1)");
  }
}

namespace {

// Stream tags; every geometric object and every sample stream draws from
// its own namespace so changing one knob never shifts unrelated draws.
enum Stream : std::uint64_t {
  kDirection = 0x01,
  kBonaComponent = 0x02,
  kTrainCluster = 0x03,
  kUnseenCluster = 0x04,
  kLanguageDir = 0x05,
  kChannelTransform = 0x06,
  kSpeakerSub = 0x07,
  kTrainDraws = 0x10,
  kEvalDraws = 0x11,
  kRowShuffle = 0x12,
  kAttackDraws = 0x13,
  kChannelNoise = 0x14,
  kSpeakerDraws = 0x15,
};

constexpr std::size_t kBonaComponents = 3;
constexpr double kCenterDistance = 1.3;  // class centers at +-1.3 * u
constexpr double kBonaScatter = 0.45;    // bona component mean scatter
constexpr double kAttackScatter = 0.55;  // training cluster mean scatter
constexpr double kWithinSigma = 1.0;     // per-coordinate sample noise
// Unseen attack cluster k creeps toward the bona fide region by
// kUnseenTowardStep * k along the separation direction (stronger attacks
// are harder to detect) and sits kUnseenLateral off the training manifold
// in its own random direction.
constexpr double kUnseenTowardStep = 0.18;
constexpr double kUnseenLateral = 0.9;

using Vec = std::vector<double>;

Vec gaussian_vec(Rng& rng, std::size_t d, double sigma) {
  Vec v(d);
  for (double& x : v) x = sigma * rng.normal();
  return v;
}

Vec unit_vec(Rng& rng, std::size_t d) {
  Vec v = gaussian_vec(rng, d, 1.0);
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (n == 0.0) {
    v[0] = 1.0;
    return v;
  }
  for (double& x : v) x /= n;
  return v;
}

// Fixed generating geometry of a task, derived from base_seed only.
struct Geometry {
  std::size_t d;
  Vec separation;                  // unit direction u
  std::vector<Vec> bona_means;     // kBonaComponents x d
  std::vector<Vec> train_attack_means;

  explicit Geometry(const TaskSpec& task) : d(task.feature_dim) {
    Rng dir_rng(mix_seed(task.base_seed, kDirection));
    separation = unit_vec(dir_rng, d);

    for (std::size_t c = 0; c < kBonaComponents; ++c) {
      Rng rng(mix_seed(task.base_seed, kBonaComponent, c));
      Vec m = gaussian_vec(rng, d, kBonaScatter);
      for (std::size_t j = 0; j < d; ++j) {
        m[j] += kCenterDistance * separation[j];
      }
      bona_means.push_back(std::move(m));
    }
    for (std::size_t c = 0; c < task.n_train_attacks; ++c) {
      Rng rng(mix_seed(task.base_seed, kTrainCluster, c));
      Vec m = gaussian_vec(rng, d, kAttackScatter);
      for (std::size_t j = 0; j < d; ++j) {
        m[j] -= kCenterDistance * separation[j];
      }
      train_attack_means.push_back(std::move(m));
    }
  }

  Vec spoof_center() const {
    Vec c(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
      c[j] = -kCenterDistance * separation[j];
    }
    return c;
  }

  // Unseen attack cluster k >= 1: progressively closer to the bona fide
  // side (harder to detect) plus a lateral offset off the training
  // manifold, seed-disjoint from the training clusters.
  Vec unseen_attack_mean(const TaskSpec& task, int k) const {
    Rng rng(mix_seed(task.base_seed, kUnseenCluster,
                     static_cast<std::uint64_t>(k)));
    Vec v = unit_vec(rng, d);
    Vec m = spoof_center();
    const double toward =
        2.0 * kCenterDistance * kUnseenTowardStep * static_cast<double>(k);
    for (std::size_t j = 0; j < d; ++j) {
      m[j] += toward * separation[j] + kUnseenLateral * v[j];
    }
    return m;
  }

  Vec class_mean(int label, const TaskSpec& task) const {
    Vec m(d, 0.0);
    if (label == kBonaFide) {
      for (const Vec& c : bona_means) {
        for (std::size_t j = 0; j < d; ++j) m[j] += c[j];
      }
      for (double& x : m) x /= static_cast<double>(kBonaComponents);
    } else {
      for (const Vec& c : train_attack_means) {
        for (std::size_t j = 0; j < d; ++j) m[j] += c[j];
      }
      for (double& x : m) x /= static_cast<double>(task.n_train_attacks);
    }
    return m;
  }
};

struct RawSet {
  std::vector<Vec> rows;
  std::vector<int> labels;
  std::vector<int> channel_group;  // filled by channel shifts only
  std::size_t n_bona = 0;          // rows [0, n_bona) are bona, rest spoof
};

std::size_t bona_count(std::size_t n, double balance) {
  return static_cast<std::size_t>(
      std::llround(balance * static_cast<double>(n)));
}

// Base draws, bona block then spoof block, round-robin over components /
// training clusters.
RawSet draw_base(const TaskSpec& task, const Geometry& geo, std::size_t n,
                 std::uint64_t draw_seed) {
  RawSet set;
  set.n_bona = bona_count(n, task.class_balance);
  const std::size_t n_spoof = n - set.n_bona;
  Rng rng(draw_seed);
  for (std::size_t i = 0; i < set.n_bona; ++i) {
    const Vec& mean = geo.bona_means[i % kBonaComponents];
    Vec x = gaussian_vec(rng, geo.d, kWithinSigma);
    for (std::size_t j = 0; j < geo.d; ++j) x[j] += mean[j];
    set.rows.push_back(std::move(x));
    set.labels.push_back(kBonaFide);
  }
  for (std::size_t i = 0; i < n_spoof; ++i) {
    const Vec& mean = geo.train_attack_means[i % task.n_train_attacks];
    Vec x = gaussian_vec(rng, geo.d, kWithinSigma);
    for (std::size_t j = 0; j < geo.d; ++j) x[j] += mean[j];
    set.rows.push_back(std::move(x));
    set.labels.push_back(kSpoof);
  }
  return set;
}

void apply_language(RawSet& set, const TaskSpec& task, const ShiftSpec& shift) {
  Rng rng(mix_seed(task.base_seed, kLanguageDir));
  Vec dir = unit_vec(rng, task.feature_dim);
  const double norm =
      static_cast<double>(shift.level) * shift.language_magnitude;
  for (Vec& row : set.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += norm * dir[j];
  }
}

void apply_attack(RawSet& set, const TaskSpec& task, const ShiftSpec& shift,
                  const Geometry& geo) {
  std::vector<Vec> means;
  for (int k = 1; k <= shift.level; ++k) {
    means.push_back(geo.unseen_attack_mean(task, k));
  }
  Rng rng(mix_seed(task.base_seed, kAttackDraws,
                   static_cast<std::uint64_t>(shift.level)));
  std::size_t spoof_idx = 0;
  for (std::size_t i = set.n_bona; i < set.rows.size(); ++i, ++spoof_idx) {
    const Vec& mean = means[spoof_idx % means.size()];
    Vec x = gaussian_vec(rng, geo.d, kWithinSigma);
    for (std::size_t j = 0; j < geo.d; ++j) x[j] += mean[j];
    set.rows[i] = std::move(x);
  }
}

void apply_channel(RawSet& set, const TaskSpec& task, const ShiftSpec& shift) {
  const std::size_t d = task.feature_dim;
  const std::size_t levels = static_cast<std::size_t>(shift.level);
  // Condition bank: condition g is identical at every level that includes
  // it; severity grows across the bank.
  std::vector<std::vector<double>> transforms;  // row-major d x d, I + s*R/sqrt(d)
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t g = 0; g < levels; ++g) {
    Rng rng(mix_seed(task.base_seed, kChannelTransform, g));
    const double strength =
        shift.channel_strength * (1.0 + 1.5 * static_cast<double>(g));
    std::vector<double> a(d * d, 0.0);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        a[r * d + c] = strength * inv_sqrt_d * rng.normal();
      }
      a[r * d + r] += 1.0;
    }
    transforms.push_back(std::move(a));
  }
  Rng noise(mix_seed(task.base_seed, kChannelNoise,
                     static_cast<std::uint64_t>(shift.level)));
  Vec out(d);
  set.channel_group.resize(set.rows.size());
  for (std::size_t i = 0; i < set.rows.size(); ++i) {
    const std::size_t g = i % levels;
    set.channel_group[i] = static_cast<int>(g);
    const double noise_sigma =
        shift.channel_noise * (1.0 + 0.6 * static_cast<double>(g));
    const std::vector<double>& a = transforms[g];
    Vec& x = set.rows[i];
    for (std::size_t r = 0; r < d; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) acc += a[r * d + c] * x[c];
      out[r] = acc + noise_sigma * noise.normal();
    }
    x = out;
  }
}

void apply_speaker(RawSet& set, const TaskSpec& task, const ShiftSpec& shift,
                   const Geometry& geo) {
  const std::size_t d = task.feature_dim;
  const std::size_t levels = static_cast<std::size_t>(shift.level);
  // speaker_spread is the typical norm of a subcluster mean offset; the
  // per-coordinate sigma follows from dividing by sqrt(d).
  const double spread =
      shift.speaker_spread / std::sqrt(static_cast<double>(d));
  // Speakers are subclusters inside each existing mixture component, so the
  // class-level mixture structure (components and their means) is kept and
  // only the within-component mass is re-partitioned. Subcluster means are
  // recentered per component; within-subcluster sigma is reduced so total
  // variance stays approximately unchanged.
  const double within = std::sqrt(
      std::max(kWithinSigma * kWithinSigma - spread * spread, 0.04));

  Rng draws(mix_seed(task.base_seed, kSpeakerDraws,
                     static_cast<std::uint64_t>(shift.level)));
  for (int label : {kBonaFide, kSpoof}) {
    const std::vector<Vec>& components =
        label == kBonaFide ? geo.bona_means : geo.train_attack_means;
    const std::size_t n_comp = components.size();

    // subs[c][k]: k-th speaker subcluster of component c, stable across
    // levels (the level-l set is the first l draws of each component).
    std::vector<std::vector<Vec>> subs(n_comp);
    for (std::size_t c = 0; c < n_comp; ++c) {
      Vec avg(d, 0.0);
      for (std::size_t k = 0; k < levels; ++k) {
        Rng rng(mix_seed(task.base_seed, kSpeakerSub,
                         (static_cast<std::uint64_t>(label) * 1000 + c) *
                                 1000 +
                             k));
        subs[c].push_back(gaussian_vec(rng, d, spread));
        for (std::size_t j = 0; j < d; ++j) avg[j] += subs[c].back()[j];
      }
      for (double& v : avg) v /= static_cast<double>(levels);
      for (Vec& s : subs[c]) {
        for (std::size_t j = 0; j < d; ++j) {
          s[j] += components[c][j] - avg[j];
        }
      }
    }

    // Row j of the class goes to component j % C (as in the base draw) and
    // speaker subcluster (j / C) % levels, so counts stay stratified.
    std::size_t class_idx = 0;
    for (std::size_t i = 0; i < set.rows.size(); ++i) {
      if (set.labels[i] != label) continue;
      const std::size_t c = class_idx % n_comp;
      const std::size_t k = (class_idx / n_comp) % levels;
      Vec x = gaussian_vec(draws, d, within);
      for (std::size_t j = 0; j < d; ++j) x[j] += subs[c][k][j];
      set.rows[i] = std::move(x);
      ++class_idx;
    }
  }
}

Dataset finalize(RawSet set, const TaskSpec& task, bool is_train,
                 std::vector<int>* channel_conditions = nullptr) {
  // Shared seeded permutation so batches interleave both classes; identical
  // across all shift levels of the same task.
  std::vector<std::size_t> order(set.rows.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(task.base_seed, kRowShuffle, is_train ? 1 : 2));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
  const std::size_t d = task.feature_dim;
  Tensor features = Tensor::zeros({set.rows.size(), d});
  std::vector<int> labels(set.rows.size());
  if (channel_conditions && !set.channel_group.empty()) {
    channel_conditions->resize(set.rows.size());
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Vec& src = set.rows[order[i]];
    for (std::size_t j = 0; j < d; ++j) features.at(i, j) = src[j];
    labels[i] = set.labels[order[i]];
    if (channel_conditions && !set.channel_group.empty()) {
      (*channel_conditions)[i] = set.channel_group[order[i]];
    }
  }
  return Dataset(std::move(features), std::move(labels));
}

std::vector<std::string> training_cluster_ids(const TaskSpec& task) {
  std::vector<std::string> ids;
  for (std::size_t c = 0; c < task.n_train_attacks; ++c) {
    ids.push_back("train-attack-" + std::to_string(c));
  }
  return ids;
}

}  // namespace

GeneratedDataset generate_train(const TaskSpec& task) {
  task.validate();
  Geometry geo(task);
  RawSet set =
      draw_base(task, geo, task.n_train, mix_seed(task.base_seed, kTrainDraws));
  GeneratedDataset gd{finalize(std::move(set), task, true), {}};
  gd.provenance.task = task;
  gd.provenance.is_train = true;
  gd.provenance.cluster_ids = training_cluster_ids(task);
  gd.provenance.name = "train";
  return gd;
}

GeneratedDataset generate_matched_eval(const TaskSpec& task) {
  ShiftSpec matched;
  matched.level = 0;
  return generate_shifted_test(task, matched);
}

GeneratedDataset generate_shifted_test(const TaskSpec& task,
                                       const ShiftSpec& shift) {
  task.validate();
  shift.validate();
  Geometry geo(task);
  RawSet set =
      draw_base(task, geo, task.n_eval, mix_seed(task.base_seed, kEvalDraws));

  std::vector<std::string> cluster_ids = training_cluster_ids(task);
  if (shift.level > 0) {
    switch (shift.axis) {
      case ShiftAxis::kLanguage:
        apply_language(set, task, shift);
        break;
      case ShiftAxis::kAttack:
        apply_attack(set, task, shift, geo);
        cluster_ids.clear();
        for (int k = 1; k <= shift.level; ++k) {
          cluster_ids.push_back("unseen-attack-" + std::to_string(k));
        }
        break;
      case ShiftAxis::kChannel:
        apply_channel(set, task, shift);
        break;
      case ShiftAxis::kSpeaker:
        apply_speaker(set, task, shift, geo);
        break;
    }
  }

  std::vector<int> channel_conditions;
  GeneratedDataset gd{finalize(std::move(set), task, false,
                               &channel_conditions),
                      {}};
  gd.provenance.task = task;
  gd.provenance.shift = shift;
  gd.provenance.channel_conditions = std::move(channel_conditions);
  gd.provenance.is_train = false;
  gd.provenance.cluster_ids = std::move(cluster_ids);
  gd.provenance.name = shift.level == 0
                           ? "matched"
                           : to_string(shift.axis) + "-L" +
                                 std::to_string(shift.level);
  return gd;
}

std::vector<double> true_class_mean(const TaskSpec& task, int label) {
  task.validate();
  return Geometry(task).class_mean(label, task);
}

std::string provenance_json(const Provenance& prov) {
  nlohmann::ordered_json j;
  j["name"] = prov.name;
  j["is_train"] = prov.is_train;
  j["task"] = {{"feature_dim", prov.task.feature_dim},
               {"n_train", prov.task.n_train},
               {"n_eval", prov.task.n_eval},
               {"n_train_attacks", prov.task.n_train_attacks},
               {"class_balance", prov.task.class_balance},
               {"base_seed", prov.task.base_seed}};
  j["shift"] = {{"axis", to_string(prov.shift.axis)},
                {"level", prov.shift.level},
                {"language_magnitude", prov.shift.language_magnitude},
                {"channel_strength", prov.shift.channel_strength},
                {"channel_noise", prov.shift.channel_noise},
                {"speaker_spread", prov.shift.speaker_spread},
                {"max_level", prov.shift.max_level}};
  j["cluster_ids"] = prov.cluster_ids;
  if (!prov.channel_conditions.empty()) {
    j["channel_conditions"] = prov.channel_conditions;
  }
  return j.dump(2);
}

void write_generated_dataset(const GeneratedDataset& gd,
                             const std::string& csv_path) {
  write_dataset_csv(gd.data, csv_path);
  std::ofstream out(csv_path + ".provenance.json");
  if (!out) {
    throw std::runtime_error("cannot open for write: " + csv_path +
                             ".provenance.json");
  }
  out << provenance_json(gd.provenance) << "\n";
}

}  // namespace sharpbench
