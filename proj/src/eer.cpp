#include "sharpbench/eer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sharpbench {

void ScoreSet::validate() const {
  if (bona.empty()) throw std::invalid_argument("ScoreSet: no bona fide scores");
  if (spoof.empty()) throw std::invalid_argument("ScoreSet: no spoof scores");
  for (double v : bona) {
    if (!std::isfinite(v)) throw std::invalid_argument("ScoreSet: non-finite bona score");
  }
  for (double v : spoof) {
    if (!std::isfinite(v)) throw std::invalid_argument("ScoreSet: non-finite spoof score");
  }
}

EerResult compute_eer(const ScoreSet& scores) {
  scores.validate();
  std::vector<double> bona = scores.bona;
  std::vector<double> spoof = scores.spoof;
  std::sort(bona.begin(), bona.end());
  std::sort(spoof.begin(), spoof.end());

  const double nb = static_cast<double>(bona.size());
  const double ns = static_cast<double>(spoof.size());

  // Distinct candidate thresholds, ascending, plus a sentinel above the
  // maximum so FAR reaches 0 and FRR reaches 1 inside the sweep.
  std::vector<double> thresholds;
  thresholds.reserve(bona.size() + spoof.size() + 1);
  thresholds.insert(thresholds.end(), bona.begin(), bona.end());
  thresholds.insert(thresholds.end(), spoof.begin(), spoof.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  thresholds.push_back(thresholds.back() + 1.0);

  // Acceptance is score >= threshold. FAR falls and FRR rises as the
  // threshold sweeps upward; at the first threshold FAR=1, FRR=0, at the
  // sentinel FAR=0, FRR=1, so a sign change of FAR-FRR always exists.
  auto far_at = [&](double t) {
    const auto it = std::lower_bound(spoof.begin(), spoof.end(), t);
    return static_cast<double>(spoof.end() - it) / ns;
  };
  auto frr_at = [&](double t) {
    const auto it = std::lower_bound(bona.begin(), bona.end(), t);
    return static_cast<double>(it - bona.begin()) / nb;
  };

  EerResult res;
  res.n_bona = bona.size();
  res.n_spoof = spoof.size();

  double prev_t = thresholds[0];
  double prev_far = far_at(prev_t);
  double prev_frr = frr_at(prev_t);
  for (std::size_t k = 1; k < thresholds.size(); ++k) {
    const double t = thresholds[k];
    const double far = far_at(t);
    const double frr = frr_at(t);
    if (far - frr <= 0.0) {
      const double d_lo = prev_far - prev_frr;
      const double d_hi = far - frr;
      if (d_hi == 0.0) {
        res.eer = far;
        res.threshold = t;
      } else {
        const double lambda = d_lo / (d_lo - d_hi);
        res.eer = prev_far + lambda * (far - prev_far);
        res.threshold = prev_t + lambda * (t - prev_t);
      }
      return res;
    }
    prev_t = t;
    prev_far = far;
    prev_frr = frr;
  }
  throw std::logic_error("compute_eer: no FAR/FRR crossing found");
}

}  // namespace sharpbench
