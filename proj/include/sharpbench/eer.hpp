#pragma once

#include <cstddef>
#include <vector>

namespace sharpbench {

// Detection scores for the two classes; higher score = more bona fide.
struct ScoreSet {
  std::vector<double> bona;
  std::vector<double> spoof;

  void validate() const;
};

struct EerResult {
  double eer = 0.0;  // fraction in [0, 1]; render x100 for percent tables
  double threshold = 0.0;
  std::size_t n_bona = 0;
  std::size_t n_spoof = 0;
};

// Equal error rate: the operating point where the false-acceptance rate
// (spoof scored >= threshold) equals the false-rejection rate (bona scored
// < threshold). All distinct scores are swept as thresholds and the FAR/FRR
// crossing is resolved by linear interpolation between the two bracketing
// thresholds.
EerResult compute_eer(const ScoreSet& scores);

}  // namespace sharpbench
