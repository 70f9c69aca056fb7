#pragma once

#include <string>
#include <vector>

#include "autolabel/zeroshot.hpp"

namespace autolabel {

struct PseudoLabel {
  std::string video_id;
  std::size_t label_index = 0;
  double confidence = 0.0;

  friend bool operator==(const PseudoLabel&, const PseudoLabel&) = default;
};

struct PseudoLabelSet {
  std::vector<PseudoLabel> pairs;  // sorted by (label, confidence desc, video id)
  double k_percent = 20.0;
};

inline constexpr double kDefaultPseudoPercent = 20.0;

/// Number of entries kept from a class of n predictions: ceil(k/100 * n).
std::size_t pseudo_label_quota(std::size_t n, double k_percent);

/// Per predicted label (shared and private alike), keeps the most confident
/// ceil(k% * n) predictions; equal confidences are ordered by video id.
/// Errors: InvalidPercent unless 0 < k_percent <= 100.
PseudoLabelSet select_pseudo_labels(std::span<const Prediction> predictions, double k_percent);

}  // namespace autolabel
