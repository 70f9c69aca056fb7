#include "autolabel/pseudolabel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "autolabel/error.hpp"

namespace autolabel {

std::size_t pseudo_label_quota(std::size_t n, double k_percent) {
  // k * n first keeps integer percentages exact (20 * 10 / 100 == 2, not 2.0000000000000004).
  const double raw = k_percent * static_cast<double>(n) / 100.0;
  const auto quota = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::size_t>(quota, n == 0 ? 0 : 1, n);
}

PseudoLabelSet select_pseudo_labels(std::span<const Prediction> predictions, double k_percent) {
  if (!(k_percent > 0.0 && k_percent <= 100.0)) {
    throw Error(ErrorKind::InvalidPercent, "pseudo-label percentage " + std::to_string(k_percent));
  }
  std::map<std::size_t, std::vector<PseudoLabel>> by_label;
  for (const auto& p : predictions) by_label[p.label_index].push_back({p.video_id, p.label_index, p.confidence});

  PseudoLabelSet out;
  out.k_percent = k_percent;
  for (auto& [label, group] : by_label) {
    std::sort(group.begin(), group.end(), [](const PseudoLabel& a, const PseudoLabel& b) {
      if (a.confidence != b.confidence) return a.confidence > b.confidence;
      return a.video_id < b.video_id;
    });
    group.resize(pseudo_label_quota(group.size(), k_percent));
    out.pairs.insert(out.pairs.end(), group.begin(), group.end());
  }
  return out;
}

}  // namespace autolabel
