#include "autolabel/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "autolabel/error.hpp"

namespace autolabel {

double hos(double os_star, double unk) {
  const double denom = os_star + unk;
  if (denom <= 0.0) return 0.0;
  return 2.0 * os_star * unk / denom;
}

OpenSetMetrics evaluate(std::span<const Prediction> predictions,
                        const std::map<std::string, std::string>& ground_truth,
                        std::span<const std::string> shared_names) {
  if (predictions.empty()) throw Error(ErrorKind::EmptyEvaluation, "no predictions to evaluate");
  const std::set<std::string> shared(shared_names.begin(), shared_names.end());
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_class;  // correct, total

  OpenSetMetrics m;
  for (const auto& p : predictions) {
    const auto it = ground_truth.find(p.video_id);
    if (it == ground_truth.end()) throw Error(ErrorKind::MissingGroundTruth, "video '" + p.video_id + "'");
    const std::string& truth = it->second;
    ++m.counts.total;
    if (shared.contains(truth)) {
      ++m.counts.known;
      const bool ok = !p.is_private && p.label_name == truth;
      auto& [correct, total] = per_class[truth];
      ++total;
      if (ok) {
        ++correct;
        ++m.counts.correct;
      }
    } else {
      ++m.counts.unknown;
      if (p.is_private) {
        ++m.counts.unknown_correct;
        ++m.counts.correct;
      }
    }
  }

  m.all = 100.0 * static_cast<double>(m.counts.correct) / static_cast<double>(m.counts.total);
  double acc_sum = 0.0;
  for (const auto& [name, ct] : per_class) {
    const double acc = 100.0 * static_cast<double>(ct.first) / static_cast<double>(ct.second);
    m.per_class_accuracy[name] = acc;
    acc_sum += acc;
  }
  m.os_star = per_class.empty() ? 0.0 : acc_sum / static_cast<double>(per_class.size());
  m.unk = m.counts.unknown == 0
              ? 0.0
              : 100.0 * static_cast<double>(m.counts.unknown_correct) / static_cast<double>(m.counts.unknown);
  m.hos = hos(m.os_star, m.unk);
  return m;
}

std::map<std::string, std::string> target_ground_truth(const DatasetBundle& bundle) {
  std::map<std::string, std::string> out;
  for (const auto& v : bundle.videos) {
    if (v.domain == Domain::Target && v.true_label) out[v.id] = *v.true_label;
  }
  return out;
}

std::string format_metrics_table(const std::vector<std::pair<std::string, const OpenSetMetrics*>>& rows) {
  std::size_t width = 8;
  for (const auto& [name, _] : rows) width = std::max(width, name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %7s %7s %7s %7s\n", static_cast<int>(width), "method", "ALL", "OS*", "UNK",
                "HOS");
  out += buf;
  for (const auto& [name, m] : rows) {
    if (m == nullptr) {
      std::snprintf(buf, sizeof buf, "%-*s %7s %7s %7s %7s\n", static_cast<int>(width), name.c_str(), "n/a", "n/a",
                    "n/a", "n/a");
    } else {
      std::snprintf(buf, sizeof buf, "%-*s %7.1f %7.1f %7.1f %7.1f\n", static_cast<int>(width), name.c_str(), m->all,
                    m->os_star, m->unk, m->hos);
    }
    out += buf;
  }
  return out;
}

}  // namespace autolabel
