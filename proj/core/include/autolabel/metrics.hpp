#pragma once

#include <map>
#include <string>
#include <vector>

#include "autolabel/dataset.hpp"
#include "autolabel/zeroshot.hpp"

namespace autolabel {

struct MetricCounts {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t known = 0;
  std::size_t unknown = 0;
  std::size_t unknown_correct = 0;
};

/// All four scores are percentages in [0, 100].
struct OpenSetMetrics {
  double all = 0.0;
  double os_star = 0.0;
  double unk = 0.0;
  double hos = 0.0;
  std::map<std::string, double> per_class_accuracy;
  MetricCounts counts;
};

/// Harmonic mean 2ab/(a+b); 0 when both are 0.
double hos(double os_star, double unk);

/// Known-class samples count as correct only when predicted as their own
/// shared class; unknown samples count as correct when predicted as any
/// private label. OS* is the macro mean over known classes that have samples.
/// UNK is 0 when there are no unknown samples.
///
/// Errors: MissingGroundTruth, EmptyEvaluation.
OpenSetMetrics evaluate(std::span<const Prediction> predictions,
                        const std::map<std::string, std::string>& ground_truth,
                        std::span<const std::string> shared_names);

/// Held-out true classes of the bundle's target videos. This is the only place
/// target labels are read.
std::map<std::string, std::string> target_ground_truth(const DatasetBundle& bundle);

/// Fixed-width table in ALL / OS* / UNK / HOS column order, one decimal.
std::string format_metrics_table(const std::vector<std::pair<std::string, const OpenSetMetrics*>>& rows);

}  // namespace autolabel
