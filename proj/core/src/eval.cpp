/**
 * Copyright 2026 the posemine authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "posemine/eval.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace posemine {

double interval_iou(const FrameInterval& a, const FrameInterval& b) {
  const std::int64_t inter_first = std::max(a.first, b.first);
  const std::int64_t inter_last = std::min(a.last, b.last);
  if (inter_first > inter_last) return 0.0;
  const double inter = static_cast<double>(inter_last - inter_first + 1);
  const double uni =
      static_cast<double>(a.length()) + static_cast<double>(b.length()) - inter;
  return inter / uni;
}

double event_ap(std::vector<DetectedEvent> detections,
                const std::vector<TruthEvent>& truths, double tau) {
  if (truths.empty()) {
    throw InsufficientDataError("no ground truth events to evaluate against");
  }

  std::stable_sort(detections.begin(), detections.end(),
                   [](const DetectedEvent& a, const DetectedEvent& b) {
                     if (a.confidence != b.confidence) {
                       return a.confidence > b.confidence;
                     }
                     return std::tie(a.video_id, a.span.first, a.span.last,
                                     a.label) < std::tie(b.video_id,
                                                         b.span.first,
                                                         b.span.last, b.label);
                   });

  std::vector<bool> claimed(truths.size(), false);
  std::vector<bool> is_tp(detections.size(), false);
  for (std::size_t d = 0; d < detections.size(); ++d) {
    const DetectedEvent& det = detections[d];
    double best_iou = tau;  // strict: only overlaps above tau qualify
    std::size_t best_t = truths.size();
    for (std::size_t t = 0; t < truths.size(); ++t) {
      if (claimed[t]) continue;
      const TruthEvent& truth = truths[t];
      if (truth.video_id != det.video_id || truth.label != det.label) continue;
      const double overlap = interval_iou(det.span, truth.span);
      if (overlap > best_iou ||
          (overlap == best_iou && best_t < truths.size() &&
           truth.span.first < truths[best_t].span.first)) {
        best_iou = overlap;
        best_t = t;
      }
    }
    if (best_t < truths.size()) {
      claimed[best_t] = true;
      is_tp[d] = true;
    }
  }

  // All-point interpolation: each true positive contributes the best
  // precision achieved at or beyond its own rank.
  const double positives = static_cast<double>(truths.size());
  std::size_t tp = 0;
  std::vector<double> precision(detections.size(), 0.0);
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (is_tp[d]) ++tp;
    precision[d] = static_cast<double>(tp) / static_cast<double>(d + 1);
  }
  double ap = 0.0;
  double best_precision = 0.0;
  for (std::size_t d = detections.size(); d-- > 0;) {
    best_precision = std::max(best_precision, precision[d]);
    if (is_tp[d]) ap += best_precision / positives;
  }
  return ap;
}

std::vector<DetectedEvent> score_events(
    const std::string& video_id, const PhasePrediction& pred,
    const std::array<double, kPhaseCount>& median_event_frames) {
  std::vector<DetectedEvent> detections;
  for (const PhaseEvent& ev : to_events(pred)) {
    const double med = median_event_frames[static_cast<std::size_t>(ev.label)];
    const double length = static_cast<double>(ev.t2 - ev.t1 + 1);
    DetectedEvent det;
    det.video_id = video_id;
    det.label = ev.label;
    det.span = FrameInterval{ev.t1, ev.t2};
    det.confidence = med > 0.0 ? length / med : 0.0;
    detections.push_back(det);
  }
  return detections;
}

PhaseMapResult phase_map(const std::vector<DetectedEvent>& detections,
                         const std::vector<TruthEvent>& truths, double tau) {
  PhaseMapResult result;
  double sum = 0.0;
  std::size_t engaged = 0;
  for (std::size_t h = 0; h < kPhaseCount; ++h) {
    const Phase label = static_cast<Phase>(static_cast<int>(h));
    std::vector<DetectedEvent> class_dets;
    std::vector<TruthEvent> class_truths;
    for (const DetectedEvent& det : detections) {
      if (det.label == label) class_dets.push_back(det);
    }
    for (const TruthEvent& truth : truths) {
      if (truth.label == label) class_truths.push_back(truth);
    }
    result.truth_counts[h] = class_truths.size();
    result.detection_counts[h] = class_dets.size();
    if (class_truths.empty()) continue;
    const double ap = event_ap(std::move(class_dets), class_truths, tau);
    result.per_class_ap[h] = ap;
    sum += ap;
    ++engaged;
  }
  result.map = engaged > 0 ? sum / static_cast<double>(engaged) : 0.0;
  return result;
}

ConfusionMatrix confusion_matrix(const std::vector<Phase>& truth,
                                 const std::vector<Phase>& predicted) {
  if (truth.size() != predicted.size()) {
    throw InvalidSpecError("confusion inputs must have equal length");
  }
  ConfusionMatrix m{};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++m[static_cast<std::size_t>(truth[i])]
      [static_cast<std::size_t>(predicted[i])];
  }
  return m;
}

StrokeEvalResult stroke_eval(const std::map<std::string, CycleSpeedCurve>& curves,
                             const std::vector<StrokeTruth>& truth,
                             double tolerance) {
  StrokeEvalResult result;
  result.tolerance = tolerance;
  double error_sum = 0.0;
  for (const StrokeTruth& row : truth) {
    const auto it = curves.find(row.video_id);
    if (it == curves.end() || !it->second.covers(row.frame)) {
      ++result.undetected;
      continue;
    }
    const double error =
        std::abs(it->second.value_at(row.frame) - row.cycle_length);
    if (error <= tolerance) {
      ++result.evaluated;
      error_sum += error;
    } else {
      ++result.outliers;
    }
  }
  if (result.evaluated > 0) {
    result.mean_abs_error = error_sum / static_cast<double>(result.evaluated);
  }
  return result;
}

RangeEvalResult range_eval(const std::vector<FrameInterval>& detected,
                           const FrameInterval& truth) {
  if (truth.first > truth.last) {
    throw InvalidSpecError("ground truth interval is empty");
  }

  std::vector<FrameInterval> merged;
  for (const FrameInterval& interval : detected) {
    if (interval.first <= interval.last) merged.push_back(interval);
  }
  std::sort(merged.begin(), merged.end(),
            [](const FrameInterval& a, const FrameInterval& b) {
              return std::tie(a.first, a.last) < std::tie(b.first, b.last);
            });
  std::vector<FrameInterval> unions;
  for (const FrameInterval& interval : merged) {
    if (!unions.empty() && interval.first <= unions.back().last + 1) {
      unions.back().last = std::max(unions.back().last, interval.last);
    } else {
      unions.push_back(interval);
    }
  }

  std::int64_t inside = 0;
  std::int64_t outside = 0;
  for (const FrameInterval& interval : unions) {
    const std::int64_t inter_first = std::max(interval.first, truth.first);
    const std::int64_t inter_last = std::min(interval.last, truth.last);
    const std::int64_t overlap =
        inter_first <= inter_last ? inter_last - inter_first + 1 : 0;
    inside += overlap;
    outside += interval.length() - overlap;
  }

  const double truth_len = static_cast<double>(truth.length());
  RangeEvalResult result;
  result.coverage_pct = 100.0 * static_cast<double>(inside) / truth_len;
  result.overdetect_pct = 100.0 * static_cast<double>(outside) / truth_len;
  return result;
}

}  // namespace posemine
