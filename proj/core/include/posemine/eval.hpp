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
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "posemine/cycles.hpp"
#include "posemine/phases.hpp"
#include "posemine/types.hpp"

namespace posemine {

/// How detection scores are turned into average precision; recorded in
/// evaluation reports so numbers stay comparable.
inline constexpr const char* kApInterpolation = "all-point";

/// Intersection over union of two inclusive frame intervals, counted in
/// frames: [0,10] vs [5,15] overlaps on 6 of 16 frames.
double interval_iou(const FrameInterval& a, const FrameInterval& b);

struct DetectedEvent {
  std::string video_id;
  Phase label = Phase::jump;
  FrameInterval span;
  double confidence = 0.0;
};

struct TruthEvent {
  std::string video_id;
  Phase label = Phase::jump;
  FrameInterval span;
};

/**
 * @brief Average precision over one detection list.  Detections are ranked
 * by confidence (ties broken by video, start frame, label, so results never
 * depend on input order) and matched greedily: a detection is a true
 * positive when an unclaimed truth event of the same video and label
 * overlaps it with IoU strictly above tau.  Interpolation is all-point.
 *
 * The truth list defines the positives, so per-class numbers come from
 * passing per-class-filtered lists.  @throws InsufficientDataError when the
 * truth list is empty.
 */
double event_ap(std::vector<DetectedEvent> detections,
                const std::vector<TruthEvent>& truths, double tau = 0.5);

/// Turns a decoded sequence into scored events: maximal label runs, each
/// scored by its length relative to the median training event length of its
/// class (confidence 0 when that class never occurred in training).
std::vector<DetectedEvent> score_events(
    const std::string& video_id, const PhasePrediction& pred,
    const std::array<double, kPhaseCount>& median_event_frames);

struct PhaseMapResult {
  /// Per-class AP; empty for classes without ground truth events.
  std::array<std::optional<double>, kPhaseCount> per_class_ap;
  double map = 0.0;  ///< mean over classes that have ground truth
  std::array<std::size_t, kPhaseCount> truth_counts{};
  std::array<std::size_t, kPhaseCount> detection_counts{};
};

/// Mean average precision over phase classes at IoU threshold tau.
PhaseMapResult phase_map(const std::vector<DetectedEvent>& detections,
                         const std::vector<TruthEvent>& truths,
                         double tau = 0.5);

/// Frame-level confusion counts; rows are truth, columns prediction.
using ConfusionMatrix =
    std::array<std::array<std::size_t, kPhaseCount>, kPhaseCount>;

ConfusionMatrix confusion_matrix(const std::vector<Phase>& truth,
                                 const std::vector<Phase>& predicted);

/// One ground truth cycle-length measurement.
struct StrokeTruth {
  std::string video_id;
  std::int64_t frame = 0;
  double cycle_length = 0.0;  ///< frames per cycle at that frame
};

struct StrokeEvalResult {
  double mean_abs_error = 0.0;  ///< over measurements within tolerance
  std::size_t evaluated = 0;    ///< measurements with error <= tolerance
  std::size_t outliers = 0;     ///< measurements with error > tolerance
  std::size_t undetected = 0;   ///< measurement frame not covered by a curve
  double tolerance = 2.0;
};

/**
 * @brief Compares fitted cycle curves against point measurements.  A
 * measurement whose frame is uncovered (or whose video has no curve) counts
 * as undetected; covered ones split into within-tolerance (averaged) and
 * outliers (counted).
 */
StrokeEvalResult stroke_eval(const std::map<std::string, CycleSpeedCurve>& curves,
                             const std::vector<StrokeTruth>& truth,
                             double tolerance = 2.0);

struct RangeEvalResult {
  double coverage_pct = 0.0;    ///< truth frames covered, percent
  double overdetect_pct = 0.0;  ///< detected frames outside truth, relative
                                ///< to the truth length, percent
};

/// Frame-accurate coverage of a ground truth activity interval by the
/// detected intervals; overlapping detections are merged before counting.
RangeEvalResult range_eval(const std::vector<FrameInterval>& detected,
                           const FrameInterval& truth);

}  // namespace posemine
