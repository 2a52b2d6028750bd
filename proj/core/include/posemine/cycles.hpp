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
#include <optional>
#include <vector>

#include "posemine/distance.hpp"
#include "posemine/types.hpp"

namespace posemine {

/// One near-match of an anchor pose elsewhere in the sequence.
struct MatchEntry {
  std::int64_t frame = 0;
  double mse_norm = 0.0;
};

/// All near-matches of one anchor pose, ordered by frame.
struct MatchList {
  std::int64_t anchor_frame = 0;
  std::vector<MatchEntry> entries;
};

/// A temporal cluster of matches collapsed to its best member.
struct Reoccurrence {
  std::int64_t frame = 0;     ///< best-matching member frame
  double mse_norm = 0.0;      ///< distance of that member to the anchor
  std::int64_t spread = 0;    ///< max |member - consolidated| in the cluster
};

struct ReoccurrenceSequence {
  std::int64_t anchor_frame = 0;
  std::vector<Reoccurrence> occurrences;  ///< strictly increasing frames
};

/// A cycle-length sample: the frame difference between two consecutive
/// occurrences, attributed to the earlier frame of the pair.
struct DifferencePoint {
  std::int64_t frame = 0;
  std::int64_t diff = 0;
};

/**
 * @brief Piecewise polynomial cycle-length-over-time model.  Defined exactly
 * on the covered intervals, which are the detected cyclic ranges.
 */
class CycleSpeedCurve {
 public:
  struct Segment {
    double from_frame = 0.0;
    double to_frame = 0.0;
    // Polynomial in u = (frame - center) / half_width, u in [-1, 1].
    double center = 0.0;
    double half_width = 1.0;
    std::array<double, 6> coeffs{};
  };

  double fps = 50.0;
  std::vector<Segment> segments;       ///< ordered by from_frame
  std::vector<FrameInterval> ranges;   ///< covered integer frame intervals

  bool covers(std::int64_t frame) const noexcept;

  /// Cycle length in frames at an integer frame.
  /// @throws OutOfRangeError outside the covered ranges.
  double value_at(std::int64_t frame) const;

  /// Evaluation at fractional frames, used for continuity checks and plots.
  double value_at(double frame) const;
};

/// Cycles per minute at a frame. @throws OutOfRangeError outside coverage.
double cycle_rate(const CycleSpeedCurve& curve, std::int64_t frame);

/**
 * @brief All-pairs near-match search: one MatchList per anchor pose, holding
 * every other frame whose normalized distance stays below the threshold.
 * The anchor never matches itself.  Parallel over anchors.
 */
std::vector<MatchList> build_match_lists(const PoseSequence& seq,
                                         double match_threshold = 49.0,
                                         double s_ref = kDefaultRefScale);

/**
 * @brief Collapses temporally adjacent matches (gap <= gap_threshold) into
 * single occurrences: the member with minimal distance wins (earlier frame
 * on ties) and the cluster's temporal spread is recorded.
 */
ReoccurrenceSequence consolidate(const MatchList& list,
                                 std::int64_t gap_threshold = 3);

/**
 * @brief Reliability filter: drops occurrences whose spread reaches
 * spread_threshold, then keeps only anchors whose surviving occurrence count
 * reaches the median count over all anchors (midpoint rule).
 */
std::vector<ReoccurrenceSequence> filter_sequences(
    std::vector<ReoccurrenceSequence> sequences,
    std::int64_t spread_threshold = 10);

/**
 * @brief Consecutive-pair frame differences per surviving anchor; the anchor
 * itself is inserted into its own timeline when include_anchor is set.
 * Output sorted by (frame, diff).
 */
std::vector<DifferencePoint> extract_differences(
    const std::vector<ReoccurrenceSequence>& sequences,
    bool include_anchor = true);

/**
 * @brief Outlier rejection: each difference must stay within rel_tol of the
 * local median over a +-window_seconds neighborhood.  Single pass.
 */
std::vector<DifferencePoint> median_filter(
    const std::vector<DifferencePoint>& points, double fps,
    double window_seconds = 2.0, double rel_tol = 0.10);

struct CurveFitConfig {
  int degree = 5;
  double segment_cycles = 3.0;        ///< target segment length, in cycles
  std::size_t min_region_points = 12;
  std::size_t min_segment_points = 8;
  double median_window_seconds = 2.0;  ///< for the local cycle estimate
};

struct CurveFitResult {
  CycleSpeedCurve curve;
  /// Regions with too few points (or a non-positive fit), skipped and
  /// reported rather than extrapolated over.
  std::vector<FrameInterval> skipped_regions;
};

/**
 * @brief Piecewise degree-5 least squares over the difference points with
 * C0/C1 equality constraints at interior segment boundaries.  Data is split
 * into independent regions wherever the frame gap between neighboring points
 * exceeds one local median cycle length; segments span roughly
 * segment_cycles local cycles.
 */
CurveFitResult fit_curve(const std::vector<DifferencePoint>& points,
                         double fps, const CurveFitConfig& config = {});

struct CycleConfig {
  double match_threshold = 49.0;
  double s_ref = kDefaultRefScale;
  std::int64_t gap_threshold = 3;
  std::int64_t spread_threshold = 10;
  bool include_anchor = true;
  double median_window_seconds = 2.0;
  double median_rel_tol = 0.10;
  CurveFitConfig fit;
  /// Mine a body part instead of the full pose (e.g. lower_body_subset()
  /// for leg motion).
  std::optional<JointSubset> joints;
};

struct CycleMiningResult {
  CycleSpeedCurve curve;
  std::vector<FrameInterval> detected_ranges;  ///< same as curve.ranges
  std::vector<FrameInterval> skipped_regions;
  std::vector<DifferencePoint> raw_points;   ///< before the median filter
  std::vector<std::uint8_t> kept;            ///< per raw point, survived?
  std::size_t anchors_total = 0;
  std::size_t anchors_kept = 0;
};

/// Full pipeline: match lists -> consolidation -> filtering -> differences
/// -> median filter -> curve fit.
CycleMiningResult mine_cycles(const PoseSequence& seq,
                              const CycleConfig& config = {});

}  // namespace posemine
